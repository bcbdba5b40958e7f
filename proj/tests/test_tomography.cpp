// Copyright 2026 The entop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entop/errors.hpp"
#include "entop/metrics.hpp"
#include "entop/operators.hpp"
#include "entop/tomography.hpp"
#include "test_support.hpp"

using namespace entop;

namespace {

const double kS = 1.0 / std::numbers::sqrt2;

ComplexVector ket(const std::string& s) { return product_ket(s); }

ComplexVector bell_phi(double phi) {
  return (ket("HH") + std::polar(1.0, phi) * ket("VV")) * kS;
}

void check_density_invariants(const ComplexMatrix& rho) {
  CHECK(is_hermitian(rho, 1e-10));
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
  CHECK(hermitian_eig(rho).values.back() >= -1e-10);
}

const CountRecord& find(const std::vector<CountRecord>& counts, const std::string& label) {
  for (const auto& c : counts)
    if (c.setting.label == label) return c;
  throw std::runtime_error("missing setting " + label);
}

}  // namespace

TEST_CASE("standard settings") {
  CHECK(standard_settings(1).size() == 6);
  CHECK(standard_settings(2).size() == 36);
  CHECK(standard_settings(3).size() == 216);
  for (const auto& s : standard_settings(2)) {
    CHECK(max_abs_diff(s.projector * s.projector, s.projector) < 1e-10);
    CHECK(is_hermitian(s.projector));
    CHECK(s.projector.trace().real() == doctest::Approx(1.0));
  }
  CHECK(standard_settings(1)[5].label == "L");
  CHECK_THROWS_AS(standard_settings(0), Error);
  CHECK_THROWS_AS(setting_from_label("HX"), ParseError);
}

TEST_CASE("simulate_counts expectations") {
  const auto h = simulate_counts(projector(ket("H")), standard_settings(1), 1000, 1, false);
  CHECK(find(h, "H").count == doctest::Approx(1000.0));
  CHECK(find(h, "D").count == doctest::Approx(500.0));
  CHECK(find(h, "V").count == doctest::Approx(0.0));

  const ComplexMatrix rho = projector(bell_phi(0.0));
  const auto b = simulate_counts(rho, standard_settings(2), 10000, 1, false);
  // Direct trace with the HH projector.
  CHECK(find(b, "HH").count == doctest::Approx(10000.0 * std::norm(bell_phi(0.0)(0))));
  CHECK(find(b, "HH").count == doctest::Approx(5000.0));

  const auto p = simulate_counts(rho, standard_settings(2), 10000, 7, true);
  for (const auto& c : p) {
    CHECK(c.count == std::floor(c.count));
    CHECK(c.count >= 0.0);
  }
  const auto p2 = simulate_counts(rho, standard_settings(2), 10000, 7, true);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k].count == p2[k].count);
}

TEST_CASE("qst_mle on exact counts") {
  const auto h = qst_mle(simulate_counts(projector(ket("H")), standard_settings(1), 1000, 1, false));
  CHECK(state_fidelity(h.rho, ket("H")) >= 0.9999);
  check_density_invariants(h.rho);

  for (int k = 0; k < 4; ++k) {
    const ComplexVector psi = bell_phi(k * std::numbers::pi / 2);
    const auto e = qst_mle(simulate_counts(projector(psi), standard_settings(2), 10000, 1, false));
    CHECK(state_fidelity(e.rho, psi) >= 0.9999);
    CHECK(e.converged);
    check_density_invariants(e.rho);
  }
}

TEST_CASE("MLE consistency on random mixed states") {
  Rng rng = make_stream(41, 0);
  const auto settings = standard_settings(2);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix rho = testing::random_density(rng, 4);
    const auto e = qst_mle(simulate_counts(rho, settings, 10000, 1, false));
    CHECK(uhlmann_fidelity(e.rho, rho) >= 1.0 - 1e-6);
    check_density_invariants(e.rho);
  }
}

TEST_CASE("likelihood is non-decreasing along the iteration") {
  Rng rng = make_stream(42, 0);
  const auto settings = standard_settings(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix rho = (trial % 2 == 0) ? testing::random_density(rng, 4)
                                               : projector(testing::random_ket(rng, 4));
    const auto counts = simulate_counts(rho, settings, 500, rng, true);
    double last = -std::numeric_limits<double>::infinity();
    bool monotone = true;
    MleOptions options;
    options.observer = [&](std::size_t, double logL) {
      if (logL < last) monotone = false;
      last = logL;
    };
    const auto e = qst_mle(counts, options);
    CHECK(monotone);
    check_density_invariants(e.rho);
    CHECK(e.logLikelihood == doctest::Approx(last));
  }
}

TEST_CASE("adversarial counts still yield a density matrix") {
  auto counts = simulate_counts(projector(ket("HH")), standard_settings(2), 100, 1, false);
  for (auto& c : counts) c.count = 0.0;
  const auto zero = qst_mle(counts);
  check_density_invariants(zero.rho);

  // Counts inconsistent with any state.
  for (auto& c : counts) c.count = (c.setting.label[0] == 'H' || c.setting.label[0] == 'V') ? 100.0 : 0.0;
  const auto odd = qst_mle(counts);
  check_density_invariants(odd.rho);
}

TEST_CASE("informational completeness is checked") {
  auto settings = standard_settings(1);
  settings.resize(2);  // H and V only
  try {
    qst_mle(simulate_counts(projector(ket("H")), settings, 100, 1, false));
    FAIL("expected NotInformationallyComplete");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInformationallyComplete);
  }
}

TEST_CASE("MLE agrees with linear inversion at zero noise") {
  Rng rng = make_stream(43, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix rho = testing::random_density(rng, 4);
    const auto counts = simulate_counts(rho, standard_settings(2), 10000, 1, false);
    CHECK(trace_distance(qst_mle(counts).rho, linear_inversion(counts)) < 1e-6);
    CHECK(trace_distance(linear_inversion(counts), rho) < 1e-9);
  }
}

TEST_CASE("gradient fallback engages when RrhoR stalls") {
  const auto counts = simulate_counts(projector(bell_phi(0.3)), standard_settings(2), 10000, 1, false);
  PoissonProblem problem;
  for (const auto& c : counts) {
    problem.functionals.push_back(c.exposure * c.setting.projector);
    problem.counts.push_back(c.count);
  }
  MleOptions options;
  options.stallWindow = 1;
  options.stallTolerance = 1.0;  // every step counts as stalled
  options.relativeTolerance = 1e-14;
  double last = -std::numeric_limits<double>::infinity();
  bool monotone = true;
  options.observer = [&](std::size_t, double logL) {
    monotone = monotone && logL >= last;
    last = logL;
  };
  const auto r = maximize_likelihood(problem, options);
  CHECK(r.usedGradientFallback);
  CHECK(monotone);
  CHECK(state_fidelity(r.x, bell_phi(0.3)) > 0.99);
}

TEST_CASE("ideal process matrices") {
  const auto labels = pauli_labels(2);
  CHECK(labels.size() == 16);
  CHECK(labels[0] == "II");
  CHECK(labels[1] == "IX");
  CHECK(labels[4] == "XI");
  auto idx = [&](const std::string& l) {
    return static_cast<Eigen::Index>(std::find(labels.begin(), labels.end(), l) - labels.begin());
  };

  const auto id = ideal_process(identity(4));
  CHECK(std::abs(id.chi(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(id.chi.trace() - 1.0) < 1e-12);

  const ComplexMatrix zz = tensor_product(pauli::Z(), pauli::Z());
  const ComplexMatrix xx = tensor_product(pauli::X(), pauli::X());
  const auto zx = ideal_process(kS * (zz + xx));
  for (const auto& a : {"XX", "ZZ"}) {
    for (const auto& b : {"XX", "ZZ"}) {
      CHECK(std::abs(zx.chi(idx(a), idx(b)) - 0.5) < 1e-6);
    }
  }
  CHECK(std::abs(zx.chi.trace() - 1.0) < 1e-12);
  CHECK(zx.chi.cwiseAbs().sum() == doctest::Approx(2.0));

  const Complex i{0.0, 1.0};
  const auto ix = ideal_process(kS * (identity(4) + i * xx));
  CHECK(std::abs(ix.chi(idx("II"), idx("II")) - 0.5) < 1e-6);
  CHECK(std::abs(ix.chi(idx("XX"), idx("XX")) - 0.5) < 1e-6);
  CHECK(std::abs(ix.chi(idx("XX"), idx("II")) - 0.5 * i) < 1e-6);
  CHECK(std::abs(ix.chi(idx("II"), idx("XX")) + 0.5 * i) < 1e-6);
  CHECK(ix.rawTrace == doctest::Approx(1.0));

  // Rank-1 chi reproduces the channel: sum chi_mn P_m rho P_n^dagger = O rho O^dagger.
  Rng rng = make_stream(44, 0);
  const ComplexMatrix o = testing::random_unitary(rng, 4);
  const auto chi = ideal_process(o);
  const auto basis = pauli_basis(2);
  const ComplexMatrix rho = testing::random_density(rng, 4);
  ComplexMatrix out = ComplexMatrix::Zero(4, 4);
  for (std::size_t m = 0; m < 16; ++m)
    for (std::size_t n = 0; n < 16; ++n)
      out += chi.chi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) * basis[m] * rho *
             basis[n].adjoint();
  CHECK(max_abs_diff(out, o * rho * o.adjoint()) < 1e-12);
}

namespace {

struct ChannelData {
  std::vector<ComplexVector> inputs;
  std::vector<ComplexMatrix> outputs;
  std::vector<double> weights;
  std::vector<std::vector<CountRecord>> counts;
};

ChannelData exact_channel(const ComplexMatrix& o, double exposure) {
  ChannelData d;
  d.inputs = qpt_input_states(2);
  for (const auto& psi : d.inputs) {
    const ComplexVector v = o * psi;
    const ComplexMatrix unnormalised = projector(v);
    d.weights.push_back(v.squaredNorm());
    d.outputs.push_back(v.squaredNorm() > 0 ? ComplexMatrix(unnormalised / v.squaredNorm())
                                            : ComplexMatrix(identity(4) / 4.0));
    d.counts.push_back(simulate_counts(unnormalised, standard_settings(2), exposure, 1, false));
  }
  return d;
}

}  // namespace

TEST_CASE("process tomography of exact data") {
  const Complex i{0.0, 1.0};
  const ComplexMatrix xx = tensor_product(pauli::X(), pauli::X());
  const ComplexMatrix zz = tensor_product(pauli::Z(), pauli::Z());

  const auto id = exact_channel(identity(4), 1e4);
  const auto chiId = qpt(id.inputs, id.outputs, id.weights);
  CHECK(std::abs(chiId.chi(0, 0) - 1.0) < 1e-6);
  CHECK(process_fidelity(qpt_mle(id.inputs, id.counts), ideal_process(identity(4))) >= 0.999);

  Rng rng = make_stream(45, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const ComplexMatrix u = testing::random_unitary(rng, 4);
    const auto data = exact_channel(u, 1e4);
    CHECK(process_fidelity(qpt(data.inputs, data.outputs, data.weights), ideal_process(u)) >= 0.999);
    CHECK(process_fidelity(qpt_mle(data.inputs, data.counts), ideal_process(u)) >= 0.999);
  }

  // Non-trace-preserving ZZ + XX: one input is annihilated.
  const ComplexMatrix op = kS * (zz + xx);
  const auto nt = exact_channel(op, 1e4);
  CHECK(*std::min_element(nt.weights.begin(), nt.weights.end()) < 1e-12);
  CHECK(process_fidelity(qpt(nt.inputs, nt.outputs, nt.weights), ideal_process(op)) >= 0.999);
  CHECK(process_fidelity(qpt_mle(nt.inputs, nt.counts), ideal_process(op)) >= 0.999);

  const ComplexMatrix ixx = kS * (identity(4) + i * xx);
  const auto un = exact_channel(ixx, 1e4);
  CHECK(process_fidelity(qpt_mle(un.inputs, un.counts), ideal_process(ixx)) >= 0.999);
}

TEST_CASE("process tomography errors") {
  std::vector<ComplexVector> degenerate(16, ket("HH"));
  std::vector<ComplexMatrix> outputs(16, projector(ket("HH")));
  try {
    qpt(degenerate, outputs, std::vector<double>(16, 1.0));
    FAIL("expected InputSetDegenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InputSetDegenerate);
  }
  CHECK_THROWS_AS(process_fidelity(ideal_process(identity(4)), ideal_process(identity(2))), Error);
}

TEST_CASE("project_to_process") {
  ComplexMatrix raw = ComplexMatrix::Zero(4, 4);
  raw(0, 0) = 2.0;
  raw(1, 1) = -0.5;
  const auto p = project_to_process(raw, 1);
  CHECK(std::abs(p.chi(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(p.chi(1, 1)) < 1e-12);
  CHECK(p.basisLabels.size() == 4);
}

TEST_CASE("monte_carlo statistics") {
  const ComplexVector psi = bell_phi(0.0);
  const auto expected = simulate_counts(projector(psi), standard_settings(2), 1e4, 1, false);

  // Exact counts: every repeat is identical.
  const auto exact = monte_carlo(
      [&](Rng&, std::size_t) {
        return MetricSample{{"fidelity", state_fidelity(qst_mle(expected).rho, psi)}};
      },
      5, 1);
  CHECK(exact.front().std < 1e-9);
  CHECK(exact.front().repeats == 5);

  auto run = [&](double exposure, std::size_t repeats) {
    const auto mean = simulate_counts(projector(psi), standard_settings(2), exposure, 1, false);
    return monte_carlo(
        [&](Rng& rng, std::size_t) {
          const auto e = qst_mle(resample_counts(mean, rng));
          return MetricSample{{"fidelity", state_fidelity(e.rho, psi)}, {"purity", purity(e.rho)}};
        },
        repeats, 2026);
  };
  const auto n4 = run(1e4, 100);
  REQUIRE(n4.size() == 2);
  CHECK(n4[0].metricName == "fidelity");
  CHECK(n4[0].mean >= 0.99);
  CHECK(n4[0].std > 0.0);
  CHECK(n4[0].std < 0.02);

  // Poisson scaling on a mixed (dephased) state, where fidelity fluctuates
  // at first order: ten times the counts shrinks the spread by sqrt(10).
  const ComplexMatrix dephased =
      0.94 * projector(psi) + 0.06 * projector((ket("HH") - ket("VV")) * kS);
  auto spread = [&](double exposure) {
    const auto mean = simulate_counts(dephased, standard_settings(2), exposure, 1, false);
    return monte_carlo(
               [&](Rng& rng, std::size_t) {
                 return MetricSample{{"fidelity", state_fidelity(qst_mle(resample_counts(mean, rng)).rho, psi)}};
               },
               100, 77)
        .front()
        .std;
  };
  const double ratio = spread(1e3) / spread(1e4);
  CHECK(ratio > std::sqrt(10.0) / 2.0);
  CHECK(ratio < std::sqrt(10.0) * 2.0);

  CHECK_THROWS_AS(monte_carlo([](Rng&, std::size_t) { return MetricSample{}; }, 1, 0), Error);
}

TEST_CASE("monte_carlo is independent of thread count") {
  auto trial = [](Rng& rng, std::size_t r) {
    return MetricSample{{"x", std::uniform_real_distribution<double>(0, 1)(rng) + static_cast<double>(r)}};
  };
  setenv("ENTOP_THREADS", "1", 1);
  const auto a = monte_carlo(trial, 50, 9);
  setenv("ENTOP_THREADS", "4", 1);
  const auto b = monte_carlo(trial, 50, 9);
  unsetenv("ENTOP_THREADS");
  CHECK(a[0].mean == b[0].mean);
  CHECK(a[0].std == b[0].std);
}
