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
#include <vector>

#include "entop/errors.hpp"
#include "entop/metrics.hpp"
#include "entop/operators.hpp"
#include "entop/tomography.hpp"
#include "test_support.hpp"

using namespace entop;
using entop::testing::random_ket;
using entop::testing::random_matrix;
using entop::testing::random_unitary;
using entop::testing::uniform;

namespace {

const Complex kI{0.0, 1.0};
const double kS = 1.0 / std::numbers::sqrt2;

// Schmidt coefficients from the Pauli-basis expansion O = sum C_mn P_m (x) P_n,
// independent of the realignment code path.
std::vector<double> schmidt_oracle(const ComplexMatrix& o, std::size_t qubitsA, std::size_t qubitsB) {
  const auto pa = pauli_basis(qubitsA);
  const auto pb = pauli_basis(qubitsB);
  const double da = std::pow(2.0, static_cast<double>(qubitsA));
  const double db = std::pow(2.0, static_cast<double>(qubitsB));
  ComplexMatrix c(static_cast<Eigen::Index>(pa.size()), static_cast<Eigen::Index>(pb.size()));
  for (std::size_t m = 0; m < pa.size(); ++m)
    for (std::size_t n = 0; n < pb.size(); ++n)
      c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) =
          (tensor_product(pa[m], pb[n]).adjoint() * o).trace() / (da * db);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(c.adjoint() * c);
  std::vector<double> out;
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k))) * std::sqrt(da * db));
  }
  return out;
}

void check_coefficients(const SchmidtDecomposition& d, const std::vector<double>& oracle) {
  for (std::size_t k = 0; k < d.coefficients.size(); ++k) {
    CHECK(std::abs(d.coefficients[k] - oracle[k]) < 1e-9);
  }
}

ComplexMatrix cnot() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

ComplexVector ket(const std::string& s) { return product_ket(s); }

}  // namespace

TEST_CASE("local operators and waveplates") {
  CHECK(local::X().label.value() == "X");
  const auto h = local::half_wave_plate(0.3);
  CHECK(h.matrix(0, 0).real() == doctest::Approx(std::cos(0.6)));
  CHECK(h.matrix(0, 1).real() == doctest::Approx(std::sin(0.6)));
  CHECK(h.matrix(1, 1).real() == doctest::Approx(-std::cos(0.6)));
  CHECK(is_unitary(local::quarter_wave_plate(0.4).matrix));
  // A quarter-wave plate at 0 only retards V by a quarter wave.
  const auto q0 = local::quarter_wave_plate(0.0).matrix;
  CHECK(std::abs(q0(0, 0) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(q0(1, 1) - kI) < 1e-15);
  CHECK_THROWS_AS(local::custom(ComplexMatrix::Identity(3, 3)), Error);
}

TEST_CASE("build_superposition") {
  SUBCASE("flagship operator") {
    for (double phi : {0.0, 0.9, 2.5}) {
      const auto s = build_superposition({BranchTerm{1.0, {local::Z(), local::Z()}},
                                          BranchTerm{std::polar(1.0, phi), {local::X(), local::X()}}});
      const ComplexMatrix expected =
          kS * (tensor_product(pauli::Z(), pauli::Z()) +
                std::polar(1.0, phi) * tensor_product(pauli::X(), pauli::X()));
      CHECK(max_abs_diff(to_matrix(s), expected) < 1e-15);
      double norm = 0.0;
      for (const auto& t : s.terms) norm += std::norm(t.coefficient);
      CHECK(std::abs(norm - 1.0) < 1e-12);
    }
  }
  SUBCASE("identity") {
    const auto s = build_superposition({BranchTerm{1.0, {local::I(), local::I()}}});
    CHECK(max_abs_diff(to_matrix(s), identity(4)) < 1e-15);
    CHECK(schmidt_number(schmidt_decompose(to_matrix(s), 2, 2)) == 1);
  }
  SUBCASE("unitary II + iXX") {
    const auto s = build_superposition({BranchTerm{1.0, {local::I(), local::I()}},
                                        BranchTerm{kI, {local::X(), local::X()}}});
    const ComplexMatrix expected = kS * (identity(4) + kI * tensor_product(pauli::X(), pauli::X()));
    CHECK(max_abs_diff(to_matrix(s), expected) < 1e-15);
    CHECK(is_unitary(to_matrix(s)));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(build_superposition({}), Error);
    try {
      build_superposition({BranchTerm{1.0, {local::I(), local::I()}},
                           BranchTerm{1.0, {local::X()}}});
      FAIL("expected MismatchedParties");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MismatchedParties);
    }
    try {
      build_superposition({});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyTermList);
    }
    CHECK_THROWS_AS(build_superposition({BranchTerm{0.0, {local::I()}}}), Error);
  }
}

TEST_CASE("to_matrix examples") {
  for (double phi : {0.0, 1.0, 3.0}) {
    const auto s = build_superposition({BranchTerm{1.0, {local::I(), local::I()}},
                                        BranchTerm{std::polar(1.0, phi), {local::X(), local::X()}}});
    const ComplexMatrix m = to_matrix(s) / kS;
    for (int r = 0; r < 4; ++r) {
      CHECK(std::abs(m(r, r) - 1.0) < 1e-14);
      CHECK(std::abs(m(r, 3 - r) - std::polar(1.0, phi)) < 1e-14);
    }
  }
  ComplexMatrix filter = ComplexMatrix::Zero(4, 4);
  filter(0, 0) = filter(3, 3) = kS;
  CHECK(max_abs_diff(to_matrix(entanglement_filter()), filter) < 1e-15);

  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
  // The normalised builder rescales 1/2 (II+XX+YY+ZZ) by 1/sqrt(4 * 1/4).
  const ComplexMatrix built = to_matrix(swap_operator());
  CHECK(equal_up_to_global_phase(built / built(0, 0).real(), swap, 1e-14));
}

TEST_CASE("apply_to_state examples") {
  const auto s = build_superposition({BranchTerm{1.0, {local::I(), local::I()}},
                                      BranchTerm{1.0, {local::X(), local::X()}}});
  const auto out = apply_to_state(s, ket("HH"));
  CHECK(out.weight == doctest::Approx(1.0));
  CHECK(max_abs_diff(out.state, (ket("HH") + ket("VV")) * kS) < 1e-12);

  for (double phi : {0.0, 0.7, 2.0}) {
    const auto zx = build_superposition({BranchTerm{1.0, {local::Z(), local::Z()}},
                                         BranchTerm{std::polar(1.0, phi), {local::X(), local::X()}}});
    const auto hv = apply_to_state(zx, ket("HV"));
    CHECK(hv.weight == doctest::Approx(1.0));
    const ComplexVector expected = -(ket("HV") - std::polar(1.0, phi) * ket("VH")) * kS;
    CHECK(max_abs_diff(hv.state, expected) < 1e-12);
  }

  const Complex a{0.6, 0.0};
  const Complex b{0.0, 0.8};
  const auto f = apply_to_state(entanglement_filter(), a * ket("HH") + b * ket("HV"));
  CHECK(max_abs_diff(f.state, ket("HH")) < 1e-12);
  CHECK(f.weight == doctest::Approx(std::norm(a) / 2.0));

  try {
    apply_to_state(entanglement_filter(), ket("HV"));
    FAIL("expected Annihilated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Annihilated);
  }
  const ComplexVector bell = (ket("HH") + ket("VV")) * kS;
  const auto fb = apply_to_state(entanglement_filter(), bell);
  CHECK(max_abs_diff(fb.state, bell) < 1e-12);
  CHECK(fb.weight == doctest::Approx(0.5));
  CHECK(apply_to_state(entanglement_filter(), ket("HH")).weight == doctest::Approx(0.5));
}

TEST_CASE("apply_to_state weight equals the expectation of O^dagger O") {
  Rng rng = make_stream(21, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const ComplexMatrix o = random_matrix(rng, 4, 4);
    const ComplexVector psi = random_ket(rng, 4);
    const auto out = apply_to_state(o, psi);
    CHECK(std::abs(out.weight - psi.dot(o.adjoint() * o * psi).real()) < 1e-12);
    CHECK(std::abs(out.state.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("schmidt_decompose examples") {
  const auto id = schmidt_decompose(identity(4), 2, 2);
  CHECK(id.coefficients[0] == doctest::Approx(2.0));
  for (std::size_t k = 1; k < 4; ++k) CHECK(id.coefficients[k] < 1e-12);

  const auto c = schmidt_decompose(cnot(), 2, 2);
  CHECK(c.coefficients[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.coefficients[1] == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.coefficients[2] < 1e-12);
  CHECK(schmidt_number(c) == 2);

  const auto sw = schmidt_decompose(to_matrix(swap_operator()), 2, 2);
  for (std::size_t k = 0; k < 4; ++k) CHECK(sw.coefficients[k] == doctest::Approx(1.0));
  CHECK(schmidt_number(sw) == 4);

  const auto zx = build_superposition({BranchTerm{1.0, {local::Z(), local::Z()}},
                                       BranchTerm{1.0, {local::X(), local::X()}}});
  CHECK(schmidt_number(schmidt_decompose(to_matrix(zx), 2, 2)) == 2);
  CHECK_FALSE(is_unitary(to_matrix(zx)));
  CHECK_THROWS_AS(schmidt_decompose(identity(4), 2, 3), Error);
}

TEST_CASE("schmidt coefficients match the Pauli-expansion oracle") {
  check_coefficients(schmidt_decompose(cnot(), 2, 2), schmidt_oracle(cnot(), 1, 1));
  const ComplexMatrix sw = to_matrix(swap_operator());
  check_coefficients(schmidt_decompose(sw, 2, 2), schmidt_oracle(sw, 1, 1));
  const ComplexMatrix toffoli = to_matrix(ccu(local::X()));
  check_coefficients(schmidt_decompose(toffoli, 2, 4), schmidt_oracle(toffoli, 1, 2));

  Rng rng = make_stream(22, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix o = random_matrix(rng, 4, 4);
    const auto d = schmidt_decompose(o, 2, 2);
    check_coefficients(d, schmidt_oracle(o, 1, 1));
    CHECK(max_abs_diff(d.reconstruct(), o) < 1e-9);
    double sum = 0.0;
    for (double c : d.coefficients) sum += c * c;
    CHECK(std::abs(sum - o.squaredNorm()) < 1e-9);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = a + 1; b < 4; ++b) {
        CHECK(std::abs(hs_inner(d.leftFactors[a], d.leftFactors[b])) < 1e-9);
        CHECK(std::abs(hs_inner(d.rightFactors[a], d.rightFactors[b])) < 1e-9);
      }
    }
  }
}

TEST_CASE("product operators have Schmidt number one") {
  Rng rng = make_stream(23, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix o = tensor_product(random_matrix(rng, 2, 2), random_matrix(rng, 2, 2));
    CHECK(schmidt_number(schmidt_decompose(o, 2, 2)) == 1);
  }
}

TEST_CASE("Schmidt coefficients are invariant under local unitaries") {
  Rng rng = make_stream(24, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix o = random_matrix(rng, 4, 4);
    const ComplexMatrix left = tensor_product(random_unitary(rng, 2), random_unitary(rng, 2));
    const ComplexMatrix right = tensor_product(random_unitary(rng, 2), random_unitary(rng, 2));
    const auto a = schmidt_decompose(o, 2, 2);
    const auto b = schmidt_decompose(left * o * right, 2, 2);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(a.coefficients[k] - b.coefficients[k]) < 1e-9);
    }
  }
}

TEST_CASE("Schmidt number never exceeds the branch count") {
  Rng rng = make_stream(25, 0);
  for (std::size_t m = 1; m <= 4; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<BranchTerm> terms;
      std::vector<ComplexMatrix> lefts;
      std::vector<ComplexMatrix> rights;
      for (std::size_t k = 0; k < m; ++k) {
        ComplexMatrix a = random_matrix(rng, 2, 2);
        ComplexMatrix b = random_matrix(rng, 2, 2);
        // Occasionally repeat a left factor to force linear dependence.
        if (k > 0 && trial % 3 == 0) a = lefts.front();
        lefts.push_back(a);
        rights.push_back(b);
        terms.push_back(BranchTerm{1.0, {local::custom(a), local::custom(b)}});
      }
      const auto s = build_superposition(terms);
      const std::size_t rank = schmidt_number(schmidt_decompose(to_matrix(s), 2, 2));
      CHECK(rank <= m);
      ComplexMatrix lv(4, static_cast<Eigen::Index>(m));
      ComplexMatrix rv(4, static_cast<Eigen::Index>(m));
      for (std::size_t k = 0; k < m; ++k) {
        lv.col(static_cast<Eigen::Index>(k)) = vec_row_major(lefts[k]);
        rv.col(static_cast<Eigen::Index>(k)) = vec_row_major(rights[k]);
      }
      Eigen::FullPivLU<ComplexMatrix> luL(lv);
      Eigen::FullPivLU<ComplexMatrix> luR(rv);
      const bool independent = luL.rank() == static_cast<Eigen::Index>(m) &&
                               luR.rank() == static_cast<Eigen::Index>(m);
      CHECK((rank == m) == independent);
    }
  }
}

TEST_CASE("unitarity") {
  CHECK(is_unitary(identity(4)));
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    CHECK(is_unitary(to_matrix(schmidt2_unitary(p))));
  }
  for (const auto& [a, b] : std::vector<std::pair<LocalOperator, LocalOperator>>{
           {local::Z(), local::X()}, {local::I(), local::Z()}, {local::Y(), local::X()}}) {
    const auto s = build_superposition({BranchTerm{1.0, {a, a}}, BranchTerm{1.0, {b, b}}});
    CHECK_FALSE(is_unitary(to_matrix(s)));
  }
}

TEST_CASE("schmidt2_unitary") {
  const auto p0 = to_matrix(schmidt2_unitary(0.0));
  CHECK(max_abs_diff(p0, identity(4)) < 1e-15);
  CHECK(schmidt_number(schmidt_decompose(p0, 2, 2)) == 1);

  const auto half = to_matrix(schmidt2_unitary(0.5));
  const ComplexMatrix expected = kS * (identity(4) + kI * tensor_product(pauli::X(), pauli::X()));
  CHECK(max_abs_diff(half, expected) < 1e-15);
  CHECK(schmidt_number(schmidt_decompose(half, 2, 2)) == 2);

  const auto p1 = to_matrix(schmidt2_unitary(1.0));
  CHECK(max_abs_diff(p1, kI * tensor_product(pauli::X(), pauli::X())) < 1e-15);
  CHECK(schmidt_number(schmidt_decompose(p1, 2, 2)) == 1);

  CHECK_THROWS_AS(schmidt2_unitary(-0.1), Error);
  CHECK_THROWS_AS(schmidt2_unitary(1.1), Error);
}

TEST_CASE("ising_xx") {
  const ComplexMatrix xx = tensor_product(pauli::X(), pauli::X());
  CHECK(max_abs_diff(ising_xx(0.0), identity(4)) < 1e-15);
  CHECK(max_abs_diff(ising_xx(std::numbers::pi / 2), -kI * xx) < 1e-15);
  const ComplexMatrix target = kS * (identity(4) + kI * xx);
  CHECK(max_abs_diff(ising_xx(3 * std::numbers::pi / 4), -target) < 1e-15);
  CHECK(equal_up_to_global_phase(ising_xx(3 * std::numbers::pi / 4),
                                 to_matrix(schmidt2_unitary(0.5)), 1e-12));
  // exp(-i theta XX) by direct series of the involution XX.
  for (double theta : {0.1, 0.8, 2.2}) {
    const ComplexMatrix series = std::cos(theta) * identity(4) - kI * std::sin(theta) * xx;
    CHECK(max_abs_diff(ising_xx(theta), series) < 1e-15);
    CHECK(is_unitary(ising_xx(theta)));
  }
}

TEST_CASE("controlled unitaries") {
  const ComplexMatrix cx = to_matrix(controlled_unitary(local::X()));
  CHECK(max_abs_diff(cx, kS * cnot()) < 1e-15);
  CHECK(max_abs_diff(to_matrix(controlled_unitary(local::I())), kS * identity(4)) < 1e-15);
  const auto out = apply_to_state(controlled_unitary(local::X()), ket("VH"));
  CHECK(max_abs_diff(out.state, ket("VV")) < 1e-12);
  CHECK(out.weight == doctest::Approx(0.5));
}

TEST_CASE("three-party constructions") {
  const auto ghz = apply_to_state(ghz_operator(), ket("HHH"));
  CHECK(ghz.weight == doctest::Approx(1.0));
  CHECK(max_abs_diff(ghz.state, (ket("HHH") + ket("VVV")) * kS) < 1e-12);

  const auto w = apply_to_state(w_operator(), ket("HHH"));
  CHECK(w.weight == doctest::Approx(1.0));
  CHECK(max_abs_diff(w.state, (ket("HHV") + ket("HVH") + ket("VHH")) / std::sqrt(3.0)) < 1e-12);

  const auto toffoli = ccu(local::X());
  CHECK(max_abs_diff(apply_to_state(toffoli, ket("VVH")).state, ket("VVV")) < 1e-12);
  const ComplexMatrix m = to_matrix(toffoli);
  for (std::size_t b = 0; b < 8; ++b) {
    const std::size_t expected = (b >= 6) ? (b ^ 1) : b;
    const ComplexVector out = m * basis_ket(8, b);
    Eigen::Index best = 0;
    out.cwiseAbs().maxCoeff(&best);
    CHECK(static_cast<std::size_t>(best) == expected);
  }
}

TEST_CASE("operators generate entanglement from product states") {
  for (int k = 0; k < 8; ++k) {
    const double phi = 2 * std::numbers::pi * k / 8;
    const auto s = build_superposition({BranchTerm{1.0, {local::I(), local::I()}},
                                        BranchTerm{std::polar(1.0, phi), {local::X(), local::X()}}});
    const auto out = apply_to_state(s, ket("HH"));
    CHECK(concurrence(projector(out.state)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("polarisation kets") {
  CHECK(std::abs(ket("D").dot(ket("A"))) < 1e-15);
  CHECK(std::abs(ket("R").dot(ket("L"))) < 1e-15);
  CHECK(std::abs(ket("R")(1) - kI * kS) < 1e-15);
  CHECK(ket("HVD").size() == 8);
  try {
    product_ket("HQ");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 1);
  }
}
