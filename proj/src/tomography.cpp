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

#include "entop/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "entop/errors.hpp"
#include "entop/operators.hpp"

namespace entop {

MeasurementSetting setting_from_label(const std::string& label) {
  if (label.empty()) throw ParseError(0, "empty measurement label");
  for (std::size_t k = 0; k < label.size(); ++k) {
    if (std::string("HVDARL").find(label[k]) == std::string::npos) {
      throw ParseError(k, std::string("unknown measurement basis '") + label[k] + "'");
    }
  }
  return MeasurementSetting{label, projector(product_ket(label))};
}

std::vector<MeasurementSetting> standard_settings(std::size_t nQubits) {
  if (nQubits == 0) throw Error(ErrorKind::InvalidArgument, "need at least one qubit");
  static constexpr char kBases[] = "HVDARL";
  std::vector<std::string> labels{""};
  for (std::size_t q = 0; q < nQubits; ++q) {
    std::vector<std::string> next;
    next.reserve(labels.size() * 6);
    for (const auto& prefix : labels)
      for (int b = 0; b < 6; ++b) next.push_back(prefix + kBases[b]);
    labels = std::move(next);
  }
  std::vector<MeasurementSetting> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(setting_from_label(l));
  return out;
}

std::vector<CountRecord> simulate_counts(const ComplexMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         double exposure, Rng& rng, bool poisson) {
  require_valid(rho, "density matrix");
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (const auto& s : settings) {
    if (s.projector.rows() != rho.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "setting " + s.label + " has wrong dimension");
    }
    const double mean = std::max(0.0, exposure * hs_inner(s.projector, rho).real());
    double count = mean;
    if (poisson) {
      count = mean > 0.0
                  ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng))
                  : 0.0;
    }
    out.push_back(CountRecord{s, count, exposure});
  }
  return out;
}

std::vector<CountRecord> simulate_counts(const ComplexMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         double exposure, std::uint64_t seed,
                                         bool poisson) {
  Rng rng = make_stream(seed, 0);
  return simulate_counts(rho, settings, exposure, rng, poisson);
}

std::vector<CountRecord> resample_counts(const std::vector<CountRecord>& counts,
                                         Rng& rng) {
  std::vector<CountRecord> out = counts;
  for (auto& c : out) {
    c.count = c.count > 0.0
                  ? static_cast<double>(std::poisson_distribution<long long>(c.count)(rng))
                  : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Likelihood maximisation

namespace {

struct CompiledProblem {
  ComplexMatrix rows;  // K x D^2, row k = conj(vec(A_k)), so mu = Re(rows * vec(X))
  Eigen::VectorXd counts;
  Eigen::Index dim = 0;
  bool unitTrace = true;
  double scale = 1.0;  // largest eigenvalue of sum_k A_k
};

CompiledProblem compile(const PoissonProblem& problem) {
  if (problem.functionals.empty() ||
      problem.functionals.size() != problem.counts.size()) {
    throw Error(ErrorKind::InvalidArgument, "functionals and counts must pair up");
  }
  CompiledProblem c;
  c.dim = problem.functionals.front().rows();
  c.unitTrace = problem.unitTrace;
  const auto k = static_cast<Eigen::Index>(problem.functionals.size());
  c.rows.resize(k, c.dim * c.dim);
  c.counts.resize(k);
  ComplexMatrix total = ComplexMatrix::Zero(c.dim, c.dim);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& a = problem.functionals[static_cast<std::size_t>(i)];
    if (a.rows() != c.dim || a.cols() != c.dim) {
      throw Error(ErrorKind::DimensionMismatch, "functionals differ in dimension");
    }
    c.rows.row(i) = vec_row_major(a).conjugate().transpose();
    const double n = problem.counts[static_cast<std::size_t>(i)];
    if (!(n >= 0.0) || !std::isfinite(n)) {
      throw Error(ErrorKind::InvalidArgument, "counts must be finite and non-negative");
    }
    c.counts(i) = n;
    total += a;
  }
  // Rank of the Gram matrix of the functionals.
  const ComplexMatrix gram = c.rows.adjoint() * c.rows;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> gramEig(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd gv = gramEig.eigenvalues();
  const double largest = gv.size() ? gv.maxCoeff() : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index j = 0; j < gv.size(); ++j) rank += (gv(j) > 1e-20 * largest) ? 1 : 0;
  if (rank < static_cast<std::size_t>(c.dim * c.dim)) {
    throw Error(ErrorKind::NotInformationallyComplete,
                "functionals span " + std::to_string(rank) + " of " +
                    std::to_string(c.dim * c.dim) + " operator dimensions");
  }
  c.scale = hermitian_eig(hermitian_part(total)).values.front();
  if (!(c.scale > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "functionals must be positive semidefinite");
  }
  return c;
}

Eigen::VectorXd expected(const CompiledProblem& p, const ComplexMatrix& x) {
  return (p.rows * vec_row_major(x)).real();
}

double log_likelihood(const CompiledProblem& p, const Eigen::VectorXd& mu) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    const double n = p.counts(k);
    if (n > 0.0) {
      if (!(mu(k) > 0.0)) return -std::numeric_limits<double>::infinity();
      total += n * std::log(mu(k));
    }
    total -= mu(k);
  }
  return total;
}

// Gradient of log L with respect to X: sum_k (n_k / mu_k - 1) A_k.
ComplexMatrix gradient(const CompiledProblem& p, const Eigen::VectorXd& mu) {
  Eigen::VectorXcd w(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    const double ratio = (p.counts(k) > 0.0) ? p.counts(k) / mu(k) : 0.0;
    w(k) = ratio - 1.0;
  }
  // sum_k w_k vec(A_k) = (rows^dagger w) since rows hold conj(vec(A_k)).
  const ComplexVector g = p.rows.adjoint() * w;
  return hermitian_part(unvec_row_major(g, static_cast<std::size_t>(p.dim),
                                        static_cast<std::size_t>(p.dim)));
}

ComplexMatrix normalise(const CompiledProblem& p, const ComplexMatrix& x) {
  ComplexMatrix h = hermitian_part(x);
  if (p.unitTrace) h /= h.trace().real();
  return h;
}

// X = T^dagger T with T lower triangular.
ComplexMatrix lower_factor(const ComplexMatrix& x) {
  const Eigen::Index d = x.rows();
  const double jitter = 1e-15 * std::max(1.0, x.trace().real());
  ComplexMatrix flipped = x.colwise().reverse().rowwise().reverse();
  flipped += jitter * ComplexMatrix::Identity(d, d);
  Eigen::LLT<ComplexMatrix> llt(hermitian_part(flipped));
  ComplexMatrix l = llt.matrixL();
  ComplexMatrix t = l.adjoint().colwise().reverse().rowwise().reverse();
  return t.triangularView<Eigen::Lower>();
}

struct Step {
  bool accepted = false;
  ComplexMatrix x;
  double logL = 0.0;
};

// Real coordinates of a Hermitian X: diagonal entries, then Re and Im of the
// strict upper triangle. mu = design * coords.
Eigen::MatrixXd real_design(const CompiledProblem& p) {
  const Eigen::Index d = p.dim;
  Eigen::MatrixXd m(p.rows.rows(), d * d);
  for (Eigen::Index k = 0; k < p.rows.rows(); ++k) {
    Eigen::Index j = 0;
    for (Eigen::Index a = 0; a < d; ++a) m(k, j++) = p.rows(k, a * d + a).real();
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = a + 1; b < d; ++b) {
        const Complex aab = std::conj(p.rows(k, a * d + b));
        m(k, j++) = 2.0 * aab.real();
        m(k, j++) = 2.0 * aab.imag();
      }
    }
  }
  return m;
}

Eigen::VectorXd to_coords(const ComplexMatrix& x) {
  const Eigen::Index d = x.rows();
  Eigen::VectorXd c(d * d);
  Eigen::Index j = 0;
  for (Eigen::Index a = 0; a < d; ++a) c(j++) = x(a, a).real();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      c(j++) = x(a, b).real();
      c(j++) = x(a, b).imag();
    }
  }
  return c;
}

ComplexMatrix from_coords(const Eigen::VectorXd& c, Eigen::Index d) {
  ComplexMatrix x(d, d);
  Eigen::Index j = 0;
  for (Eigen::Index a = 0; a < d; ++a) x(a, a) = c(j++);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      x(a, b) = Complex(c(j), c(j + 1));
      x(b, a) = std::conj(x(a, b));
      j += 2;
    }
  }
  return x;
}

// Jacobian of mu with respect to (Re T, Im T) for X = T^dagger T.
Eigen::MatrixXd factor_jacobian(const CompiledProblem& p, const ComplexMatrix& t) {
  const Eigen::Index d = p.dim;
  const ComplexMatrix tAdj = t.adjoint();
  Eigen::MatrixXd j(p.rows.rows(), 2 * d * d);
  for (Eigen::Index k = 0; k < p.rows.rows(); ++k) {
    const ComplexMatrix a = unvec_row_major(p.rows.row(k).conjugate().transpose(),
                                            static_cast<std::size_t>(d),
                                            static_cast<std::size_t>(d));
    const ComplexMatrix m = a * tAdj;
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        j(k, r * d + c) = 2.0 * m(c, r).real();
        j(k, d * d + r * d + c) = -2.0 * m(c, r).imag();
      }
    }
  }
  return j;
}

ComplexMatrix factor_of(const ComplexMatrix& x) {
  const auto eig = hermitian_eig(hermitian_part(x), std::numeric_limits<double>::infinity());
  Eigen::VectorXd root(static_cast<Eigen::Index>(eig.values.size()));
  for (std::size_t j = 0; j < eig.values.size(); ++j) {
    root(static_cast<Eigen::Index>(j)) = std::sqrt(std::max(eig.values[j], 0.0));
  }
  return root.asDiagonal() * eig.vectors.adjoint();
}

bool is_psd(const ComplexMatrix& x) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(x, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= 0.0;
}

}  // namespace

double poisson_log_likelihood(const PoissonProblem& problem, const ComplexMatrix& x) {
  const auto p = compile(problem);
  return log_likelihood(p, expected(p, x));
}

MleResult maximize_likelihood(const PoissonProblem& problem, const MleOptions& options) {
  const CompiledProblem p = compile(problem);
  const Eigen::Index d = p.dim;
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);

  ComplexMatrix x = eye / static_cast<double>(d);
  if (!p.unitTrace) {
    // Match the total expected count to the total observed count.
    const double perUnit = expected(p, eye).sum();
    x = eye * (std::max(p.counts.sum(), 1e-12) / perUnit);
  }
  double logL = log_likelihood(p, expected(p, x));
  if (options.observer) options.observer(0, logL);

  MleResult result;
  double dilution = 1.0;
  double gradientStep = 1e-2;
  bool gradientMode = false;
  ComplexMatrix factor;
  std::size_t stalled = 0;

  auto try_candidate = [&](const ComplexMatrix& candidate) {
    Step s;
    s.x = normalise(p, candidate);
    s.logL = log_likelihood(p, expected(p, s.x));
    s.accepted = std::isfinite(s.logL) && s.logL >= logL;
    return s;
  };

  // Diluted RrhoR: X <- K X K with K = I + eps (grad - c I) / scale, where
  // c = Tr(grad X) keeps the trace direction neutral. eps = 1 is plain RrhoR
  // for complete measurement sets; the line search guarantees monotonicity.
  auto rrr_step = [&] {
    const auto mu = expected(p, x);
    ComplexMatrix direction = gradient(p, mu);
    if (p.unitTrace) direction -= (direction * x).trace().real() * eye;
    direction /= p.scale;
    double eps = dilution;
    for (int halving = 0; halving < 60; ++halving, eps *= 0.5) {
      const ComplexMatrix k = eye + eps * direction;
      Step s = try_candidate(k * x * k);
      if (s.accepted) {
        dilution = std::min(eps * 2.0, 1e4);
        return s;
      }
    }
    return Step{};
  };

  // Gradient ascent on the Cholesky factor T of X = T^dagger T.
  auto gradient_step = [&] {
    const auto mu = expected(p, x);
    ComplexMatrix g = gradient(p, mu);
    if (p.unitTrace) g -= (g * x).trace().real() * eye;
    ComplexMatrix direction = (factor * g).triangularView<Eigen::Lower>();
    const double dn = direction.norm();
    if (dn == 0.0) return Step{};
    double eta = gradientStep * factor.norm() / dn;
    for (int halving = 0; halving < 60; ++halving, eta *= 0.5) {
      const ComplexMatrix t = factor + eta * direction;
      Step s = try_candidate(t.adjoint() * t);
      if (s.accepted) {
        gradientStep = std::min(gradientStep * 2.0, 1.0);
        factor = t;
        if (p.unitTrace) factor /= std::sqrt((t.adjoint() * t).trace().real());
        return s;
      }
      gradientStep *= 0.5;
    }
    return Step{};
  };

  std::size_t it = 0;
  while (it < options.maxIterations) {
    Step s = gradientMode ? gradient_step() : rrr_step();
    if (!s.accepted) {
      if (!gradientMode) {
        gradientMode = true;
        result.usedGradientFallback = true;
        factor = lower_factor(x);
        continue;
      }
      // Neither update can improve the likelihood at double precision.
      result.converged = true;
      break;
    }
    ++it;
    const double improvement = (s.logL - logL) / std::max(1.0, std::abs(logL));
    x = s.x;
    logL = s.logL;
    if (options.observer) options.observer(it, logL);

    stalled = (improvement < options.stallTolerance) ? stalled + 1 : 0;
    if (!gradientMode && stalled >= options.stallWindow) {
      gradientMode = true;
      result.usedGradientFallback = true;
      factor = lower_factor(x);
    }
    if (improvement < options.relativeTolerance) {
      result.converged = true;
      break;
    }
  }

  // Refinement. The likelihood is concave in X, so Newton steps converge
  // quadratically when the optimum is interior. Near the PSD boundary the
  // Newton step is rejected and a damped Gauss-Newton step on a full factor
  // X = T^dagger T takes over. Every accepted step still raises log L.
  const Eigen::MatrixXd design = real_design(p);
  const Eigen::Index nc = design.cols();
  const Eigen::Index nk = p.unitTrace ? nc + 1 : nc;
  double damping = 1e-3;
  std::size_t quiet = 0;

  auto weights = [&](const Eigen::VectorXd& mu, Eigen::VectorXd& w, Eigen::VectorXd& curv) {
    w.resize(mu.size());
    curv.resize(mu.size());
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
      const double n = p.counts(k);
      w(k) = (n > 0.0 ? n / mu(k) : 0.0) - 1.0;
      curv(k) = n > 0.0 ? n / (mu(k) * mu(k)) : 0.0;
    }
  };

  auto newton_step = [&] {
    const Eigen::VectorXd c = to_coords(x);
    Eigen::VectorXd w;
    Eigen::VectorXd curv;
    weights(design * c, w, curv);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nk, nk);
    kkt.topLeftCorner(nc, nc) = design.transpose() * curv.asDiagonal() * design;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nk);
    rhs.head(nc) = design.transpose() * w;
    if (p.unitTrace) {
      kkt.block(0, nc, p.dim, 1).setOnes();
      kkt.block(nc, 0, 1, p.dim).setOnes();
    }
    const Eigen::VectorXd delta = kkt.fullPivLu().solve(rhs).head(nc);
    Step s;
    if (!delta.allFinite()) return s;
    double alpha = 1.0;
    // Only short backtracking: a boundary optimum is the factor step's job.
    for (int halving = 0; halving < 4 && !s.accepted; ++halving, alpha *= 0.5) {
      const ComplexMatrix candidate = from_coords(c + alpha * delta, p.dim);
      if (!is_psd(candidate)) continue;
      s = try_candidate(candidate);
    }
    return s;
  };

  auto factor_step = [&] {
    const ComplexMatrix t = factor_of(x);
    const Eigen::MatrixXd jac = factor_jacobian(p, t);
    Eigen::VectorXd w;
    Eigen::VectorXd curv;
    weights(expected(p, x), w, curv);
    const Eigen::MatrixXd h = jac.transpose() * curv.asDiagonal() * jac;
    const Eigen::VectorXd g = jac.transpose() * w;
    const double level = std::max(h.diagonal().maxCoeff(), 1e-300);
    const Eigen::Index d2 = p.dim * p.dim;
    Step s;
    for (int attempt = 0; attempt < 40 && !s.accepted; ++attempt) {
      Eigen::MatrixXd damped = h;
      damped.diagonal().array() += damping * level;
      const Eigen::VectorXd delta = damped.ldlt().solve(g);
      if (delta.allFinite()) {
        ComplexMatrix dt(p.dim, p.dim);
        for (Eigen::Index r = 0; r < p.dim; ++r)
          for (Eigen::Index c = 0; c < p.dim; ++c)
            dt(r, c) = Complex(delta(r * p.dim + c), delta(d2 + r * p.dim + c));
        const ComplexMatrix tn = t + dt;
        s = try_candidate(tn.adjoint() * tn);
      }
      damping = s.accepted ? std::max(damping / 3.0, 1e-12) : damping * 4.0;
    }
    return s;
  };

  while (it < options.maxIterations) {
    Step s = newton_step();
    if (!s.accepted) s = factor_step();
    if (!s.accepted) break;
    ++it;
    const double improvement = (s.logL - logL) / std::max(1.0, std::abs(logL));
    x = s.x;
    logL = s.logL;
    if (options.observer) options.observer(it, logL);
    // Damped steps can be small while still far from the optimum, so
    // require a few quiet steps in a row.
    quiet = improvement < options.relativeTolerance ? quiet + 1 : 0;
    if (quiet >= 3) {
      result.converged = true;
      break;
    }
  }

  result.x = normalise(p, x);
  result.logLikelihood = logL;
  result.iterations = it;
  return result;
}

DensityMatrixEstimate qst_mle(const std::vector<CountRecord>& counts,
                              const MleOptions& options) {
  PoissonProblem problem;
  problem.unitTrace = true;
  for (const auto& c : counts) {
    problem.functionals.push_back(c.exposure * c.setting.projector);
    problem.counts.push_back(c.count);
  }
  const auto r = maximize_likelihood(problem, options);
  return DensityMatrixEstimate{r.x, r.logLikelihood, r.iterations, r.converged};
}

ComplexMatrix linear_inversion(const std::vector<CountRecord>& counts) {
  if (counts.empty()) {
    throw Error(ErrorKind::NotInformationallyComplete, "no counts");
  }
  const Eigen::Index d = counts.front().setting.projector.rows();
  ComplexMatrix a(static_cast<Eigen::Index>(counts.size()), d * d);
  ComplexVector b(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    a.row(row) = vec_row_major(counts[k].setting.projector).conjugate().transpose();
    b(row) = counts[k].exposure > 0.0 ? counts[k].count / counts[k].exposure : 0.0;
  }
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> solver(a);
  solver.setThreshold(1e-10);
  if (solver.rank() < d * d) {
    throw Error(ErrorKind::NotInformationallyComplete, "settings do not span the state space");
  }
  const ComplexVector x = solver.solve(b);
  ComplexMatrix rho = hermitian_part(
      unvec_row_major(x, static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
  return rho / rho.trace().real();
}

// ---------------------------------------------------------------------------
// Process tomography

std::vector<std::string> pauli_labels(std::size_t nQubits) {
  static constexpr char kNames[] = "IXYZ";
  std::vector<std::string> labels{""};
  for (std::size_t q = 0; q < nQubits; ++q) {
    std::vector<std::string> next;
    for (const auto& prefix : labels)
      for (int b = 0; b < 4; ++b) next.push_back(prefix + kNames[b]);
    labels = std::move(next);
  }
  return labels;
}

std::vector<ComplexMatrix> pauli_basis(std::size_t nQubits) {
  std::vector<ComplexMatrix> out;
  for (const auto& label : pauli_labels(nQubits)) {
    std::vector<ComplexMatrix> factors;
    for (char c : label) {
      factors.push_back(pauli::by_index(static_cast<int>(std::string("IXYZ").find(c))));
    }
    out.push_back(tensor_product(factors));
  }
  return out;
}

namespace {

std::size_t qubits_for_dimension(Eigen::Index dim) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || n == 0) {
    throw Error(ErrorKind::DimensionMismatch, "dimension is not a power of two");
  }
  return n;
}

}  // namespace

ProcessMatrix ideal_process(const ComplexMatrix& op) {
  require_valid(op, "process operator");
  const std::size_t n = qubits_for_dimension(op.rows());
  const auto basis = pauli_basis(n);
  const double d = static_cast<double>(op.rows());
  ComplexVector a(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t m = 0; m < basis.size(); ++m) {
    a(static_cast<Eigen::Index>(m)) = hs_inner(basis[m], op) / d;
  }
  ProcessMatrix out;
  out.basisLabels = pauli_labels(n);
  out.rawTrace = a.squaredNorm();
  if (out.rawTrace == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "zero operator has no process matrix");
  }
  out.chi = a * a.adjoint() / out.rawTrace;
  return out;
}

ProcessMatrix project_to_process(const ComplexMatrix& chiRaw, std::size_t nQubits) {
  const auto eig = hermitian_eig(hermitian_part(chiRaw), std::numeric_limits<double>::infinity());
  Eigen::VectorXd clipped(static_cast<Eigen::Index>(eig.values.size()));
  for (std::size_t j = 0; j < eig.values.size(); ++j) {
    clipped(static_cast<Eigen::Index>(j)) = std::max(eig.values[j], 0.0);
  }
  ProcessMatrix out;
  out.basisLabels = pauli_labels(nQubits);
  out.rawTrace = hermitian_part(chiRaw).trace().real();
  ComplexMatrix chi = eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
  const double tr = chi.trace().real();
  if (!(tr > 0.0)) {
    throw Error(ErrorKind::NotPSD, "process matrix has no positive part");
  }
  out.chi = hermitian_part(chi / tr);
  return out;
}

std::vector<ComplexVector> qpt_input_states(std::size_t nQubits) {
  static constexpr char kInputs[] = "HVDR";
  std::vector<std::string> labels{""};
  for (std::size_t q = 0; q < nQubits; ++q) {
    std::vector<std::string> next;
    for (const auto& prefix : labels)
      for (int b = 0; b < 4; ++b) next.push_back(prefix + kInputs[b]);
    labels = std::move(next);
  }
  std::vector<ComplexVector> out;
  for (const auto& l : labels) out.push_back(product_ket(l));
  return out;
}

namespace {

void check_input_span(const std::vector<ComplexMatrix>& inputs) {
  if (inputs.empty()) throw Error(ErrorKind::InputSetDegenerate, "no input states");
  const Eigen::Index d = inputs.front().rows();
  ComplexMatrix span(d * d, static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    span.col(static_cast<Eigen::Index>(i)) = vec_row_major(inputs[i]);
  }
  const auto dec = svd(span);
  std::size_t rank = 0;
  for (double s : dec.s) rank += (s > 1e-10 * dec.s.front()) ? 1 : 0;
  if (rank < static_cast<std::size_t>(d * d)) {
    throw Error(ErrorKind::InputSetDegenerate,
                "inputs span " + std::to_string(rank) + " of " +
                    std::to_string(d * d) + " operator dimensions");
  }
}

}  // namespace

ProcessMatrix qpt(const std::vector<ComplexVector>& inputs,
                  const std::vector<ComplexMatrix>& outputs,
                  const std::vector<double>& weights) {
  if (inputs.size() != outputs.size() || inputs.size() != weights.size()) {
    throw Error(ErrorKind::InvalidArgument, "inputs, outputs and weights must pair up");
  }
  std::vector<ComplexMatrix> rhoIn;
  for (const auto& psi : inputs) rhoIn.push_back(projector(psi));
  check_input_span(rhoIn);

  const Eigen::Index d = rhoIn.front().rows();
  const std::size_t n = qubits_for_dimension(d);
  const auto basis = pauli_basis(n);
  const auto dd = static_cast<Eigen::Index>(basis.size());

  // Row (i, a, b) of the system holds (P_m rho_i P_n^dagger)[a, b] in column
  // m * dd + n.
  ComplexMatrix system(static_cast<Eigen::Index>(inputs.size()) * d * d, dd * dd);
  ComplexVector rhs(system.rows());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Eigen::Index base = static_cast<Eigen::Index>(i) * d * d;
    if (outputs[i].rows() != d || outputs[i].cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "output state has wrong dimension");
    }
    rhs.segment(base, d * d) = weights[i] * vec_row_major(outputs[i]);
    for (Eigen::Index m = 0; m < dd; ++m) {
      const ComplexMatrix left = basis[static_cast<std::size_t>(m)] * rhoIn[i];
      for (Eigen::Index k = 0; k < dd; ++k) {
        system.block(base, m * dd + k, d * d, 1) =
            vec_row_major(left * basis[static_cast<std::size_t>(k)].adjoint());
      }
    }
  }
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> solver(system);
  const ComplexVector chiVec = solver.solve(rhs);
  const ComplexMatrix chi = unvec_row_major(chiVec, static_cast<std::size_t>(dd),
                                            static_cast<std::size_t>(dd));
  return project_to_process(chi, n);
}

ProcessMatrix qpt(const std::vector<ComplexVector>& inputs,
                  const std::vector<DensityMatrixEstimate>& outputs,
                  const std::vector<double>& weights) {
  std::vector<ComplexMatrix> rho;
  rho.reserve(outputs.size());
  for (const auto& e : outputs) rho.push_back(e.rho);
  return qpt(inputs, rho, weights);
}

ProcessMatrix qpt_mle(const std::vector<ComplexVector>& inputs,
                      const std::vector<std::vector<CountRecord>>& counts,
                      const MleOptions& options) {
  if (inputs.size() != counts.size()) {
    throw Error(ErrorKind::InvalidArgument, "one count set per input state required");
  }
  std::vector<ComplexMatrix> rhoIn;
  for (const auto& psi : inputs) rhoIn.push_back(projector(psi));
  check_input_span(rhoIn);

  const std::size_t n = qubits_for_dimension(rhoIn.front().rows());
  const auto basis = pauli_basis(n);
  const auto dd = static_cast<Eigen::Index>(basis.size());

  // mu_{ik} = N Tr(Pi_k E(rho_i)) = Tr(chi F_{ik}) with
  // F_{ik}[n, m] = N Tr(P_n^dagger Pi_k P_m rho_i).
  PoissonProblem problem;
  problem.unitTrace = false;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<ComplexMatrix> right;  // P_m rho_i
    for (const auto& p : basis) right.push_back(p * rhoIn[i]);
    for (const auto& c : counts[i]) {
      ComplexMatrix f(dd, dd);
      for (Eigen::Index m = 0; m < dd; ++m) {
        const ComplexMatrix pm = c.setting.projector * right[static_cast<std::size_t>(m)];
        for (Eigen::Index k = 0; k < dd; ++k) {
          f(k, m) = c.exposure * hs_inner(basis[static_cast<std::size_t>(k)], pm);
        }
      }
      problem.functionals.push_back(hermitian_part(f));
      problem.counts.push_back(c.count);
    }
  }
  const auto r = maximize_likelihood(problem, options);
  return project_to_process(r.x, n);
}

std::vector<MonteCarloReport> monte_carlo(
    const std::function<MetricSample(Rng&, std::size_t)>& trial,
    std::size_t repeats, std::uint64_t seed) {
  if (repeats < 2) {
    throw Error(ErrorKind::InvalidArgument, "Monte-Carlo needs at least two repeats");
  }
  std::vector<MetricSample> samples(repeats);
  parallel_for(repeats, [&](std::size_t r) {
    Rng rng = make_stream(seed, r);
    samples[r] = trial(rng, r);
  });

  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  for (const auto& sample : samples) {
    for (const auto& [name, v] : sample) {
      auto [it, inserted] = values.try_emplace(name);
      if (inserted) order.push_back(name);
      it->second.push_back(v);
    }
  }
  std::vector<MonteCarloReport> out;
  for (const auto& name : order) {
    const auto& v = values[name];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    out.push_back(MonteCarloReport{name, mean, std::sqrt(var), v.size()});
  }
  return out;
}

}  // namespace entop
