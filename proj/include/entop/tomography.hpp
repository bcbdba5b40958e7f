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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "entop/opalg.hpp"
#include "entop/random.hpp"

namespace entop {

/// A rank-one local projective measurement. Labels use one character per
/// qubit from H, V (sigma_z), D, A (sigma_x), R, L (sigma_y), qubit 0 first.
struct MeasurementSetting {
  std::string label;
  ComplexMatrix projector;
};

MeasurementSetting setting_from_label(const std::string& label);

/// All 6^n product settings, lexicographic in "HVDARL" with qubit 0 most
/// significant.
std::vector<MeasurementSetting> standard_settings(std::size_t nQubits);

/// Counts are real-valued so exact expectations can flow through noiseless
/// pipelines; Poisson draws are integral.
struct CountRecord {
  MeasurementSetting setting;
  double count = 0.0;
  double exposure = 0.0;  // pairs N per setting
};

/// Expected counts N * Tr(Pi rho), optionally Poisson-distributed.
std::vector<CountRecord> simulate_counts(const ComplexMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         double exposure, Rng& rng, bool poisson);
std::vector<CountRecord> simulate_counts(const ComplexMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         double exposure, std::uint64_t seed,
                                         bool poisson);

/// Parametric bootstrap draw: each count replaced by Poisson(count).
std::vector<CountRecord> resample_counts(const std::vector<CountRecord>& counts,
                                         Rng& rng);

struct MleOptions {
  double relativeTolerance = 1e-10;
  std::size_t maxIterations = 5000;
  /// Switch from diluted RrhoR to Cholesky gradient ascent once the relative
  /// improvement stays below stallTolerance for stallWindow iterations.
  std::size_t stallWindow = 50;
  double stallTolerance = 1e-12;
  /// Called with (iteration, log-likelihood) after every accepted step,
  /// starting with iteration 0 for the initial point.
  std::function<void(std::size_t, double)> observer;
};

/// Poisson likelihood over a PSD operator X: mu_k = Tr(A_k X) with Hermitian
/// PSD functionals A_k, log L = sum_k n_k log mu_k - mu_k.
struct PoissonProblem {
  std::vector<ComplexMatrix> functionals;
  std::vector<double> counts;
  bool unitTrace = true;  // constrain Tr X = 1; otherwise the scale is free
};

struct MleResult {
  ComplexMatrix x;
  double logLikelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool usedGradientFallback = false;
};

double poisson_log_likelihood(const PoissonProblem& problem, const ComplexMatrix& x);

/// Diluted RrhoR (with the gradient fallback) runs until the relative
/// improvement drops below relativeTolerance, then Newton steps in X and
/// damped Gauss-Newton steps on a factor of X polish the optimum. Throws
/// NotInformationallyComplete when the functionals do not span the Hermitian
/// operator space. Every accepted step is non-decreasing in log L.
MleResult maximize_likelihood(const PoissonProblem& problem,
                              const MleOptions& options = {});

struct DensityMatrixEstimate {
  ComplexMatrix rho;
  double logLikelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

DensityMatrixEstimate qst_mle(const std::vector<CountRecord>& counts,
                              const MleOptions& options = {});

/// Unconstrained least-squares inversion of p_k = Tr(Pi_k rho), hermitised
/// and trace-normalised; may have negative eigenvalues.
ComplexMatrix linear_inversion(const std::vector<CountRecord>& counts);

/// chi in the Pauli product basis, E(rho) = sum_mn chi_mn P_m rho P_n^dagger.
struct ProcessMatrix {
  ComplexMatrix chi;
  std::vector<std::string> basisLabels;
  /// Tr(chi) before normalisation; 1 for trace-preserving maps.
  double rawTrace = 1.0;
};

std::vector<std::string> pauli_labels(std::size_t nQubits);
std::vector<ComplexMatrix> pauli_basis(std::size_t nQubits);

/// chi_mn = a_m conj(a_n) with a_m = Tr(P_m O) / d, normalised to unit trace.
ProcessMatrix ideal_process(const ComplexMatrix& op);

/// Hermitise, clip negative eigenvalues, normalise the trace.
ProcessMatrix project_to_process(const ComplexMatrix& chiRaw, std::size_t nQubits);

/// {H, V, D, R}^(x)n product inputs.
std::vector<ComplexVector> qpt_input_states(std::size_t nQubits);

/// Least-squares chi from (unnormalised) outputs weight_i * rho_i, followed by
/// projection onto the PSD cone. Weights carry the survival probability of
/// each input; pass 1 for trace-preserving maps. Throws InputSetDegenerate if
/// the inputs do not span the operator space.
ProcessMatrix qpt(const std::vector<ComplexVector>& inputs,
                  const std::vector<DensityMatrixEstimate>& outputs,
                  const std::vector<double>& weights);
ProcessMatrix qpt(const std::vector<ComplexVector>& inputs,
                  const std::vector<ComplexMatrix>& outputs,
                  const std::vector<double>& weights);

/// Direct maximum-likelihood chi from the raw counts of every input, with a
/// free overall scale (post-selected maps need not preserve the trace).
ProcessMatrix qpt_mle(const std::vector<ComplexVector>& inputs,
                      const std::vector<std::vector<CountRecord>>& counts,
                      const MleOptions& options = {});

struct MonteCarloReport {
  std::string metricName;
  double mean = 0.0;
  double std = 0.0;  // one sample standard deviation
  std::size_t repeats = 0;
};

using MetricSample = std::vector<std::pair<std::string, double>>;

/// Runs trial(rng, r) for r in [0, repeats) on independent sub-streams of
/// `seed` and aggregates every named metric in trial order. Requires
/// repeats >= 2.
std::vector<MonteCarloReport> monte_carlo(
    const std::function<MetricSample(Rng&, std::size_t)>& trial,
    std::size_t repeats, std::uint64_t seed);

}  // namespace entop
