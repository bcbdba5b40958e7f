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
#include <map>
#include <vector>

#include "entop/operators.hpp"

namespace entop {

/// Timing of the unbalanced interferometers. Durations in nanoseconds; the
/// defaults are the pulsed-source apparatus numbers.
struct TimeBinConfig {
  std::size_t armCount = 2;
  double armDelayStepNs = 6.25;
  double pulsePeriodNs = 12.5;
  double coincidenceWindowNs = 3.0;

  /// Throws InvalidArgument unless all durations are positive, armCount >= 1
  /// and the coincidence window is shorter than one arm delay step.
  void validate() const;
};

/// Per-party, per-arm amplitudes of reaching the detector. `returnPort`,
/// when non-empty, holds the amplitudes of the second output of a Michelson
/// beam splitter (light sent back toward the source); it is what makes the
/// loss mass computable rather than inferred.
struct ArmAmplitudes {
  std::vector<std::vector<Complex>> detector;    // [party][arm]
  std::vector<std::vector<Complex>> returnPort;  // [party][arm] or empty

  /// Two-arm Michelson with a 50/50 splitter: 1/2 per arm toward the
  /// detector, (1/2, -1/2) back toward the source.
  static ArmAmplitudes michelson(std::size_t parties);
  /// Lossless balanced M-way splitter, 1/sqrt(M) per arm, no second port.
  static ArmAmplitudes balanced(std::size_t parties, std::size_t arms);
};

/// Interferometer phases and Gaussian phase noise. Arm k of party j carries
/// phase meanPhases[j][k]. Each entry of `sigma` is one independently locked
/// interferometer (one source for a shared interferometer, one per party
/// otherwise); a source drifting by delta shifts arm k by k * delta, and the
/// drifts of all sources add up in the coincident class.
struct PhaseNoiseModel {
  std::vector<std::vector<double>> meanPhases;  // [party][arm]
  std::vector<double> sigma;                     // [source], radians

  /// Two-arm layout: party j's second arm carries relativePhases[j].
  static PhaseNoiseModel two_arm(const std::vector<double>& relativePhases,
                                 std::vector<double> sigma = {});

  std::size_t sourceCount() const { return sigma.size(); }
  /// Sum of the party phase offsets (the total relative phase for M = 2).
  double totalRelativePhase() const;
  double totalVariance() const;
};

struct Outcome {
  std::vector<std::size_t> arms;  // arm index per party, 0-based
  std::vector<int> signature;     // arms[j] - arms[0] for j >= 1, in delay steps
  bool coincident = false;        // every pairwise delay inside the window
};

/// All M^N joint arm choices in lexicographic order (party 0 most
/// significant). A pair is coincident when |dt| <= coincidenceWindow / 2.
std::vector<Outcome> enumerate_outcomes(const TimeBinConfig& cfg,
                                        std::size_t parties);

using Branches = std::vector<std::vector<LocalOperator>>;  // [party][arm]

/// Unnormalised detection statistics for one phase setting.
struct DetectionMass {
  ComplexMatrix coincident;  // sum over the zero-delay class of v v^dagger
  std::map<std::vector<int>, double> breakdown;  // detector-port classes
  double lossProbability = 0.0;                  // any photon in a return port
};

struct PostSelectionResult {
  ComplexMatrix state;  // unit trace
  double successProbability = 0.0;
  std::map<std::vector<int>, double> outcomeBreakdown;  // includes class 0
  double lossProbability = 0.0;
};

DetectionMass detection_mass(const TimeBinConfig& cfg,
                             const ArmAmplitudes& amps,
                             const Branches& branches,
                             const std::vector<std::vector<double>>& armPhases,
                             const ComplexVector& psi);

/// Normalises the coincident class; throws ZeroSuccess below 1e-14.
PostSelectionResult to_result(const DetectionMass& mass);

/// Noiseless time-bin post-selection. The post-selected vector is
/// v = sum_k (prod_j amp_{j,k}) e^{i phi_k} ((x)_j O_{j,k}) |psi>.
/// Throws InvalidArgument if `phases` has non-zero sigma.
PostSelectionResult postselect(const TimeBinConfig& cfg,
                               const ArmAmplitudes& amps,
                               const Branches& branches,
                               const PhaseNoiseModel& phases,
                               const ComplexVector& psi);

/// Detection statistics as a function of a common phase offset theta that
/// shifts arm k by k * theta.
using PhaseScan = std::function<DetectionMass(double theta)>;

struct NoiseOptions {
  bool analytic = true;
  std::size_t shots = 1000;
  std::uint64_t seed = 0;
};

/// Averages a phase scan over the noise model. Analytic mode decomposes the
/// scan into its 2*harmonics+1 Fourier components (exact for scans that are
/// trigonometric polynomials of that degree) and damps harmonic h by
/// exp(-h^2 sigma_tot^2 / 2). Sampled mode averages `shots` scans with one
/// Gaussian draw per source per shot.
DetectionMass apply_phase_noise(const PhaseScan& scan, std::size_t harmonics,
                                const PhaseNoiseModel& noise,
                                const NoiseOptions& options);

/// postselect() followed by apply_phase_noise() over the model's sigma.
PostSelectionResult postselect_noisy(const TimeBinConfig& cfg,
                                     const ArmAmplitudes& amps,
                                     const Branches& branches,
                                     const PhaseNoiseModel& noise,
                                     const ComplexVector& psi,
                                     const NoiseOptions& options);

/// Maps a superposition onto interferometer arms: term k goes to arm k of
/// every party, arg(c_k) becomes party 0's arm-k phase, and |c_k| / max|c|
/// scales party 0's arm-k amplitude.
struct TimeBinLayout {
  Branches branches;
  std::vector<std::vector<double>> armPhases;
  std::vector<double> armScale;
};
TimeBinLayout layout_from_superposition(const BranchSuperposition& s);

/// Rescales party 0 detector (and return-port) amplitudes by layout.armScale.
ArmAmplitudes scaled(ArmAmplitudes amps, const std::vector<double>& armScale);

/// The normalised superposition realised by the zero-delay class.
BranchSuperposition coincident_superposition(
    const ArmAmplitudes& amps, const Branches& branches,
    const std::vector<std::vector<double>>& armPhases);

/// Relative phase (V relative to H) imparted by the QWP(pi/4) HWP(alpha)
/// QWP(pi/4) stack, reduced to [0, 2 pi). The stack equals
/// diag(e^{-2i alpha}, -e^{2i alpha}) up to a global phase, giving
/// 4 alpha + pi. Throws NotDiagonal if the composite mixes H and V.
double waveplate_phase_control(double alpha);

}  // namespace entop
