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

#include "entop/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "entop/errors.hpp"
#include "entop/random.hpp"

namespace entop {

void TimeBinConfig::validate() const {
  if (armCount < 1) throw Error(ErrorKind::InvalidArgument, "armCount must be >= 1");
  if (!(armDelayStepNs > 0.0) || !(pulsePeriodNs > 0.0) ||
      !(coincidenceWindowNs > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "durations must be positive");
  }
  if (!(coincidenceWindowNs < armDelayStepNs)) {
    throw Error(ErrorKind::InvalidArgument,
                "coincidence window must be shorter than the arm delay step");
  }
}

ArmAmplitudes ArmAmplitudes::michelson(std::size_t parties) {
  ArmAmplitudes a;
  a.detector.assign(parties, {0.5, 0.5});
  a.returnPort.assign(parties, {0.5, -0.5});
  return a;
}

ArmAmplitudes ArmAmplitudes::balanced(std::size_t parties, std::size_t arms) {
  ArmAmplitudes a;
  const double amp = 1.0 / std::sqrt(static_cast<double>(arms));
  a.detector.assign(parties, std::vector<Complex>(arms, amp));
  return a;
}

PhaseNoiseModel PhaseNoiseModel::two_arm(const std::vector<double>& relativePhases,
                                         std::vector<double> sigma) {
  PhaseNoiseModel m;
  for (double phi : relativePhases) m.meanPhases.push_back({0.0, phi});
  m.sigma = std::move(sigma);
  return m;
}

double PhaseNoiseModel::totalRelativePhase() const {
  double total = 0.0;
  for (const auto& party : meanPhases) {
    if (party.size() >= 2) total += party[1] - party[0];
  }
  return total;
}

double PhaseNoiseModel::totalVariance() const {
  double v = 0.0;
  for (double s : sigma) v += s * s;
  return v;
}

std::vector<Outcome> enumerate_outcomes(const TimeBinConfig& cfg,
                                        std::size_t parties) {
  cfg.validate();
  if (parties == 0) throw Error(ErrorKind::InvalidArgument, "need at least one party");
  const std::size_t m = cfg.armCount;
  std::size_t total = 1;
  for (std::size_t j = 0; j < parties; ++j) total *= m;

  std::vector<Outcome> out;
  out.reserve(total);
  std::vector<std::size_t> arms(parties, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rest = n;
    for (std::size_t j = parties; j-- > 0;) {
      arms[j] = rest % m;
      rest /= m;
    }
    Outcome o;
    o.arms = arms;
    o.coincident = true;
    for (std::size_t j = 1; j < parties; ++j) {
      o.signature.push_back(static_cast<int>(arms[j]) - static_cast<int>(arms[0]));
    }
    for (std::size_t a = 0; a < parties && o.coincident; ++a) {
      for (std::size_t b = a + 1; b < parties; ++b) {
        const double dt = std::abs(static_cast<double>(arms[a]) -
                                   static_cast<double>(arms[b])) * cfg.armDelayStepNs;
        if (dt > 0.5 * cfg.coincidenceWindowNs) {
          o.coincident = false;
          break;
        }
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

void check_layout(const TimeBinConfig& cfg, const ArmAmplitudes& amps,
                  const Branches& branches,
                  const std::vector<std::vector<double>>& armPhases,
                  const ComplexVector& psi) {
  cfg.validate();
  const std::size_t n = branches.size();
  const std::size_t m = cfg.armCount;
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "no parties");
  if (psi.size() != static_cast<Eigen::Index>(std::size_t{1} << n)) {
    throw Error(ErrorKind::DimensionMismatch, "input state dimension is not 2^N");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "input state is not normalised");
  }
  auto check_table = [&](const auto& table, const char* what, bool optional) {
    if (optional && table.empty()) return;
    if (table.size() != n) {
      throw Error(ErrorKind::MismatchedParties,
                  std::string(what) + " must list every party");
    }
    for (const auto& row : table) {
      if (row.size() != m) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + " must give one entry per arm");
      }
    }
  };
  check_table(branches, "branches", false);
  check_table(amps.detector, "detector amplitudes", false);
  check_table(amps.returnPort, "return-port amplitudes", true);
  check_table(armPhases, "arm phases", true);
  for (const auto& party : branches) {
    for (const auto& op : party) {
      if (op.matrix.rows() != 2 || op.matrix.cols() != 2) {
        throw Error(ErrorKind::InvalidArgument, "branch operators must be 2x2");
      }
    }
  }
}

double arm_phase(const std::vector<std::vector<double>>& armPhases,
                 std::size_t party, std::size_t arm) {
  return armPhases.empty() ? 0.0 : armPhases[party][arm];
}

}  // namespace

DetectionMass detection_mass(const TimeBinConfig& cfg,
                             const ArmAmplitudes& amps,
                             const Branches& branches,
                             const std::vector<std::vector<double>>& armPhases,
                             const ComplexVector& psi) {
  check_layout(cfg, amps, branches, armPhases, psi);
  const std::size_t n = branches.size();
  const auto outcomes = enumerate_outcomes(cfg, n);

  // (x)_j O_{j, arms_j} |psi> with the arm phases folded in.
  std::vector<ComplexVector> actions;
  actions.reserve(outcomes.size());
  std::vector<ComplexMatrix> factors(n);
  for (const auto& o : outcomes) {
    double phase = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      factors[j] = branches[j][o.arms[j]].matrix;
      phase += arm_phase(armPhases, j, o.arms[j]);
    }
    actions.push_back(std::polar(1.0, phase) * (tensor_product(factors) * psi));
  }

  const std::size_t ports = amps.returnPort.empty() ? 1 : 2;
  std::size_t portTuples = 1;
  for (std::size_t j = 0; j < n; ++j) portTuples *= ports;

  const auto dim = psi.size();
  const std::vector<int> zeroClass(n - 1, 0);
  DetectionMass mass;
  mass.coincident = ComplexMatrix::Zero(dim, dim);

  for (std::size_t p = 0; p < portTuples; ++p) {
    std::vector<std::size_t> port(n, 0);
    std::size_t rest = p;
    for (std::size_t j = n; j-- > 0;) {
      port[j] = rest % ports;
      rest /= ports;
    }
    const bool detected = (p == 0);

    // Outcomes that share a delay signature arrive together and add coherently.
    std::map<std::vector<int>, ComplexVector> classes;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      const auto& o = outcomes[t];
      Complex amp = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& table = port[j] == 0 ? amps.detector : amps.returnPort;
        amp *= table[j][o.arms[j]];
      }
      const auto& key = o.coincident ? zeroClass : o.signature;
      auto [it, inserted] = classes.try_emplace(key, ComplexVector::Zero(dim));
      it->second += amp * actions[t];
    }
    for (const auto& [key, v] : classes) {
      const double prob = v.squaredNorm();
      if (detected) {
        mass.breakdown[key] += prob;
        if (key == zeroClass) mass.coincident += v * v.adjoint();
      } else {
        mass.lossProbability += prob;
      }
    }
  }
  return mass;
}

PostSelectionResult to_result(const DetectionMass& mass) {
  const double success = mass.coincident.trace().real();
  if (!(success >= 1e-14)) {
    throw Error(ErrorKind::ZeroSuccess, "post-selection never fires for this input");
  }
  PostSelectionResult r;
  r.state = hermitian_part(mass.coincident / success);
  r.successProbability = success;
  r.outcomeBreakdown = mass.breakdown;
  r.lossProbability = mass.lossProbability;
  return r;
}

PostSelectionResult postselect(const TimeBinConfig& cfg,
                               const ArmAmplitudes& amps,
                               const Branches& branches,
                               const PhaseNoiseModel& phases,
                               const ComplexVector& psi) {
  for (double s : phases.sigma) {
    if (s != 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "postselect is noiseless; use postselect_noisy for sigma > 0");
    }
  }
  return to_result(detection_mass(cfg, amps, branches, phases.meanPhases, psi));
}

namespace {

DetectionMass weighted_sum(const std::vector<DetectionMass>& samples,
                           const std::vector<double>& weights) {
  DetectionMass out;
  out.coincident = ComplexMatrix::Zero(samples.front().coincident.rows(),
                                       samples.front().coincident.cols());
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const double w = weights[n];
    out.coincident += w * samples[n].coincident;
    out.lossProbability += w * samples[n].lossProbability;
    for (const auto& [key, p] : samples[n].breakdown) out.breakdown[key] += w * p;
  }
  return out;
}

}  // namespace

DetectionMass apply_phase_noise(const PhaseScan& scan, std::size_t harmonics,
                                const PhaseNoiseModel& noise,
                                const NoiseOptions& options) {
  for (double s : noise.sigma) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "sigma must be finite and non-negative");
    }
  }
  const double variance = noise.totalVariance();
  if (variance == 0.0) return scan(0.0);

  if (options.analytic) {
    // A degree-H trigonometric polynomial is fixed by 2H+1 equispaced
    // samples; averaging over a Gaussian offset damps harmonic h by
    // exp(-h^2 var / 2).
    const std::size_t k = 2 * harmonics + 1;
    std::vector<DetectionMass> samples;
    std::vector<double> weights;
    for (std::size_t n = 0; n < k; ++n) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(n) /
                           static_cast<double>(k);
      double w = 1.0;
      for (std::size_t h = 1; h <= harmonics; ++h) {
        const double hd = static_cast<double>(h);
        w += 2.0 * std::cos(hd * theta) * std::exp(-0.5 * hd * hd * variance);
      }
      samples.push_back(scan(theta));
      weights.push_back(w / static_cast<double>(k));
    }
    return weighted_sum(samples, weights);
  }

  if (options.shots == 0) {
    throw Error(ErrorKind::InvalidArgument, "sampled phase noise needs shots >= 1");
  }
  Rng rng = make_stream(options.seed, 0);
  std::vector<std::normal_distribution<double>> sources;
  for (double s : noise.sigma) sources.emplace_back(0.0, s);
  std::vector<DetectionMass> samples;
  samples.reserve(options.shots);
  for (std::size_t shot = 0; shot < options.shots; ++shot) {
    double theta = 0.0;
    for (auto& d : sources) theta += d(rng);
    samples.push_back(scan(theta));
  }
  return weighted_sum(samples, std::vector<double>(options.shots,
                                                   1.0 / static_cast<double>(options.shots)));
}

PostSelectionResult postselect_noisy(const TimeBinConfig& cfg,
                                     const ArmAmplitudes& amps,
                                     const Branches& branches,
                                     const PhaseNoiseModel& noise,
                                     const ComplexVector& psi,
                                     const NoiseOptions& options) {
  check_layout(cfg, amps, branches, noise.meanPhases, psi);
  const std::size_t n = branches.size();
  const std::size_t m = cfg.armCount;
  PhaseScan scan = [&](double theta) {
    std::vector<std::vector<double>> phases = noise.meanPhases;
    if (phases.empty()) phases.assign(n, std::vector<double>(m, 0.0));
    for (std::size_t k = 0; k < m; ++k) {
      phases[0][k] += static_cast<double>(k) * theta;
    }
    return detection_mass(cfg, amps, branches, phases, psi);
  };
  return to_result(apply_phase_noise(scan, m - 1, noise, options));
}

TimeBinLayout layout_from_superposition(const BranchSuperposition& s) {
  TimeBinLayout layout;
  const std::size_t m = s.terms.size();
  layout.branches.assign(s.parties, {});
  layout.armPhases.assign(s.parties, std::vector<double>(m, 0.0));
  double largest = 0.0;
  for (const auto& t : s.terms) largest = std::max(largest, std::abs(t.coefficient));
  for (std::size_t k = 0; k < m; ++k) {
    const auto& term = s.terms[k];
    for (std::size_t j = 0; j < s.parties; ++j) {
      layout.branches[j].push_back(term.factors[j]);
    }
    layout.armPhases[0][k] = std::arg(term.coefficient);
    layout.armScale.push_back(largest > 0.0 ? std::abs(term.coefficient) / largest : 0.0);
  }
  return layout;
}

ArmAmplitudes scaled(ArmAmplitudes amps, const std::vector<double>& armScale) {
  if (amps.detector.empty()) return amps;
  auto apply = [&](std::vector<Complex>& row) {
    if (row.size() != armScale.size()) {
      throw Error(ErrorKind::DimensionMismatch, "arm scale does not match arm count");
    }
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= armScale[k];
  };
  apply(amps.detector[0]);
  if (!amps.returnPort.empty()) apply(amps.returnPort[0]);
  return amps;
}

BranchSuperposition coincident_superposition(
    const ArmAmplitudes& amps, const Branches& branches,
    const std::vector<std::vector<double>>& armPhases) {
  if (branches.empty() || amps.detector.size() != branches.size()) {
    throw Error(ErrorKind::MismatchedParties, "amplitudes and branches disagree");
  }
  const std::size_t n = branches.size();
  const std::size_t m = branches.front().size();
  std::vector<BranchTerm> terms;
  for (std::size_t k = 0; k < m; ++k) {
    BranchTerm term{1.0, {}};
    double phase = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      term.coefficient *= amps.detector[j].at(k);
      phase += arm_phase(armPhases, j, k);
      term.factors.push_back(branches[j].at(k));
    }
    term.coefficient *= std::polar(1.0, phase);
    terms.push_back(std::move(term));
  }
  return build_superposition(std::move(terms));
}

double waveplate_phase_control(double alpha) {
  const double quarter = std::numbers::pi / 4.0;
  const ComplexMatrix q = local::quarter_wave_plate(quarter).matrix;
  const ComplexMatrix composite = q * local::half_wave_plate(alpha).matrix * q;
  const double off = std::max(std::abs(composite(0, 1)), std::abs(composite(1, 0)));
  if (off > 1e-10) {
    throw Error(ErrorKind::NotDiagonal, "waveplate stack mixes H and V");
  }
  const double twoPi = 2.0 * std::numbers::pi;
  double phi = std::arg(composite(1, 1)) - std::arg(composite(0, 0));
  phi = std::fmod(phi, twoPi);
  if (phi < 0.0) phi += twoPi;
  if (phi >= twoPi) phi -= twoPi;
  return phi;
}

}  // namespace entop
