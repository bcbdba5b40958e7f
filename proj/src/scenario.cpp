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

#include "entop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "entop/errors.hpp"
#include "entop/matrix_io.hpp"
#include "entop/metrics.hpp"
#include "entop/opspec.hpp"
#include "entop/random.hpp"
#include "entop/tomography.hpp"

namespace entop {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorKind::Config, message);
}

Complex complex_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_string()) return parse_complex_expression(v.get<std::string>());
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  config_error(where + ": expected a number, an expression string or [re, im]");
}

double real_from_json(const json& v, const std::string& where) {
  const Complex c = complex_from_json(v, where);
  if (std::abs(c.imag()) > 1e-12) config_error(where + ": value must be real");
  if (!std::isfinite(c.real())) config_error(where + ": value must be finite");
  return c.real();
}

std::vector<double> real_list(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      out.push_back(real_from_json(v[k], where + "[" + std::to_string(k) + "]"));
    }
  } else {
    out.push_back(real_from_json(v, where));
  }
  return out;
}

std::size_t positive_integer(const json& v, const std::string& where, std::size_t minimum) {
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum)) {
    config_error(where + ": expected an integer >= " + std::to_string(minimum));
  }
  return v.get<std::size_t>();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      config_error(where + ": unknown key '" + item.key() + "'");
    }
  }
}

LocalOperator factor_from_token(const std::string& token) {
  const auto single = parse_operator_spec("[" + token + "]");
  if (single.parties != 1 || single.terms.size() != 1) {
    config_error("branch token '" + token + "' must name one local operator");
  }
  return single.terms.front().factors.front();
}

BranchSuperposition superposition_from_branches(const json& branches, const json* coefficients) {
  if (!branches.is_array() || branches.empty()) {
    config_error("branches must be a non-empty list of per-party token lists");
  }
  const std::size_t parties = branches.size();
  const std::size_t arms = branches[0].is_array() ? branches[0].size() : 0;
  if (arms == 0) config_error("branches[0] must list one token per arm");
  for (std::size_t j = 0; j < parties; ++j) {
    if (!branches[j].is_array() || branches[j].size() != arms) {
      throw Error(ErrorKind::MismatchedParties,
                  "every party must list " + std::to_string(arms) + " arm operators");
    }
  }
  std::vector<BranchTerm> terms(arms);
  for (std::size_t k = 0; k < arms; ++k) {
    terms[k].coefficient = 1.0;
    if (coefficients) {
      if (!coefficients->is_array() || coefficients->size() != arms) {
        config_error("coefficients must list one value per arm");
      }
      terms[k].coefficient = complex_from_json((*coefficients)[k], "coefficients");
    }
    for (std::size_t j = 0; j < parties; ++j) {
      if (!branches[j][k].is_string()) config_error("branch tokens must be strings");
      terms[k].factors.push_back(factor_from_token(branches[j][k].get<std::string>()));
    }
  }
  return build_superposition(std::move(terms));
}

ArmAmplitudes resolve_amplitudes(const ScenarioConfig& cfg) {
  const std::size_t n = cfg.op.parties;
  const std::size_t m = cfg.timing.armCount;
  if (cfg.amplitudeMode == "michelson" || (cfg.amplitudeMode == "auto" && m == 2)) {
    if (m != 2) config_error("Michelson amplitudes need exactly two arms");
    return ArmAmplitudes::michelson(n);
  }
  if (cfg.amplitudeMode == "balanced" || cfg.amplitudeMode == "auto") {
    return ArmAmplitudes::balanced(n, m);
  }
  ArmAmplitudes amps;
  amps.detector = cfg.customAmplitudes;
  return amps;
}

std::vector<std::vector<double>> phases_for(const TimeBinLayout& layout, double phi) {
  auto phases = layout.armPhases;
  for (std::size_t k = 0; k < phases[0].size(); ++k) {
    phases[0][k] += static_cast<double>(k) * phi;
  }
  return phases;
}

struct Point {
  PostSelectionResult post;
  ComplexVector ideal;
  BranchSuperposition realized;
};

Point simulate_point(const ScenarioConfig& cfg, const ComplexVector& psi, double phi,
                     const std::vector<double>& sigma, std::uint64_t noiseSeed,
                     bool forceAnalytic = false, bool needIdeal = true) {
  const TimeBinLayout layout = layout_from_superposition(cfg.op);
  const ArmAmplitudes amps = scaled(resolve_amplitudes(cfg), layout.armScale);
  const auto phases = phases_for(layout, phi);
  PhaseNoiseModel noise{phases, sigma};
  NoiseOptions options{forceAnalytic || cfg.noise.analytic, cfg.noise.shots, noiseSeed};
  Point p;
  p.post = postselect_noisy(cfg.timing, amps, layout.branches, noise, psi, options);
  p.realized = coincident_superposition(amps, layout.branches, phases);
  if (needIdeal) p.ideal = apply_to_state(p.realized, psi).state;
  return p;
}

std::vector<std::string> party_labels(std::size_t parties) {
  return polarization_labels(parties);
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json breakdown_json(const std::map<std::vector<int>, double>& breakdown) {
  json out = json::array();
  for (const auto& [signature, probability] : breakdown) {
    out.push_back({{"signature", signature}, {"probability", probability}});
  }
  return out;
}

json metric_json(double mean, std::optional<double> std) {
  json out{{"mean", mean}};
  if (std) out["std"] = *std;
  return out;
}

std::string phi_tag(std::size_t index) { return "phi" + std::to_string(index); }

std::uint64_t effective_seed(const ScenarioConfig& cfg, const RunContext& ctx) {
  if (ctx.seedOverride) return *ctx.seedOverride;
  if (cfg.seed) return *cfg.seed;
  if (cfg.stochastic()) config_error("a seed is required for stochastic scenarios");
  return 0;
}

void write_output(const RunContext& ctx, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(ctx.outDir);
  write_text_file((ctx.outDir / name).string(), text);
}

// Per-point seeds: point i owns stream_seed(seed, i); its noise draws use
// sub-stream 0 of that and its count draws use sub-stream 1.
std::uint64_t noise_seed(std::uint64_t seed, std::size_t point) {
  return stream_seed(stream_seed(seed, point), 0);
}
std::uint64_t counts_seed(std::uint64_t seed, std::size_t point) {
  return stream_seed(stream_seed(seed, point), 1);
}

// Bisection for the single-source sigma at which metric(sigma) = target,
// assuming metric decreases with sigma.
double bisect_sigma(const std::function<double(double)>& metric, double target) {
  double lo = 0.0;
  double hi = 4.0;
  if (metric(lo) < target || metric(hi) > target) {
    config_error("calibration target " + std::to_string(target) + " is out of reach");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (metric(mid) >= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double average_fidelity(const ScenarioConfig& cfg, const std::vector<double>& sigma) {
  double total = 0.0;
  for (double phi : cfg.phi) {
    const Point p = simulate_point(cfg, cfg.input, phi, sigma, 0, true);
    total += state_fidelity(p.post.state, p.ideal);
  }
  return total / static_cast<double>(cfg.phi.size());
}

struct ProcessData {
  std::vector<ComplexVector> inputs;
  std::vector<ComplexMatrix> outputs;  // unit trace, or I/d for blocked inputs
  std::vector<double> weights;         // success probability relative to the best input
  ProcessMatrix ideal;
};

ProcessData process_data(const ScenarioConfig& cfg, double phi,
                         const std::vector<double>& sigma, std::uint64_t noiseSeed,
                         bool forceAnalytic = false) {
  ProcessData data;
  data.inputs = qpt_input_states(cfg.op.parties);
  const auto d = static_cast<Eigen::Index>(cfg.op.dimension());
  for (std::size_t i = 0; i < data.inputs.size(); ++i) {
    try {
      const Point p = simulate_point(cfg, data.inputs[i], phi, sigma,
                                     stream_seed(noiseSeed, i), forceAnalytic, false);
      data.outputs.push_back(p.post.state);
      data.weights.push_back(p.post.successProbability);
      if (data.ideal.chi.size() == 0) data.ideal = ideal_process(to_matrix(p.realized));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroSuccess) throw;
      data.outputs.push_back(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
      data.weights.push_back(0.0);
    }
  }
  const double best = *std::max_element(data.weights.begin(), data.weights.end());
  if (!(best > 0.0)) throw Error(ErrorKind::ZeroSuccess, "no QPT input survives post-selection");
  for (double& w : data.weights) w /= best;
  if (data.ideal.chi.size() == 0) {
    const TimeBinLayout layout = layout_from_superposition(cfg.op);
    const ArmAmplitudes amps = scaled(resolve_amplitudes(cfg), layout.armScale);
    data.ideal = ideal_process(
        to_matrix(coincident_superposition(amps, layout.branches, phases_for(layout, phi))));
  }
  return data;
}

double average_process_fidelity(const ScenarioConfig& cfg, const std::vector<double>& sigma) {
  double total = 0.0;
  for (double phi : cfg.phi) {
    const ProcessData data = process_data(cfg, phi, sigma, 0, true);
    total += process_fidelity(qpt(data.inputs, data.outputs, data.weights), data.ideal);
  }
  return total / static_cast<double>(cfg.phi.size());
}

std::vector<double> resolve_sigma(const ScenarioConfig& cfg, json& report) {
  if (!cfg.noise.calibrateMetric) return cfg.noise.sigma;
  const std::string& metric = *cfg.noise.calibrateMetric;
  std::function<double(double)> f;
  if (metric == "fidelity") {
    f = [&](double s) { return average_fidelity(cfg, {s}); };
  } else if (metric == "processFidelity") {
    f = [&](double s) { return average_process_fidelity(cfg, {s}); };
  } else {
    config_error("unknown calibration metric '" + metric + "'");
  }
  const double sigma = bisect_sigma(f, cfg.noise.calibrateTarget);
  report["calibration"] = {{"metric", metric},
                           {"target", cfg.noise.calibrateTarget},
                           {"sigma", sigma},
                           {"achieved", f(sigma)}};
  return {sigma};
}

json report_header(const std::string& command, const ScenarioConfig& cfg,
                   std::optional<std::uint64_t> seed) {
  json report;
  report["command"] = command;
  report["name"] = cfg.name;
  report["seed"] = seed ? json(*seed) : json(nullptr);
  report["scenario"] = cfg.raw;
  return report;
}

// Post-selection, count simulation and QST for one phase setting.
json run_state_point(const ScenarioConfig& cfg, const RunContext& ctx, std::size_t index,
                     const std::vector<double>& sigma, std::uint64_t seed,
                     const ComplexVector* reference, bool tomography) {
  const double phi = cfg.phi[index];
  const Point p = simulate_point(cfg, cfg.input, phi, sigma, noise_seed(seed, index));
  const ComplexVector& target = reference ? *reference : p.ideal;
  const std::size_t n = cfg.op.parties;

  json point;
  point["phi"] = phi;
  point["sigma"] = sigma;
  point["successProbability"] = p.post.successProbability;
  point["lossProbability"] = p.post.lossProbability;
  point["outcomeBreakdown"] = breakdown_json(p.post.outcomeBreakdown);
  json phys{{"fidelity", state_fidelity(p.post.state, target)}, {"purity", purity(p.post.state)}};
  if (n == 2) phys["concurrence"] = concurrence(p.post.state);
  point["postselected"] = phys;
  json files = json::object();
  const auto labels = party_labels(n);
  if (cfg.wants("ideal")) {
    const std::string name = "ideal_" + phi_tag(index) + ".csv";
    write_output(ctx, name, emit_matrix_csv(projector(target), labels));
    files["ideal"] = name;
  }

  if (tomography) {
    const auto settings = standard_settings(n);
    const auto expected = simulate_counts(p.post.state, settings, cfg.counts, 0, false);
    auto metrics_of = [&](const ComplexMatrix& rho) {
      MetricSample s{{"fidelity", state_fidelity(rho, target)}, {"purity", purity(rho)}};
      if (n == 2) s.emplace_back("concurrence", concurrence(rho));
      return s;
    };
    const std::uint64_t cseed = counts_seed(seed, index);
    std::vector<CountRecord> firstCounts = expected;
    if (!cfg.exactCounts) {
      Rng rng = make_stream(cseed, 0);
      firstCounts = resample_counts(expected, rng);
    }
    const DensityMatrixEstimate first = qst_mle(firstCounts);
    const std::size_t repeats = cfg.exactCounts ? 1 : cfg.repeats;
    json rec{{"repeats", repeats}, {"countsPerSetting", cfg.counts},
             {"exactCounts", cfg.exactCounts}, {"converged", first.converged}};
    if (repeats >= 2) {
      const auto reports = monte_carlo(
          [&](Rng& rng, std::size_t) {
            return metrics_of(qst_mle(resample_counts(expected, rng)).rho);
          },
          repeats, cseed);
      for (const auto& r : reports) rec[r.metricName] = metric_json(r.mean, r.std);
    } else {
      for (const auto& [name, v] : metrics_of(first.rho)) rec[name] = metric_json(v, std::nullopt);
    }
    point["reconstructed"] = rec;
    if (cfg.wants("density")) {
      const std::string name = "rho_" + phi_tag(index) + ".csv";
      write_output(ctx, name, emit_matrix_csv(first.rho, labels));
      files["density"] = name;
    }
    if (cfg.wants("counts")) {
      const std::string name = "counts_" + phi_tag(index) + ".csv";
      write_output(ctx, name, emit_counts_csv(firstCounts));
      files["counts"] = name;
    }
  }
  point["files"] = files;
  return point;
}

// Averages of per-point metric means (and of their standard deviations).
json summarize(const json& points, const std::string& section) {
  json summary = json::object();
  for (const std::string metric : {"fidelity", "concurrence", "purity", "processFidelity"}) {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
    bool hasStd = true;
    for (const auto& p : points) {
      if (!p.contains(section) || !p[section].contains(metric)) continue;
      const json& m = p[section][metric];
      mean += m.is_object() ? m["mean"].get<double>() : m.get<double>();
      if (m.is_object() && m.contains("std")) {
        std += m["std"].get<double>();
      } else {
        hasStd = false;
      }
      ++count;
    }
    if (count == 0) continue;
    const double c = static_cast<double>(count);
    summary[metric] = metric_json(mean / c, hasStd ? std::optional<double>(std / c) : std::nullopt);
  }
  return summary;
}

ComplexVector named_target(const std::string& target, std::size_t parties) {
  const std::size_t dim = std::size_t{1} << parties;
  if (target == "GHZ") {
    ComplexVector v = basis_ket(dim, 0) + basis_ket(dim, dim - 1);
    return v.normalized();
  }
  if (target == "W") {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < parties; ++j) v += basis_ket(dim, std::size_t{1} << j);
    return v.normalized();
  }
  const ComplexVector v = product_ket(target);
  if (static_cast<std::size_t>(v.size()) != dim) config_error("target has the wrong number of parties");
  return v;
}

}  // namespace

bool ScenarioConfig::wants(const std::string& artifact) const {
  return std::find(outputs.begin(), outputs.end(), artifact) != outputs.end();
}

bool ScenarioConfig::stochastic() const {
  bool noisy = false;
  for (double s : noise.sigma) noisy = noisy || s > 0.0;
  return !exactCounts || (noisy && !noise.analytic) ||
         (noise.calibrateMetric.has_value() && !noise.analytic);
}

ScenarioConfig parse_scenario(const json& j) {
  check_keys(j,
             {"name", "operator", "branches", "coefficients", "input", "phi", "interferometer",
              "noise", "counts", "exactCounts", "repeats", "seed", "outputs", "target",
              "truthTable"},
             "config");
  ScenarioConfig cfg;
  cfg.raw = j;
  cfg.name = j.value("name", std::string("scenario"));

  if (j.contains("operator") == j.contains("branches")) {
    config_error("give exactly one of 'operator' or 'branches'");
  }
  if (j.contains("operator")) {
    if (!j["operator"].is_string()) config_error("operator must be a string");
    if (j.contains("coefficients")) config_error("coefficients belong with 'branches'");
    cfg.operatorText = j["operator"].get<std::string>();
    cfg.op = parse_operator_spec(cfg.operatorText);
  } else {
    cfg.op = superposition_from_branches(
        j["branches"], j.contains("coefficients") ? &j["coefficients"] : nullptr);
  }
  const std::size_t parties = cfg.op.parties;

  if (j.contains("input")) {
    const json& in = j["input"];
    if (in.is_string()) {
      cfg.inputText = in.get<std::string>();
      cfg.input = product_ket(cfg.inputText);
    } else if (in.is_array()) {
      cfg.input.resize(static_cast<Eigen::Index>(in.size()));
      for (std::size_t k = 0; k < in.size(); ++k) {
        cfg.input(static_cast<Eigen::Index>(k)) = complex_from_json(in[k], "input");
      }
      if (!(cfg.input.norm() > 0.0)) config_error("input amplitudes are all zero");
      cfg.input.normalize();
    } else {
      config_error("input must be a ket token string or an amplitude list");
    }
  } else {
    cfg.inputText = std::string(parties, 'H');
    cfg.input = product_ket(cfg.inputText);
  }
  if (static_cast<std::size_t>(cfg.input.size()) != cfg.op.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "input dimension does not match the operator");
  }

  if (j.contains("phi")) {
    cfg.phi = real_list(j["phi"], "phi");
    if (cfg.phi.empty()) config_error("phi must not be empty");
  }

  cfg.timing.armCount = cfg.op.terms.size();
  if (j.contains("interferometer")) {
    const json& ij = j["interferometer"];
    check_keys(ij, {"armCount", "pulsePeriodNs", "coincidenceWindowNs", "armDelayStepNs", "amplitudes"},
               "interferometer");
    if (ij.contains("armCount") && positive_integer(ij["armCount"], "armCount", 1) != cfg.timing.armCount) {
      config_error("armCount must equal the number of operator terms (" +
                   std::to_string(cfg.timing.armCount) + ")");
    }
    if (ij.contains("pulsePeriodNs")) cfg.timing.pulsePeriodNs = real_from_json(ij["pulsePeriodNs"], "pulsePeriodNs");
    if (ij.contains("coincidenceWindowNs")) {
      cfg.timing.coincidenceWindowNs = real_from_json(ij["coincidenceWindowNs"], "coincidenceWindowNs");
    }
    if (ij.contains("armDelayStepNs")) cfg.timing.armDelayStepNs = real_from_json(ij["armDelayStepNs"], "armDelayStepNs");
    if (ij.contains("amplitudes")) {
      const json& a = ij["amplitudes"];
      if (a.is_string()) {
        cfg.amplitudeMode = a.get<std::string>();
        if (cfg.amplitudeMode != "michelson" && cfg.amplitudeMode != "balanced") {
          config_error("amplitudes must be 'michelson', 'balanced' or a per-party list");
        }
      } else if (a.is_array() && a.size() == parties) {
        cfg.amplitudeMode = "custom";
        for (std::size_t p = 0; p < parties; ++p) {
          if (!a[p].is_array() || a[p].size() != cfg.timing.armCount) {
            config_error("amplitudes[" + std::to_string(p) + "] needs one entry per arm");
          }
          std::vector<Complex> row;
          double mass = 0.0;
          for (const auto& v : a[p]) {
            row.push_back(complex_from_json(v, "amplitudes"));
            mass += std::norm(row.back());
          }
          if (mass > 1.0 + 1e-12) config_error("arm amplitudes of a party exceed unit mass");
          cfg.customAmplitudes.push_back(row);
        }
      } else {
        config_error("amplitudes must be 'michelson', 'balanced' or a per-party list");
      }
    }
  }
  try {
    cfg.timing.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (cfg.amplitudeMode == "michelson" && cfg.timing.armCount != 2) {
    config_error("Michelson amplitudes need exactly two arms");
  }

  if (j.contains("noise")) {
    const json& nj = j["noise"];
    check_keys(nj, {"sigma", "mode", "shots", "calibrate"}, "noise");
    if (nj.contains("sigma")) cfg.noise.sigma = real_list(nj["sigma"], "sigma");
    for (double s : cfg.noise.sigma) {
      if (s < 0.0) config_error("sigma must be non-negative");
    }
    const std::string mode = nj.value("mode", std::string("analytic"));
    if (mode != "analytic" && mode != "sampled") config_error("noise mode must be analytic or sampled");
    cfg.noise.analytic = mode == "analytic";
    if (nj.contains("shots")) cfg.noise.shots = positive_integer(nj["shots"], "shots", 1);
    if (nj.contains("calibrate")) {
      const json& cj = nj["calibrate"];
      check_keys(cj, {"metric", "target"}, "calibrate");
      if (!cj.contains("target")) config_error("calibrate needs a target");
      cfg.noise.calibrateMetric = cj.value("metric", std::string("fidelity"));
      cfg.noise.calibrateTarget = real_from_json(cj["target"], "calibrate.target");
    }
  }

  if (j.contains("counts")) {
    cfg.counts = real_from_json(j["counts"], "counts");
    if (!(cfg.counts > 0.0)) config_error("counts must be positive");
  }
  if (j.contains("exactCounts")) {
    if (!j["exactCounts"].is_boolean()) config_error("exactCounts must be a boolean");
    cfg.exactCounts = j["exactCounts"].get<bool>();
  }
  if (j.contains("repeats")) cfg.repeats = positive_integer(j["repeats"], "repeats", 1);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_error("seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) config_error("outputs must be a list");
    cfg.outputs.clear();
    for (const auto& o : j["outputs"]) {
      const std::string name = o.is_string() ? o.get<std::string>() : std::string();
      if (name != "density" && name != "counts" && name != "chi" && name != "ideal") {
        config_error("unknown output '" + name + "'");
      }
      cfg.outputs.push_back(name);
    }
  }
  if (j.contains("target")) {
    if (!j["target"].is_string()) config_error("target must be a string");
    cfg.target = j["target"].get<std::string>();
    named_target(*cfg.target, parties);
  }
  if (j.contains("truthTable")) {
    if (!j["truthTable"].is_boolean()) config_error("truthTable must be a boolean");
    cfg.truthTable = j["truthTable"].get<bool>();
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, path + ": " + e.what());
  }
  return parse_scenario(j);
}

json cmd_decompose(const ScenarioConfig& cfg, const RunContext&) {
  const ComplexMatrix o = to_matrix(cfg.op);
  const std::size_t dimA = 2;
  const std::size_t dimB = cfg.op.dimension() / 2;
  const auto dec = schmidt_decompose(o, dimA, dimB);
  const std::size_t rank = schmidt_number(dec);
  json report = report_header("decompose", cfg, std::nullopt);
  report["parties"] = cfg.op.parties;
  report["dimA"] = dimA;
  report["dimB"] = dimB;
  report["coefficients"] = dec.coefficients;
  report["schmidtNumber"] = rank;
  report["unitary"] = is_unitary(o);
  json factors = json::array();
  for (std::size_t k = 0; k < rank; ++k) {
    factors.push_back({{"coefficient", dec.coefficients[k]},
                       {"left", matrix_json(dec.leftFactors[k])},
                       {"right", matrix_json(dec.rightFactors[k])}});
  }
  report["factors"] = factors;
  return report;
}

json cmd_generate(const ScenarioConfig& cfg, const RunContext& ctx) {
  const auto seed = effective_seed(cfg, ctx);
  json report = report_header("generate", cfg, cfg.stochastic() ? std::optional(seed) : std::nullopt);
  const auto sigma = resolve_sigma(cfg, report);
  json points = json::array();
  for (std::size_t i = 0; i < cfg.phi.size(); ++i) {
    points.push_back(run_state_point(cfg, ctx, i, sigma, seed, nullptr, true));
  }
  report["points"] = points;
  report["summary"] = {{"postselected", summarize(points, "postselected")},
                       {"reconstructed", summarize(points, "reconstructed")}};
  return report;
}

json cmd_qpt(const ScenarioConfig& cfg, const RunContext& ctx) {
  const auto seed = effective_seed(cfg, ctx);
  json report = report_header("qpt", cfg, cfg.stochastic() ? std::optional(seed) : std::nullopt);
  const auto sigma = resolve_sigma(cfg, report);
  const std::size_t n = cfg.op.parties;
  const auto settings = standard_settings(n);
  const auto labels = pauli_labels(n);
  json points = json::array();
  for (std::size_t i = 0; i < cfg.phi.size(); ++i) {
    const ProcessData data = process_data(cfg, cfg.phi[i], sigma, noise_seed(seed, i));
    std::vector<std::vector<CountRecord>> expected;
    for (std::size_t k = 0; k < data.inputs.size(); ++k) {
      expected.push_back(
          simulate_counts(data.weights[k] * data.outputs[k], settings, cfg.counts, 0, false));
    }
    const ProcessMatrix linear = qpt(data.inputs, data.outputs, data.weights);

    const std::uint64_t cseed = counts_seed(seed, i);
    auto resample_all = [&](Rng& rng) {
      std::vector<std::vector<CountRecord>> draws;
      for (const auto& e : expected) draws.push_back(resample_counts(e, rng));
      return draws;
    };
    std::vector<std::vector<CountRecord>> firstCounts = expected;
    if (!cfg.exactCounts) {
      Rng rng = make_stream(cseed, 0);
      firstCounts = resample_all(rng);
    }
    const ProcessMatrix first = qpt_mle(data.inputs, firstCounts);
    const std::size_t repeats = cfg.exactCounts ? 1 : cfg.repeats;

    json point;
    point["phi"] = cfg.phi[i];
    point["sigma"] = sigma;
    point["inputWeights"] = data.weights;
    point["processFidelityLinear"] = process_fidelity(linear, data.ideal);
    json rec{{"repeats", repeats}, {"countsPerSetting", cfg.counts}, {"exactCounts", cfg.exactCounts}};
    if (repeats >= 2) {
      const auto reports = monte_carlo(
          [&](Rng& rng, std::size_t) {
            return MetricSample{
                {"processFidelity", process_fidelity(qpt_mle(data.inputs, resample_all(rng)), data.ideal)}};
          },
          repeats, cseed);
      rec["processFidelity"] = metric_json(reports.front().mean, reports.front().std);
    } else {
      rec["processFidelity"] = metric_json(process_fidelity(first, data.ideal), std::nullopt);
    }
    point["reconstructed"] = rec;
    json files = json::object();
    if (cfg.wants("chi")) {
      const std::string name = "chi_" + phi_tag(i) + ".csv";
      write_output(ctx, name, emit_matrix_csv(first.chi, labels));
      files["chi"] = name;
    }
    if (cfg.wants("ideal")) {
      const std::string name = "chi_ideal_" + phi_tag(i) + ".csv";
      write_output(ctx, name, emit_matrix_csv(data.ideal.chi, labels));
      files["ideal"] = name;
    }
    point["files"] = files;
    points.push_back(point);
  }
  report["points"] = points;
  report["summary"] = summarize(points, "reconstructed");
  return report;
}

json cmd_multiparty(const ScenarioConfig& cfg, const RunContext& ctx) {
  if (cfg.op.parties != 3) config_error("multiparty scenarios need exactly three parties");
  const bool tomography = cfg.raw.contains("counts");
  ScenarioConfig run = cfg;
  if (!tomography) run.exactCounts = true;
  const auto seed = effective_seed(run, ctx);
  json report = report_header("multiparty", cfg, run.stochastic() ? std::optional(seed) : std::nullopt);
  const auto sigma = resolve_sigma(run, report);

  std::optional<ComplexVector> reference;
  if (cfg.target) {
    reference = named_target(*cfg.target, 3);
    report["target"] = *cfg.target;
  }
  json points = json::array();
  for (std::size_t i = 0; i < cfg.phi.size(); ++i) {
    points.push_back(run_state_point(run, ctx, i, sigma, seed,
                                     reference ? &*reference : nullptr, tomography));
  }
  report["points"] = points;
  report["summary"] = {{"postselected", summarize(points, "postselected")}};
  if (tomography) report["summary"]["reconstructed"] = summarize(points, "reconstructed");

  if (cfg.truthTable) {
    const auto labels = polarization_labels(3);
    const ComplexMatrix o = to_matrix(cfg.op);
    json rows = json::array();
    std::set<std::string> seen;
    bool permutation = true;
    bool matches = true;
    for (std::size_t b = 0; b < labels.size(); ++b) {
      json row{{"input", labels[b]}};
      try {
        const Point p = simulate_point(cfg, basis_ket(8, b), cfg.phi.front(), {}, 0, true);
        Eigen::Index best = 0;
        p.post.state.diagonal().real().maxCoeff(&best);
        const double population = p.post.state(best, best).real();
        Eigen::Index expected = 0;
        (o * basis_ket(8, b)).cwiseAbs2().maxCoeff(&expected);
        row["output"] = labels[static_cast<std::size_t>(best)];
        row["probability"] = population;
        row["successProbability"] = p.post.successProbability;
        permutation = permutation && population > 1.0 - 1e-9 &&
                      seen.insert(labels[static_cast<std::size_t>(best)]).second;
        matches = matches && best == expected;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroSuccess) throw;
        row["output"] = nullptr;
        permutation = false;
        matches = false;
      }
      rows.push_back(row);
    }
    report["truthTable"] = {{"rows", rows}, {"isPermutation", permutation}, {"matchesOperator", matches}};
  }
  return report;
}

double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

json round_numbers(const json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = round_numbers(*it);
    return out;
  }
  return j;
}

std::string report_to_json(const json& report) {
  return round_numbers(report).dump(2) + "\n";
}

std::string report_to_csv(const json& report) {
  const json flat = round_numbers(report).flatten();
  std::string out = "key,value\n";
  for (const auto& item : flat.items()) {
    std::string value = item.value().dump();
    if (value.find(',') != std::string::npos || value.find('"') != std::string::npos) {
      std::string quoted = "\"";
      for (char c : value) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
      value = quoted + "\"";
    }
    out += item.key() + "," + value + "\n";
  }
  return out;
}

}  // namespace entop
