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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entop/interferometer.hpp"
#include "entop/operators.hpp"

namespace entop {

struct NoiseSpec {
  std::vector<double> sigma;  // one entry per independent source
  bool analytic = true;
  std::size_t shots = 1000;
  /// When set, sigma is replaced by a single source found by bisection so
  /// that the named metric (averaged over the phi grid) hits the target.
  std::optional<std::string> calibrateMetric;
  double calibrateTarget = 0.0;
};

struct ScenarioConfig {
  std::string name;
  std::string operatorText;  // empty when built from "branches"
  BranchSuperposition op;
  std::string inputText;
  ComplexVector input;
  std::vector<double> phi{0.0};
  TimeBinConfig timing;
  std::string amplitudeMode = "auto";  // auto | michelson | balanced | custom
  std::vector<std::vector<Complex>> customAmplitudes;
  NoiseSpec noise;
  double counts = 1e4;
  bool exactCounts = false;
  std::size_t repeats = 100;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs{"density", "counts", "chi"};
  std::optional<std::string> target;  // multiparty reference state
  bool truthTable = false;
  nlohmann::json raw;

  bool wants(const std::string& artifact) const;
  /// True when any stage draws random numbers.
  bool stochastic() const;
};

/// Throws Error(Config) or ParseError on malformed input.
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

struct RunContext {
  std::filesystem::path outDir = ".";
  std::optional<std::uint64_t> seedOverride;
};

nlohmann::json cmd_decompose(const ScenarioConfig& cfg, const RunContext& ctx);
nlohmann::json cmd_generate(const ScenarioConfig& cfg, const RunContext& ctx);
nlohmann::json cmd_qpt(const ScenarioConfig& cfg, const RunContext& ctx);
nlohmann::json cmd_multiparty(const ScenarioConfig& cfg, const RunContext& ctx);

/// Rounds every floating-point leaf to 12 significant digits.
nlohmann::json round_numbers(const nlohmann::json& j);
double round12(double v);

std::string report_to_json(const nlohmann::json& report);
/// Flattened "key,value" rows keyed by JSON pointer.
std::string report_to_csv(const nlohmann::json& report);

}  // namespace entop
