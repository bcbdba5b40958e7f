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

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "entop/errors.hpp"
#include "entop/matrix_io.hpp"
#include "entop/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitZeroSuccess = 4;

int exit_code_for(entop::ErrorKind kind) {
  using entop::ErrorKind;
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parse:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::MismatchedParties:
    case ErrorKind::EmptyTermList:
    case ErrorKind::WrongDimension:
      return kExitConfig;
    case ErrorKind::ZeroSuccess:
    case ErrorKind::Annihilated:
      return kExitZeroSuccess;
    default:
      return kExitNumerical;
  }
}

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string format = "json";
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "scenario JSON file")->required();
  cmd->add_option("--seed", o.seed, "random seed (overrides the config)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled-operation simulator: decomposition, generation and tomography"};
  app.require_subcommand(1);
  Options opts;
  auto* decompose = app.add_subcommand("decompose", "operator-Schmidt decomposition");
  auto* generate = app.add_subcommand("generate", "post-select, simulate counts and run QST");
  auto* qpt = app.add_subcommand("qpt", "process tomography over the 16 input states");
  auto* multiparty = app.add_subcommand("multiparty", "three-party GHZ/W/Toffoli scenarios");
  for (auto* cmd : {decompose, generate, qpt, multiparty}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const entop::ScenarioConfig cfg = entop::load_scenario(opts.config);
    entop::RunContext ctx;
    ctx.outDir = opts.out;
    if (app.get_subcommands().front()->count("--seed") > 0) ctx.seedOverride = opts.seed;

    nlohmann::json report;
    if (decompose->parsed()) {
      report = entop::cmd_decompose(cfg, ctx);
    } else if (generate->parsed()) {
      report = entop::cmd_generate(cfg, ctx);
    } else if (qpt->parsed()) {
      report = entop::cmd_qpt(cfg, ctx);
    } else {
      report = entop::cmd_multiparty(cfg, ctx);
    }

    const bool csv = opts.format == "csv";
    const std::string text = csv ? entop::report_to_csv(report) : entop::report_to_json(report);
    std::filesystem::create_directories(ctx.outDir);
    const auto path = ctx.outDir / (csv ? "report.csv" : "report.json");
    entop::write_text_file(path.string(), text);
    std::cout << text;
    return kExitOk;
  } catch (const entop::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
