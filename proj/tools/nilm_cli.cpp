// Copyright 2026 The nilmkit Authors
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

#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "nilm/config.hpp"
#include "nilm/error.hpp"
#include "nilm/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kNumericFailure = 3;

std::set<int> test_houses(const nilm::ExperimentConfig& config,
                          const std::string& appliance) {
  std::set<int> out;
  for (const auto& a : config.appliances)
    if (appliance.empty() || a.id == appliance)
      out.insert(a.test_houses.begin(), a.test_houses.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural energy disaggregation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string profile;
  bool record_wallclock = false;
  bool quiet = false;
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--profile", profile, "paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  app.add_flag("--record-wallclock", record_wallclock,
               "Write real timings into logs and reports");
  app.add_flag("-q,--quiet", quiet, "Only print errors");

  auto* extract = app.add_subcommand("extract", "Extract activations from every channel");

  auto* preview = app.add_subcommand("synth-preview", "Write a few synthetic windows");
  std::string preview_appliance;
  std::size_t preview_windows = 8;
  preview->add_option("--appliance", preview_appliance)->required();
  preview->add_option("--windows", preview_windows);

  auto* train = app.add_subcommand("train", "Train a network for one appliance");
  std::string train_appliance;
  std::string train_kind;
  train->add_option("--appliance", train_appliance)->required();
  train->add_option("--kind", train_kind,
                    "lstm, dae or rectangles (default: every configured kind)");

  auto* disagg = app.add_subcommand("disaggregate", "Estimate appliance power");
  std::string disagg_appliance;
  std::string disagg_kind;
  std::string disagg_baseline;
  std::optional<int> disagg_house;
  disagg->add_option("--appliance", disagg_appliance,
                     "Target appliance (baselines default to all)");
  auto* kind_opt = disagg->add_option("--kind", disagg_kind, "Trained network kind");
  auto* base_opt = disagg->add_option("--baseline", disagg_baseline, "co or fhmm")
                       ->check(CLI::IsMember({"co", "fhmm"}));
  kind_opt->excludes(base_opt);
  disagg->add_option("--house", disagg_house, "House id (default: test houses)");
  std::string disagg_checkpoint;
  disagg->add_option("--checkpoint", disagg_checkpoint,
                     "Checkpoint file (default: latest in the model directory)");

  auto* evaluate = app.add_subcommand("evaluate", "Score estimates against ground truth");
  std::optional<int> eval_house;
  evaluate->add_option("--house", eval_house, "House id (default: test houses)");

  auto* report = app.add_subcommand("report", "Combine per-house reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    nilm::ExperimentConfig config = nilm::load_config(config_path);
    if (seed) config.seed = *seed;
    if (!profile.empty()) config.profile = nilm::profile_from_string(profile);
    config.validate();

    nilm::RunOptions options;
    options.log = quiet ? nullptr : &std::cout;
    options.record_wallclock = record_wallclock;
    options.checkpoint = disagg_checkpoint;

    if (*extract) {
      nilm::cmd_extract(config, options);
    } else if (*preview) {
      nilm::cmd_synth_preview(config, preview_appliance, preview_windows, options);
    } else if (*train) {
      std::vector<nilm::ArchitectureKind> kinds = config.architectures;
      if (!train_kind.empty()) kinds = {nilm::architecture_from_string(train_kind)};
      for (auto kind : kinds) nilm::cmd_train(config, train_appliance, kind, options);
    } else if (*disagg) {
      if (disagg_kind.empty() && disagg_baseline.empty())
        throw nilm::ConfigError("disaggregate needs --kind or --baseline");
      const std::string algorithm = disagg_baseline.empty() ? disagg_kind : disagg_baseline;
      if (disagg_baseline.empty()) {
        nilm::architecture_from_string(disagg_kind);
        if (disagg_appliance.empty())
          throw nilm::ConfigError("--appliance is required with --kind");
      }
      const std::set<int> houses =
          disagg_house ? std::set<int>{*disagg_house} : test_houses(config, disagg_appliance);
      if (houses.empty()) throw nilm::ConfigError("no test houses to disaggregate");
      for (int h : houses)
        nilm::cmd_disaggregate(config, disagg_appliance, algorithm, h, options);
    } else if (*evaluate) {
      const std::set<int> houses =
          eval_house ? std::set<int>{*eval_house} : test_houses(config, "");
      if (houses.empty()) throw nilm::ConfigError("no test houses to evaluate");
      for (int h : houses) {
        const auto path = nilm::cmd_evaluate(config, h, options);
        if (!quiet) std::cout << "report written to " << path.string() << '\n';
      }
    } else if (*report) {
      const auto path = nilm::cmd_report(config, options);
      if (!quiet) std::cout << "report written to " << path.string() << '\n';
    }
  } catch (const nilm::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const nilm::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const nilm::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}
