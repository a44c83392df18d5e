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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nilm/baselines.hpp"
#include "nilm/config.hpp"
#include "nilm/datagen.hpp"
#include "nilm/trainer.hpp"

namespace nilm {

struct RunOptions {
  std::ostream* log = nullptr;  // progress and tables; null = silent
  // Writes real timings into loss logs and run reports. Off by default so
  // that reruns produce byte-identical files.
  bool record_wallclock = false;
  // Network checkpoint for disaggregate; empty = highest step in the model
  // directory.
  std::filesystem::path checkpoint;
};

// Seed for one purpose, derived from the experiment seed and string tags.
std::uint64_t derive_seed(std::uint64_t seed, const std::vector<std::string>& tags);

// Activations of every configured channel, offsets relative to the channel's
// own grid.
struct ChannelActivations {
  std::int64_t channel_start = 0;
  std::size_t channel_samples = 0;
  std::vector<Activation> activations;
};
using ActivationStore = std::map<std::string, std::map<int, ChannelActivations>>;

void save_activation_store(const std::filesystem::path& path,
                           const ActivationStore& store);
ActivationStore load_activation_store(const std::filesystem::path& path);

// Output locations, all under the config's output directory.
struct Layout {
  std::filesystem::path root;
  std::filesystem::path activations() const { return root / "activations.json"; }
  std::filesystem::path preview(const std::string& appliance) const;
  std::filesystem::path model_dir(const std::string& appliance,
                                  const std::string& kind) const;
  std::filesystem::path baseline_models() const;
  std::filesystem::path estimate(int house, const std::string& appliance,
                                 const std::string& algorithm) const;
  std::filesystem::path run_report(int house, const std::string& appliance,
                                   const std::string& algorithm) const;
  std::filesystem::path house_report(int house) const;
  std::filesystem::path report_json() const { return root / "report.json"; }
  std::filesystem::path report_csv() const { return root / "report.csv"; }
};
Layout layout_for(const ExperimentConfig& config);

// `<model_dir>/<appliance>_<kind>_<step>.cbor`
std::filesystem::path checkpoint_path(const std::filesystem::path& model_dir,
                                      const std::string& appliance,
                                      const std::string& kind, std::size_t step);
std::filesystem::path latest_checkpoint(const std::filesystem::path& model_dir,
                                        const std::string& appliance,
                                        const std::string& kind);

// Algorithm names accepted by disaggregate and evaluate.
const std::vector<std::string>& algorithm_names();

// Houses in config order, appliances in config order. Missing channels are
// reported as -1.
struct ExtractSummary {
  std::vector<int> houses;
  std::vector<std::string> appliances;
  std::vector<std::vector<long>> counts;  // [house][appliance]
};

ExtractSummary cmd_extract(const ExperimentConfig& config,
                           const RunOptions& options);

void cmd_synth_preview(const ExperimentConfig& config,
                       const std::string& appliance, std::size_t windows,
                       const RunOptions& options);

struct TrainOutcome {
  std::filesystem::path model_dir;
  TrainResult result;
};
// Throws NumericError after saving the last finite parameters when training
// diverges.
TrainOutcome cmd_train(const ExperimentConfig& config,
                       const std::string& appliance, ArchitectureKind kind,
                       const RunOptions& options);

// `algorithm` is an architecture name or "co"/"fhmm". Baselines write an
// estimate for every configured appliance. Returns the estimate paths.
std::vector<std::filesystem::path> cmd_disaggregate(
    const ExperimentConfig& config, const std::string& appliance,
    const std::string& algorithm, int house, const RunOptions& options);

// Scores every estimate present for the house.
std::filesystem::path cmd_evaluate(const ExperimentConfig& config, int house,
                                   const RunOptions& options);

// Combines the per-house reports of all configured houses that have one.
std::filesystem::path cmd_report(const ExperimentConfig& config,
                                 const RunOptions& options);

// Baseline state models fitted on the training houses' activations.
std::vector<ApplianceStateModel> fit_baseline_models(
    const ExperimentConfig& config, const ActivationStore& store,
    std::vector<std::string>* warnings = nullptr);

// Aggregate of one house plus the target appliance's activations placed on
// the aggregate's grid.
HouseData house_data(const ExperimentConfig& config, const ActivationStore& store,
                     const std::string& appliance, int house);

}  // namespace nilm
