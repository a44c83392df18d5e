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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilm/architectures.hpp"
#include "nilm/disaggregate.hpp"
#include "nilm/timeseries.hpp"

namespace nilm {

inline constexpr int kConfigSchemaVersion = 1;

enum class Profile { paper, desk };
std::string to_string(Profile profile);
Profile profile_from_string(const std::string& name);

struct HouseConfig {
  int id = 0;
  std::filesystem::path mains;
  std::map<std::string, std::filesystem::path> channels;  // appliance -> CSV
};

struct ApplianceConfig {
  std::string id;
  ActivationParams activation;
  std::size_t window_width = 0;
  std::size_t states = 2;  // baseline state count, off included
  std::set<int> train_houses;
  std::set<int> test_houses;
  std::optional<double> metric_on_threshold;  // watts; defaults to on_power_threshold

  double on_threshold() const {
    return metric_on_threshold.value_or(activation.on_power_threshold);
  }
};

struct OptimizerConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::optional<double> gradient_clip = 10.0;
  std::size_t plateau_patience = 0;
};

struct TrainConfig {
  std::optional<std::size_t> update_budget;  // overrides the per-kind default
  std::optional<std::size_t> batch_size;
  std::size_t std_sample_windows = 1000;
  std::size_t checkpoint_every = 0;
  std::size_t log_every = 10;
  std::size_t prefetch_depth = 2;
};

// How the desk profile shrinks the published setup.
struct DeskConfig {
  std::size_t window_divisor = 4;
  std::size_t min_window = 16;
  std::size_t budget_divisor = 100;
  std::size_t width_divisor = 16;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  Profile profile = Profile::paper;
  std::int64_t sample_period = kDefaultSamplePeriod;
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::filesystem::path output_dir;
  std::vector<HouseConfig> houses;
  std::vector<ApplianceConfig> appliances;
  std::vector<ArchitectureKind> architectures;
  OptimizerConfig optimizer;
  TrainConfig train;
  DisaggConfig disaggregation;
  DeskConfig desk;

  const ApplianceConfig& appliance(const std::string& id) const;
  const HouseConfig& house(int id) const;
  bool has_house(int id) const;

  // Profile-adjusted values.
  std::size_t window_width(const ApplianceConfig& appliance) const;
  std::size_t update_budget(ArchitectureKind kind) const;
  std::size_t batch_size(ArchitectureKind kind) const;
  // Desk runs divide the stride like the window, keeping the number of
  // windows covering each sample.
  DisaggConfig disagg_config() const;
  ArchitectureOptions architecture_options() const;

  // Throws ConfigError on inconsistent settings or DataError on a missing
  // file.
  void validate() const;

  nlohmann::json to_json() const;
  // Stable hash of to_json().
  std::string hash() const;
};

// Strict parse: unknown keys, a missing seed or a wrong schema version are
// ConfigErrors.
ExperimentConfig parse_config(const nlohmann::json& j,
                              const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Everything inference needs to reproduce the training-time scaling.
struct Manifest {
  std::string appliance_id;
  ArchitectureKind kind = ArchitectureKind::dae;
  std::size_t window_width = 0;
  double max_power = 0.0;
  double input_std = 1.0;
  std::uint64_t seed = 0;
  std::size_t std_sample_windows = 0;
  std::set<int> train_houses;
  std::set<int> test_houses;

  WindowSpec window_spec() const;
  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
  std::string hash() const;
};

void save_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace nilm
