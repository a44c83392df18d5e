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
#include <string>
#include <vector>

#include "nilm/config.hpp"
#include "nilm/timeseries.hpp"

namespace nilm {

// An appliance that switches on for a random duration at a random power,
// then rests for a random gap.
struct SyntheticAppliance {
  std::string id;
  double power_min = 0.0;
  double power_max = 0.0;
  std::size_t length_min = 1;  // samples
  std::size_t length_max = 1;
  std::size_t gap_min = 1;
  std::size_t gap_max = 1;
  double jitter = 0.0;  // per-sample noise std while on, watts
  ActivationParams activation;
};

struct WorldOptions {
  std::size_t samples_per_house = 20000;
  std::int64_t sample_period = kDefaultSamplePeriod;
  std::int64_t start_time = 1'400'000'000;
  double base_load = 100.0;
  double noise_std = 10.0;
  std::vector<SyntheticAppliance> appliances;
};

// A 2000 W kettle lasting 3-5 samples plus two distractors: a ~600 W heater
// and a ~115 W fridge.
WorldOptions kettle_world();

struct SyntheticHouse {
  int id = 0;
  PowerSeries mains;
  std::map<std::string, PowerSeries> channels;
};

SyntheticHouse generate_house(const WorldOptions& options, int id,
                              std::uint64_t seed);

// Writes every house as `house_<id>/mains.csv` and `house_<id>/<appliance>.csv`
// under `dir`, plus a config.json using the given house roles for every
// appliance. Returns the config path.
std::filesystem::path write_world(const std::filesystem::path& dir,
                                  const WorldOptions& options,
                                  const std::vector<int>& train_houses,
                                  const std::vector<int>& test_houses,
                                  std::uint64_t seed);

}  // namespace nilm
