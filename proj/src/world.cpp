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

#include "nilm/world.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <json.hpp>

#include "nilm/error.hpp"
#include "nilm/hash.hpp"

namespace nilm {

namespace fs = std::filesystem;

WorldOptions kettle_world() {
  WorldOptions w;
  SyntheticAppliance kettle;
  kettle.id = "kettle";
  kettle.power_min = kettle.power_max = 2000.0;
  kettle.length_min = 3;
  kettle.length_max = 5;
  kettle.gap_min = 150;
  kettle.gap_max = 600;
  kettle.activation = {3100.0, 1000.0, 12.0, 0.0};

  SyntheticAppliance heater;
  heater.id = "heater";
  heater.power_min = 550.0;
  heater.power_max = 650.0;
  heater.length_min = 20;
  heater.length_max = 40;
  heater.gap_min = 100;
  heater.gap_max = 400;
  heater.jitter = 5.0;
  heater.activation = {1000.0, 300.0, 60.0, 12.0};

  SyntheticAppliance fridge;
  fridge.id = "fridge";
  fridge.power_min = 100.0;
  fridge.power_max = 130.0;
  fridge.length_min = 15;
  fridge.length_max = 30;
  fridge.gap_min = 20;
  fridge.gap_max = 60;
  fridge.jitter = 2.0;
  fridge.activation = {300.0, 50.0, 60.0, 12.0};

  w.appliances = {kettle, heater, fridge};
  return w;
}

SyntheticHouse generate_house(const WorldOptions& options, int id,
                              std::uint64_t seed) {
  const std::size_t n = options.samples_per_house;
  SyntheticHouse house;
  house.id = id;
  house.mains.start_time = options.start_time;
  house.mains.sample_period = options.sample_period;
  house.mains.values.assign(n, options.base_load);

  Rng rng(seed);
  for (const auto& app : options.appliances) {
    if (app.length_min == 0 || app.length_min > app.length_max ||
        app.gap_min > app.gap_max || app.power_min > app.power_max) {
      throw ConfigError("inconsistent synthetic appliance " + app.id);
    }
    PowerSeries channel{options.start_time, options.sample_period,
                        std::vector<double>(n, 0.0)};
    std::uniform_int_distribution<std::size_t> length(app.length_min, app.length_max);
    std::uniform_int_distribution<std::size_t> gap(app.gap_min, app.gap_max);
    std::uniform_real_distribution<double> power(app.power_min, app.power_max);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::size_t t = std::uniform_int_distribution<std::size_t>(0, app.gap_max)(rng);
    while (t < n) {
      const std::size_t len = length(rng);
      const double watts = power(rng);
      for (std::size_t i = t; i < std::min(n, t + len); ++i)
        channel.values[i] = std::max(0.0, watts + app.jitter * jitter(rng));
      t += len + gap(rng);
    }
    for (std::size_t i = 0; i < n; ++i) house.mains.values[i] += channel.values[i];
    house.channels[app.id] = std::move(channel);
  }
  std::normal_distribution<double> noise(0.0, options.noise_std);
  for (double& v : house.mains.values) v = std::max(0.0, v + noise(rng));
  return house;
}

fs::path write_world(const fs::path& dir, const WorldOptions& options,
                     const std::vector<int>& train_houses,
                     const std::vector<int>& test_houses, std::uint64_t seed) {
  fs::create_directories(dir);
  std::vector<int> ids = train_houses;
  ids.insert(ids.end(), test_houses.begin(), test_houses.end());

  nlohmann::json houses = nlohmann::json::array();
  for (int id : ids) {
    const auto house = generate_house(
        options, id, fnv1a64("world/" + std::to_string(seed) + "/" + std::to_string(id)));
    const std::string sub = "house_" + std::to_string(id);
    fs::create_directories(dir / sub);
    save_csv(dir / sub / "mains.csv", house.mains);
    nlohmann::json channels = nlohmann::json::object();
    for (const auto& [app, series] : house.channels) {
      save_csv(dir / sub / (app + ".csv"), series);
      channels[app] = sub + "/" + app + ".csv";
    }
    houses.push_back({{"id", id}, {"mains", sub + "/mains.csv"}, {"channels", channels}});
  }

  nlohmann::json apps = nlohmann::json::array();
  for (const auto& a : options.appliances) {
    apps.push_back({{"id", a.id},
                    {"max_power", a.activation.max_power},
                    {"on_power_threshold", a.activation.on_power_threshold},
                    {"min_on_duration", a.activation.min_on_duration},
                    {"min_off_duration", a.activation.min_off_duration},
                    {"window_width", 128},
                    {"states", 2},
                    {"train_houses", train_houses},
                    {"test_houses", test_houses}});
  }
  nlohmann::json config = {{"schema_version", kConfigSchemaVersion},
                           {"seed", seed},
                           {"profile", "desk"},
                           {"sample_period", options.sample_period},
                           {"output_dir", "out"},
                           {"houses", houses},
                           {"appliances", apps},
                           {"architectures", {"dae", "rectangles"}}};
  const fs::path path = dir / "config.json";
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << config.dump(2) << '\n';
  return path;
}

}  // namespace nilm
