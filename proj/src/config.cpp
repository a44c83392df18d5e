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

#include "nilm/config.hpp"

#include <algorithm>
#include <fstream>

#include "nilm/error.hpp"
#include "nilm/hash.hpp"

namespace nilm {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Profile profile) {
  return profile == Profile::paper ? "paper" : "desk";
}

Profile profile_from_string(const std::string& name) {
  if (name == "paper") return Profile::paper;
  if (name == "desk") return Profile::desk;
  throw ConfigError("unknown profile '" + name + "' (expected {paper,desk})");
}

namespace {

// Wraps one JSON object and refuses keys that were never asked for.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  T required(const std::string& key) {
    seen_.push_back(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing '" + key + "'");
    return convert<T>(key);
  }

  template <typename T>
  T optional(const std::string& key, T fallback) {
    seen_.push_back(key);
    return j_.contains(key) ? convert<T>(key) : fallback;
  }

  template <typename T>
  std::optional<T> maybe(const std::string& key) {
    seen_.push_back(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return convert<T>(key);
  }

  const json* child(const std::string& key) {
    seen_.push_back(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  template <typename T>
  T convert(const std::string& key) {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + ": bad value for '" + key + "'");
    }
  }

  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

}  // namespace

const ApplianceConfig& ExperimentConfig::appliance(const std::string& id) const {
  for (const auto& a : appliances)
    if (a.id == id) return a;
  throw ConfigError("appliance '" + id + "' is not in the config");
}

const HouseConfig& ExperimentConfig::house(int id) const {
  for (const auto& h : houses)
    if (h.id == id) return h;
  throw ConfigError("house " + std::to_string(id) + " is not in the config");
}

bool ExperimentConfig::has_house(int id) const {
  return std::any_of(houses.begin(), houses.end(),
                     [&](const HouseConfig& h) { return h.id == id; });
}

std::size_t ExperimentConfig::window_width(const ApplianceConfig& a) const {
  if (profile == Profile::paper) return a.window_width;
  return std::max(desk.min_window, a.window_width / desk.window_divisor);
}

std::size_t ExperimentConfig::update_budget(ArchitectureKind kind) const {
  if (train.update_budget) return *train.update_budget;
  const std::size_t budget = default_update_budget(kind);
  if (profile == Profile::paper) return budget;
  return std::max<std::size_t>(1, budget / desk.budget_divisor);
}

std::size_t ExperimentConfig::batch_size(ArchitectureKind kind) const {
  return train.batch_size.value_or(default_batch_size(kind));
}

DisaggConfig ExperimentConfig::disagg_config() const {
  DisaggConfig d = disaggregation;
  if (profile == Profile::desk) d.stride = std::max<std::size_t>(1, d.stride / desk.window_divisor);
  return d;
}

ArchitectureOptions ExperimentConfig::architecture_options() const {
  ArchitectureOptions o;
  if (profile == Profile::desk) o.width_divisor = desk.width_divisor;
  return o;
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  if (sample_period <= 0) throw ConfigError("sample_period must be positive");
  if (appliances.empty()) throw ConfigError("config lists no appliances");
  if (desk.window_divisor == 0 || desk.budget_divisor == 0 || desk.width_divisor == 0)
    throw ConfigError("desk divisors must be positive");
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (optimizer.momentum < 0.0 || optimizer.momentum >= 1.0)
    throw ConfigError("momentum must lie in [0, 1)");
  if (optimizer.gradient_clip && !(*optimizer.gradient_clip > 0.0))
    throw ConfigError("gradient_clip must be positive");
  if (train.std_sample_windows == 0) throw ConfigError("std_sample_windows must be positive");
  if (train.batch_size && *train.batch_size < 2)
    throw ConfigError("batch_size must be at least 2");

  std::set<int> house_ids;
  for (const auto& h : houses) {
    if (!house_ids.insert(h.id).second)
      throw ConfigError("house " + std::to_string(h.id) + " listed twice");
    auto check = [&](const fs::path& p) {
      const fs::path full = p.is_absolute() ? p : base_dir / p;
      if (!fs::exists(full)) throw DataError("missing file " + full.string());
    };
    check(h.mains);
    for (const auto& [app, path] : h.channels) {
      (void)appliance(app);
      check(path);
    }
  }

  std::set<std::string> ids;
  for (const auto& a : appliances) {
    if (!ids.insert(a.id).second) throw ConfigError("appliance '" + a.id + "' listed twice");
    a.activation.validate();
    if (a.window_width == 0) throw ConfigError(a.id + ": window_width must be positive");
    if (a.states < 2) throw ConfigError(a.id + ": states must be >= 2");
    for (int h : a.train_houses) {
      if (a.test_houses.count(h))
        throw ConfigError(a.id + ": house " + std::to_string(h) +
                          " assigned to both train and test");
    }
    for (const auto* set : {&a.train_houses, &a.test_houses})
      for (int h : *set)
        if (!house_ids.count(h))
          throw ConfigError(a.id + ": unknown house " + std::to_string(h));
    for (ArchitectureKind kind : architectures) {
      if (kind != ArchitectureKind::lstm && window_width(a) <= 8)
        throw ConfigError(a.id + ": window too short for " + to_string(kind));
    }
    disagg_config().validate(window_width(a));
  }
}

json ExperimentConfig::to_json() const {
  json houses_j = json::array();
  for (const auto& h : houses) {
    json channels = json::object();
    for (const auto& [app, path] : h.channels) channels[app] = path.generic_string();
    houses_j.push_back({{"id", h.id}, {"mains", h.mains.generic_string()},
                        {"channels", channels}});
  }
  json apps = json::array();
  for (const auto& a : appliances) {
    json e = {{"id", a.id},
              {"max_power", a.activation.max_power},
              {"on_power_threshold", a.activation.on_power_threshold},
              {"min_on_duration", a.activation.min_on_duration},
              {"min_off_duration", a.activation.min_off_duration},
              {"window_width", a.window_width},
              {"states", a.states},
              {"train_houses", a.train_houses},
              {"test_houses", a.test_houses}};
    if (a.metric_on_threshold) e["metric_on_threshold"] = *a.metric_on_threshold;
    apps.push_back(e);
  }
  json kinds = json::array();
  for (auto k : architectures) kinds.push_back(to_string(k));
  json opt = {{"learning_rate", optimizer.learning_rate},
              {"momentum", optimizer.momentum},
              {"plateau_patience", optimizer.plateau_patience}};
  opt["gradient_clip"] = optimizer.gradient_clip ? json(*optimizer.gradient_clip) : json();
  json tr = {{"std_sample_windows", train.std_sample_windows},
             {"checkpoint_every", train.checkpoint_every},
             {"log_every", train.log_every},
             {"prefetch_depth", train.prefetch_depth}};
  if (train.update_budget) tr["update_budget"] = *train.update_budget;
  if (train.batch_size) tr["batch_size"] = *train.batch_size;
  return {{"schema_version", schema_version},
          {"seed", seed},
          {"profile", to_string(profile)},
          {"sample_period", sample_period},
          {"output_dir", output_dir.generic_string()},
          {"houses", houses_j},
          {"appliances", apps},
          {"architectures", kinds},
          {"optimizer", opt},
          {"train", tr},
          {"disaggregation",
           {{"stride", disaggregation.stride},
            {"probability_threshold", disaggregation.probability_threshold}}},
          {"desk",
           {{"window_divisor", desk.window_divisor},
            {"min_window", desk.min_window},
            {"budget_divisor", desk.budget_divisor},
            {"width_divisor", desk.width_divisor}}}};
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  Fields top(j, "config");
  c.schema_version = top.required<int>("schema_version");
  if (c.schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  c.seed = top.required<std::uint64_t>("seed");
  c.profile = profile_from_string(top.optional<std::string>("profile", "paper"));
  c.sample_period = top.optional<std::int64_t>("sample_period", kDefaultSamplePeriod);
  c.output_dir = top.optional<std::string>("output_dir", "out");

  if (const json* hs = top.child("houses")) {
    for (const auto& hj : *hs) {
      Fields f(hj, "house");
      HouseConfig h;
      h.id = f.required<int>("id");
      h.mains = f.required<std::string>("mains");
      for (const auto& [app, path] :
           f.optional<std::map<std::string, std::string>>("channels", {}))
        h.channels[app] = path;
      f.finish();
      c.houses.push_back(std::move(h));
    }
  }

  const json* apps = top.child("appliances");
  if (!apps) throw ConfigError("config: missing 'appliances'");
  for (const auto& aj : *apps) {
    ApplianceConfig a;
    a.id = aj.is_object() && aj.contains("id") && aj["id"].is_string()
               ? aj["id"].get<std::string>() : std::string("appliance");
    Fields f(aj, "appliance '" + a.id + "'");
    a.id = f.required<std::string>("id");
    a.activation.max_power = f.required<double>("max_power");
    a.activation.on_power_threshold = f.required<double>("on_power_threshold");
    a.activation.min_on_duration = f.required<double>("min_on_duration");
    a.activation.min_off_duration = f.required<double>("min_off_duration");
    a.window_width = f.required<std::size_t>("window_width");
    a.states = f.optional<std::size_t>("states", 2);
    a.train_houses = f.optional<std::set<int>>("train_houses", {});
    a.test_houses = f.optional<std::set<int>>("test_houses", {});
    a.metric_on_threshold = f.maybe<double>("metric_on_threshold");
    f.finish();
    c.appliances.push_back(std::move(a));
  }

  for (const auto& name : top.optional<std::vector<std::string>>(
           "architectures", {"lstm", "dae", "rectangles"}))
    c.architectures.push_back(architecture_from_string(name));

  if (const json* o = top.child("optimizer")) {
    Fields f(*o, "optimizer");
    c.optimizer.learning_rate = f.optional<double>("learning_rate", 0.01);
    c.optimizer.momentum = f.optional<double>("momentum", 0.9);
    if (o->contains("gradient_clip") && o->at("gradient_clip").is_null()) {
      (void)f.child("gradient_clip");
      c.optimizer.gradient_clip.reset();
    } else {
      c.optimizer.gradient_clip = f.optional<double>("gradient_clip", 10.0);
    }
    c.optimizer.plateau_patience = f.optional<std::size_t>("plateau_patience", 0);
    f.finish();
  }
  if (const json* t = top.child("train")) {
    Fields f(*t, "train");
    c.train.update_budget = f.maybe<std::size_t>("update_budget");
    c.train.batch_size = f.maybe<std::size_t>("batch_size");
    c.train.std_sample_windows = f.optional<std::size_t>("std_sample_windows", 1000);
    c.train.checkpoint_every = f.optional<std::size_t>("checkpoint_every", 0);
    c.train.log_every = f.optional<std::size_t>("log_every", 10);
    c.train.prefetch_depth = f.optional<std::size_t>("prefetch_depth", 2);
    f.finish();
  }
  if (const json* d = top.child("disaggregation")) {
    Fields f(*d, "disaggregation");
    c.disaggregation.stride = f.optional<std::size_t>("stride", 16);
    c.disaggregation.probability_threshold =
        f.optional<double>("probability_threshold", 0.5);
    f.finish();
  }
  if (const json* d = top.child("desk")) {
    Fields f(*d, "desk");
    c.desk.window_divisor = f.optional<std::size_t>("window_divisor", 4);
    c.desk.min_window = f.optional<std::size_t>("min_window", 16);
    c.desk.budget_divisor = f.optional<std::size_t>("budget_divisor", 100);
    c.desk.width_divisor = f.optional<std::size_t>("width_divisor", 16);
    f.finish();
  }
  top.finish();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

WindowSpec Manifest::window_spec() const {
  return {appliance_id, window_width, max_power, input_std};
}

json Manifest::to_json() const {
  return {{"appliance_id", appliance_id},
          {"architecture", nilm::to_string(kind)},
          {"window_width", window_width},
          {"max_power", max_power},
          {"input_std", input_std},
          {"seed", seed},
          {"std_sample_windows", std_sample_windows},
          {"train_houses", train_houses},
          {"test_houses", test_houses}};
}

Manifest Manifest::from_json(const json& j) {
  Fields f(j, "manifest");
  Manifest m;
  m.appliance_id = f.required<std::string>("appliance_id");
  m.kind = architecture_from_string(f.required<std::string>("architecture"));
  m.window_width = f.required<std::size_t>("window_width");
  m.max_power = f.required<double>("max_power");
  m.input_std = f.required<double>("input_std");
  m.seed = f.required<std::uint64_t>("seed");
  m.std_sample_windows = f.required<std::size_t>("std_sample_windows");
  m.train_houses = f.required<std::set<int>>("train_houses");
  m.test_houses = f.required<std::set<int>>("test_houses");
  f.finish();
  return m;
}

std::string Manifest::hash() const { return hex64(fnv1a64(to_json().dump())); }

void save_manifest(const fs::path& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.to_json().dump(2) << '\n';
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  try {
    return Manifest::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace nilm
