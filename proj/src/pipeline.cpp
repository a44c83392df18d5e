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

#include "nilm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "nilm/architectures.hpp"
#include "nilm/disaggregate.hpp"
#include "nilm/error.hpp"
#include "nilm/hash.hpp"
#include "nilm/metrics.hpp"
#include "nilm/network.hpp"
#include "nilm/optimizer.hpp"

namespace nilm {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

fs::path resolve(const ExperimentConfig& config, const fs::path& p) {
  return p.is_absolute() ? p : config.base_dir / p;
}

PowerSeries load_series(const ExperimentConfig& config, const fs::path& p) {
  const fs::path full = resolve(config, p);
  if (!fs::exists(full)) throw DataError("missing file " + full.string());
  return load_csv(full, config.sample_period);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// Offset of `start` on the grid of `grid`, in samples.
std::ptrdiff_t grid_offset(std::int64_t start, const PowerSeries& grid,
                           const std::string& what) {
  const std::int64_t delta = start - grid.start_time;
  if (delta % grid.sample_period != 0) {
    throw DataError(what + " starts at " + std::to_string(start) +
                    ", off the mains grid anchored at " +
                    std::to_string(grid.start_time));
  }
  return static_cast<std::ptrdiff_t>(delta / grid.sample_period);
}

// Channel values on the mains grid; samples outside the channel are zero.
std::vector<double> align_to(const PowerSeries& channel, const PowerSeries& grid,
                             const std::string& what) {
  std::vector<double> out(grid.size(), 0.0);
  if (channel.empty()) return out;
  const std::ptrdiff_t shift = grid_offset(channel.start_time, grid, what);
  for (std::size_t i = 0; i < channel.size(); ++i) {
    const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(i) + shift;
    if (t >= 0 && t < static_cast<std::ptrdiff_t>(grid.size()))
      out[static_cast<std::size_t>(t)] = channel.values[i];
  }
  return out;
}

bool is_baseline(const std::string& algorithm) {
  return algorithm == "co" || algorithm == "fhmm";
}

std::shared_ptr<ActivationLibrary> build_library(const ExperimentConfig& config,
                                                 const ActivationStore& store) {
  auto library = std::make_shared<ActivationLibrary>();
  for (const auto& a : config.appliances) {
    const auto it = store.find(a.id);
    if (it != store.end()) {
      for (const auto& [house, ch] : it->second) library->add(a.id, house, ch.activations);
    }
    library->assign_houses(a.id, a.train_houses, a.test_houses);
  }
  return library;
}

std::string fixed(double v, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

}  // namespace

fs::path checkpoint_path(const fs::path& model_dir, const std::string& appliance,
                         const std::string& kind, std::size_t step) {
  return model_dir / (appliance + "_" + kind + "_" + std::to_string(step) + ".cbor");
}

fs::path latest_checkpoint(const fs::path& model_dir, const std::string& appliance,
                           const std::string& kind) {
  const std::string prefix = appliance + "_" + kind + "_";
  fs::path best;
  long best_step = -1;
  if (fs::is_directory(model_dir)) {
    for (const auto& entry : fs::directory_iterator(model_dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.path().extension() != ".cbor" || name.rfind(prefix, 0) != 0) continue;
      const std::string digits =
          name.substr(prefix.size(), name.size() - prefix.size() - 5);
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        continue;
      const long step = std::stol(digits);
      if (step > best_step) {
        best_step = step;
        best = entry.path();
      }
    }
  }
  if (best_step < 0) {
    throw DataError("no " + prefix + "<step>.cbor checkpoint in " + model_dir.string() +
                    "; run train first");
  }
  return best;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::vector<std::string>& tags) {
  std::string key = std::to_string(seed);
  for (const auto& t : tags) key += "/" + t;
  return fnv1a64(key);
}

// ------------------------------------------------------------ store

void save_activation_store(const fs::path& path, const ActivationStore& store) {
  ordered_json j = ordered_json::object();
  for (const auto& [app, houses] : store) {
    ordered_json hj = ordered_json::object();
    for (const auto& [house, ch] : houses) {
      ordered_json acts = ordered_json::array();
      for (const auto& a : ch.activations)
        acts.push_back({{"offset", a.source_offset}, {"values", a.values}});
      hj[std::to_string(house)] = {{"channel_start", ch.channel_start},
                                   {"channel_samples", ch.channel_samples},
                                   {"activations", acts}};
    }
    j[app] = hj;
  }
  write_text(path, j.dump(1) + "\n");
}

ActivationStore load_activation_store(const fs::path& path) {
  if (!fs::exists(path))
    throw DataError("activation store " + path.string() + " not found; run extract first");
  ActivationStore store;
  try {
    const json j = json::parse(read_file(path));
    for (const auto& [app, houses] : j.items()) {
      for (const auto& [house, hj] : houses.items()) {
        ChannelActivations ch;
        ch.channel_start = hj.at("channel_start").get<std::int64_t>();
        ch.channel_samples = hj.at("channel_samples").get<std::size_t>();
        for (const auto& aj : hj.at("activations")) {
          ch.activations.push_back({aj.at("offset").get<std::size_t>(),
                                    aj.at("values").get<std::vector<double>>()});
        }
        store[app][std::stoi(house)] = std::move(ch);
      }
    }
  } catch (const json::exception& e) {
    throw DataError("malformed activation store " + path.string() + ": " + e.what());
  }
  return store;
}

// ------------------------------------------------------------ layout

fs::path Layout::preview(const std::string& appliance) const {
  return root / "preview" / (appliance + ".csv");
}
fs::path Layout::model_dir(const std::string& appliance, const std::string& kind) const {
  return root / "models" / appliance / kind;
}
fs::path Layout::baseline_models() const { return root / "baselines" / "models.json"; }
fs::path Layout::estimate(int house, const std::string& appliance,
                          const std::string& algorithm) const {
  return root / "estimates" / ("house_" + std::to_string(house)) / appliance /
         (algorithm + ".csv");
}
fs::path Layout::run_report(int house, const std::string& appliance,
                            const std::string& algorithm) const {
  return root / "estimates" / ("house_" + std::to_string(house)) / appliance /
         (algorithm + ".run.json");
}
fs::path Layout::house_report(int house) const {
  return root / "reports" / ("house_" + std::to_string(house) + ".json");
}

Layout layout_for(const ExperimentConfig& config) {
  return {resolve(config, config.output_dir)};
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"lstm", "dae", "rectangles", "co", "fhmm"};
  return names;
}

// ------------------------------------------------------------ extract

ExtractSummary cmd_extract(const ExperimentConfig& config, const RunOptions& options) {
  ExtractSummary summary;
  for (const auto& a : config.appliances) summary.appliances.push_back(a.id);
  ActivationStore store;
  for (const auto& h : config.houses) {
    summary.houses.push_back(h.id);
    std::vector<long> row;
    for (const auto& a : config.appliances) {
      const auto it = h.channels.find(a.id);
      if (it == h.channels.end()) {
        row.push_back(-1);
        continue;
      }
      const PowerSeries series = load_series(config, it->second);
      ChannelActivations ch;
      ch.channel_start = series.start_time;
      ch.channel_samples = series.size();
      ch.activations = extract_activations(series, a.activation);
      row.push_back(static_cast<long>(ch.activations.size()));
      store[a.id][h.id] = std::move(ch);
    }
    summary.counts.push_back(std::move(row));
  }
  const Layout layout = layout_for(config);
  save_activation_store(layout.activations(), store);

  if (options.log) {
    auto& out = *options.log;
    out << std::left << std::setw(8) << "house";
    for (const auto& a : summary.appliances) out << std::right << std::setw(16) << a;
    out << '\n';
    for (std::size_t i = 0; i < summary.houses.size(); ++i) {
      out << std::left << std::setw(8) << summary.houses[i];
      for (long c : summary.counts[i]) {
        out << std::right << std::setw(16) << (c < 0 ? std::string("-") : std::to_string(c));
      }
      out << '\n';
    }
    out << "activations written to " << layout.activations().string() << '\n';
  }
  return summary;
}

// ------------------------------------------------------------ helpers

HouseData house_data(const ExperimentConfig& config, const ActivationStore& store,
                     const std::string& appliance, int house) {
  HouseData data;
  data.house = house;
  data.aggregate = load_series(config, config.house(house).mains);
  const auto app = store.find(appliance);
  const auto ch = app == store.end() ? nullptr : &app->second;
  if (!ch || !ch->count(house)) {
    throw DataError("no " + appliance + " channel for house " + std::to_string(house) +
                    " in the activation store");
  }
  const ChannelActivations& c = ch->at(house);
  if (c.channel_samples == 0) return data;
  const std::ptrdiff_t shift =
      grid_offset(c.channel_start, data.aggregate, appliance + " channel");
  for (const auto& a : c.activations) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(a.source_offset) + shift;
    if (start < 0 ||
        start + static_cast<std::ptrdiff_t>(a.size()) >
            static_cast<std::ptrdiff_t>(data.aggregate.size()))
      continue;
    data.target_activations.push_back({static_cast<std::size_t>(start), a.values});
  }
  return data;
}

std::vector<ApplianceStateModel> fit_baseline_models(
    const ExperimentConfig& config, const ActivationStore& store,
    std::vector<std::string>* warnings) {
  std::vector<ApplianceStateModel> models;
  for (const auto& a : config.appliances) {
    std::vector<Activation> acts;
    StateFitOptions fit;
    const auto it = store.find(a.id);
    for (int h : a.train_houses) {
      if (it == store.end() || !it->second.count(h)) continue;
      const auto& ch = it->second.at(h);
      acts.insert(acts.end(), ch.activations.begin(), ch.activations.end());
      fit.observed_samples += ch.channel_samples;
    }
    models.push_back(fit_states(a.id, acts, a.states, fit, warnings));
  }
  return models;
}

// ------------------------------------------------------------ synth-preview

void cmd_synth_preview(const ExperimentConfig& config, const std::string& appliance,
                       std::size_t windows, const RunOptions& options) {
  const auto& app = config.appliance(appliance);
  const auto store = load_activation_store(layout_for(config).activations());
  const auto library = build_library(config, store);
  const WindowSpec spec{appliance, config.window_width(app), app.activation.max_power, 1.0};
  Rng rng(derive_seed(config.seed, {"preview", appliance}));

  std::ostringstream csv;
  csv << std::setprecision(10) << "window,sample,aggregate_watts,target_watts\n";
  for (std::size_t w = 0; w < windows; ++w) {
    const RawWindow raw = synthesize_aggregate(*library, appliance, spec, rng);
    for (std::size_t t = 0; t < spec.window_width; ++t)
      csv << w << ',' << t << ',' << raw.aggregate[t] << ',' << raw.target[t] << '\n';
    if (options.log) {
      *options.log << "window " << w << ":";
      if (raw.placements.empty()) *options.log << " empty";
      for (const auto& p : raw.placements) {
        *options.log << ' ' << p.appliance << (p.is_target ? "*" : "") << "@" << p.offset
                     << "+" << p.length;
      }
      *options.log << '\n';
    }
  }
  const fs::path path = layout_for(config).preview(appliance);
  write_text(path, csv.str());
  if (options.log) *options.log << "preview written to " << path.string() << '\n';
}

// ------------------------------------------------------------ train

TrainOutcome cmd_train(const ExperimentConfig& config, const std::string& appliance,
                       ArchitectureKind kind, const RunOptions& options) {
  const auto& app = config.appliance(appliance);
  if (app.train_houses.empty()) throw ConfigError(appliance + ": no training houses");
  const auto store = load_activation_store(layout_for(config).activations());
  const auto library = build_library(config, store);
  const std::string kind_name = to_string(kind);

  std::vector<HouseData> houses;
  for (int h : app.train_houses) houses.push_back(house_data(config, store, appliance, h));

  WindowSpec spec{appliance, config.window_width(app), app.activation.max_power, 1.0};
  auto real = std::make_shared<RealWindowSource>(houses, spec);
  auto synth = std::make_shared<SyntheticWindowSource>(library, appliance, spec);

  Rng std_rng(derive_seed(config.seed, {"input_std", appliance, kind_name}));
  std::vector<std::vector<double>> sample;
  for (std::size_t i = 0; i < config.train.std_sample_windows; ++i) {
    const WindowSource& src = i % 2 == 0 ? static_cast<const WindowSource&>(*real) : *synth;
    sample.push_back(src.draw(std_rng).aggregate);
  }
  spec.input_std = estimate_input_std(sample, sample.size(), std_rng);

  Manifest manifest;
  manifest.appliance_id = appliance;
  manifest.kind = kind;
  manifest.window_width = spec.window_width;
  manifest.max_power = spec.max_power;
  manifest.input_std = spec.input_std;
  manifest.seed = config.seed;
  manifest.std_sample_windows = config.train.std_sample_windows;
  manifest.train_houses = app.train_houses;
  manifest.test_houses = app.test_houses;

  const fs::path dir = layout_for(config).model_dir(appliance, kind_name);
  fs::create_directories(dir);
  save_manifest(dir / "manifest.json", manifest);
  const std::string manifest_hash = manifest.hash();

  const ArchitectureSpec arch =
      architecture_spec(kind, spec.window_width, config.architecture_options());
  Network network =
      build_network(arch, derive_seed(config.seed, {"init", appliance, kind_name}));

  BatchStream stream(real, synth, spec, target_encoding(kind), config.batch_size(kind),
                     derive_seed(config.seed, {"batches", appliance, kind_name}));
  PrefetchingBatchStream prefetch(std::move(stream), config.train.prefetch_depth);

  NesterovSgd optimizer(config.optimizer.learning_rate, config.optimizer.momentum);
  TrainOptions topt;
  topt.update_budget = config.update_budget(kind);
  topt.gradient_clip = config.optimizer.gradient_clip;
  topt.plateau_patience = config.optimizer.plateau_patience;
  topt.log_every = std::max<std::size_t>(1, config.train.log_every);
  topt.checkpoint_every = config.train.checkpoint_every;
  topt.on_checkpoint = [&](std::size_t step, Network& net) {
    save_checkpoint(checkpoint_path(dir, appliance, kind_name, step), net,
                    {manifest_hash, step});
  };

  if (options.log) {
    *options.log << "training " << kind_name << " for " << appliance << ": W="
                 << spec.window_width << " params=" << network.parameter_count()
                 << " updates=" << topt.update_budget << " input_std="
                 << fixed(spec.input_std, 3) << '\n';
  }
  TrainOutcome outcome{dir, train(network, kind, spec.window_width,
                                  [&] { return prefetch.next(); }, optimizer, topt)};
  if (!options.record_wallclock)
    for (auto& r : outcome.result.trace) r.wallclock_s = 0.0;
  write_loss_log(dir / "loss.csv", outcome.result.trace);

  if (options.log && !outcome.result.trace.empty()) {
    const auto& last = outcome.result.trace.back();
    *options.log << "step " << last.step << " loss " << last.loss << " smoothed "
                 << last.smoothed_loss << '\n';
  }
  if (outcome.result.diverged) {
    throw NumericError("training diverged after " +
                       std::to_string(outcome.result.steps_completed) +
                       " updates; last finite checkpoint kept in " + dir.string());
  }
  return outcome;
}

// ------------------------------------------------------------ disaggregate

std::vector<fs::path> cmd_disaggregate(const ExperimentConfig& config,
                                       const std::string& appliance,
                                       const std::string& algorithm, int house,
                                       const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const Layout layout = layout_for(config);
  const PowerSeries mains = load_series(config, config.house(house).mains);

  struct Written {
    std::string appliance;
    EstimateSeries estimate;
  };
  std::vector<Written> results;
  ordered_json extra = ordered_json::object();

  if (is_baseline(algorithm)) {
    const auto store = load_activation_store(layout.activations());
    std::vector<std::string> warnings;
    const auto models = fit_baseline_models(config, store, &warnings);
    if (options.log)
      for (const auto& w : warnings) *options.log << "warning: " << w << '\n';
    fs::create_directories(layout.baseline_models().parent_path());
    save_models(layout.baseline_models(), models);
    const auto estimates = algorithm == "co" ? co_disaggregate(mains, models)
                                             : fhmm_disaggregate(mains, models);
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (appliance.empty() || appliance == models[i].appliance_id)
        results.push_back({models[i].appliance_id, estimates[i]});
    }
    if (results.empty()) throw ConfigError("appliance '" + appliance + "' is not in the config");
    extra["models_hash"] = hex64(fnv1a64(read_file(layout.baseline_models())));
  } else {
    const ArchitectureKind kind = architecture_from_string(algorithm);
    const auto& app = config.appliance(appliance);
    const fs::path dir = layout.model_dir(appliance, algorithm);
    const Manifest manifest = load_manifest(dir / "manifest.json");
    const fs::path ckpt = options.checkpoint.empty()
                              ? latest_checkpoint(dir, appliance, algorithm)
                              : options.checkpoint;
    Checkpoint meta;
    const Network network = load_checkpoint(ckpt, &meta);
    if (meta.manifest_hash != manifest.hash()) {
      throw DataError("checkpoint " + ckpt.string() +
                      " was trained under manifest " + meta.manifest_hash +
                      ", but manifest.json hashes to " + manifest.hash());
    }
    if (manifest.kind != kind || manifest.appliance_id != appliance)
      throw DataError("manifest in " + dir.string() + " describes a different model");
    DisaggConfig dc = config.disagg_config();
    dc.power_threshold = app.activation.on_power_threshold;
    dc.validate(manifest.window_width);
    const NetworkPredictor predictor(network, kind, manifest.window_width);
    results.push_back({appliance, disaggregate(predictor, mains, manifest.window_spec(), dc)});
    extra["manifest_hash"] = meta.manifest_hash;
    extra["checkpoint"] = ckpt.filename().string();
    extra["checkpoint_hash"] = hex64(fnv1a64(read_file(ckpt)));
    extra["checkpoint_step"] = meta.step;
  }

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  std::vector<fs::path> paths;
  for (const auto& r : results) {
    const fs::path path = layout.estimate(house, r.appliance, algorithm);
    fs::create_directories(path.parent_path());
    save_estimate_csv(path, r.estimate);
    ordered_json run = {{"appliance", r.appliance},
                        {"algorithm", algorithm},
                        {"house", house},
                        {"samples", r.estimate.power.size()},
                        {"config_hash", config.hash()}};
    for (const auto& [k, v] : extra.items()) run[k] = v;
    run["runtime_s"] = options.record_wallclock ? elapsed.count() : 0.0;
    run["config"] = config.to_json();
    write_text(layout.run_report(house, r.appliance, algorithm), run.dump(2) + "\n");
    if (options.log) *options.log << "estimate written to " << path.string() << '\n';
    paths.push_back(path);
  }
  return paths;
}

// ------------------------------------------------------------ evaluate

fs::path cmd_evaluate(const ExperimentConfig& config, int house, const RunOptions& options) {
  const Layout layout = layout_for(config);
  const HouseConfig& hc = config.house(house);
  const PowerSeries mains = load_series(config, hc.mains);

  ordered_json results = ordered_json::array();
  std::ostringstream csv;
  csv << std::setprecision(10) << "house,appliance,algorithm,metric,value\n";
  for (const auto& app : config.appliances) {
    const auto channel = hc.channels.find(app.id);
    for (const auto& algorithm : algorithm_names()) {
      const fs::path path = layout.estimate(house, app.id, algorithm);
      if (!fs::exists(path)) continue;
      if (channel == hc.channels.end()) {
        throw DataError("house " + std::to_string(house) + " has no ground truth for " + app.id);
      }
      const EstimateSeries estimate = load_estimate_csv(path);
      const PowerSeries& est = estimate.power;
      if (est.size() != mains.size() ||
          (!est.empty() && (est.start_time != mains.start_time ||
                            est.sample_period != mains.sample_period))) {
        std::string detail = "estimate " + path.string() + " is misaligned with the ground truth";
        if (!est.empty() && !mains.empty()) {
          detail += ": estimate spans " + std::to_string(est.timestamp(0)) + ".." +
                    std::to_string(est.timestamp(est.size() - 1)) + ", ground truth spans " +
                    std::to_string(mains.timestamp(0)) + ".." +
                    std::to_string(mains.timestamp(mains.size() - 1));
        }
        throw DataError(detail);
      }
      const std::vector<double> truth =
          align_to(load_series(config, channel->second), mains, app.id + " channel");
      const MetricsReport report =
          evaluate_estimate(est.values, truth, mains.values, app.on_threshold());

      ordered_json metrics = ordered_json::object();
      const auto values = report.values();
      for (std::size_t m = 0; m < values.size(); ++m) {
        metrics[MetricsReport::metric_names()[m]] = values[m];
        csv << house << ',' << app.id << ',' << algorithm << ','
            << MetricsReport::metric_names()[m] << ',' << values[m] << '\n';
      }
      results.push_back({{"appliance", app.id},
                         {"algorithm", algorithm},
                         {"on_threshold", app.on_threshold()},
                         {"metrics", metrics},
                         {"confusion",
                          {{"tp", report.counts.tp},
                           {"fp", report.counts.fp},
                           {"fn", report.counts.fn},
                           {"tn", report.counts.tn}}}});
      if (options.log) {
        *options.log << std::left << std::setw(12) << app.id << std::setw(12) << algorithm
                     << "F1 " << fixed(report.f1, 3) << "  proportion "
                     << fixed(report.proportion_energy_correct, 3) << "  MAE "
                     << fixed(report.mean_absolute_error, 1) << " W\n";
      }
    }
  }
  const fs::path path = layout.house_report(house);
  const ordered_json j = {{"house", house},
                          {"config_hash", config.hash()},
                          {"results", results}};
  write_text(path, j.dump(2) + "\n");
  fs::path csv_path = path;
  csv_path.replace_extension(".csv");
  write_text(csv_path, csv.str());
  return path;
}

// ------------------------------------------------------------ report

fs::path cmd_report(const ExperimentConfig& config, const RunOptions& options) {
  const Layout layout = layout_for(config);
  ordered_json houses = ordered_json::array();
  // (appliance, algorithm) -> metric sums, in first-seen order.
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::size_t>> sums;
  std::ostringstream csv;
  csv << std::setprecision(10) << "house,appliance,algorithm,metric,value\n";

  for (const auto& h : config.houses) {
    const fs::path path = layout.house_report(h.id);
    if (!fs::exists(path)) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(read_file(path));
    } catch (const ordered_json::exception& e) {
      throw DataError("malformed report " + path.string() + ": " + e.what());
    }
    for (const auto& r : j.at("results")) {
      const auto key = std::make_pair(r.at("appliance").get<std::string>(),
                                      r.at("algorithm").get<std::string>());
      if (!sums.count(key)) {
        keys.push_back(key);
        sums[key] = {std::vector<double>(MetricsReport::metric_names().size(), 0.0), 0};
      }
      auto& [acc, n] = sums[key];
      for (std::size_t m = 0; m < acc.size(); ++m) {
        const double v = r.at("metrics").at(MetricsReport::metric_names()[m]).get<double>();
        acc[m] += v;
        csv << h.id << ',' << key.first << ',' << key.second << ','
            << MetricsReport::metric_names()[m] << ',' << v << '\n';
      }
      ++n;
    }
    houses.push_back(j);
  }
  if (houses.empty()) throw DataError("no house reports found; run evaluate first");

  ordered_json mean = ordered_json::array();
  for (const auto& key : keys) {
    const auto& [acc, n] = sums[key];
    ordered_json metrics = ordered_json::object();
    for (std::size_t m = 0; m < acc.size(); ++m) {
      const double v = acc[m] / static_cast<double>(n);
      metrics[MetricsReport::metric_names()[m]] = v;
      csv << "all," << key.first << ',' << key.second << ','
          << MetricsReport::metric_names()[m] << ',' << v << '\n';
    }
    mean.push_back({{"appliance", key.first}, {"algorithm", key.second},
                    {"houses", n}, {"metrics", metrics}});
  }
  const ordered_json j = {{"config_hash", config.hash()},
                          {"config", config.to_json()},
                          {"mean_over_houses", mean},
                          {"houses", houses}};
  write_text(layout.report_json(), j.dump(2) + "\n");
  write_text(layout.report_csv(), csv.str());

  if (options.log) {
    auto& out = *options.log;
    out << std::left << std::setw(12) << "appliance" << std::setw(12) << "algorithm";
    for (const auto& name : {"recall", "precision", "F1", "accuracy", "rel_err", "MAE", "prop"})
      out << std::right << std::setw(10) << name;
    out << '\n';
    for (const auto& key : keys) {
      const auto& [acc, n] = sums[key];
      out << std::left << std::setw(12) << key.first << std::setw(12) << key.second;
      for (double v : acc) out << std::right << std::setw(10) << fixed(v / static_cast<double>(n), 3);
      out << '\n';
    }
  }
  return layout.report_json();
}

}  // namespace nilm
