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

#include "nilm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include <json.hpp>

#include "nilm/error.hpp"
#include "nilm/kernels.hpp"

namespace nilm {

using nlohmann::json;

void ApplianceStateModel::validate() const {
  const std::size_t k = states();
  if (k == 0) throw ConfigError(appliance_id + ": model has no states");
  if (state_powers[0] != 0.0) throw ConfigError(appliance_id + ": state 0 must be 0 W");
  if (!std::is_sorted(state_powers.begin(), state_powers.end()))
    throw ConfigError(appliance_id + ": state powers must be ascending");
  if (transition.size() != k || initial.size() != k || emission_std.size() != k)
    throw ConfigError(appliance_id + ": Markov parameters do not match states");
  for (const auto& row : transition) {
    if (row.size() != k) throw ConfigError(appliance_id + ": ragged transition matrix");
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError(appliance_id + ": transition row does not sum to 1");
  }
  for (double s : emission_std)
    if (!(s > 0.0)) throw ConfigError(appliance_id + ": emission std must be > 0");
}

std::vector<double> kmeans_1d(std::span<const double> values,
                              std::size_t clusters,
                              std::size_t max_iterations) {
  if (values.empty() || clusters == 0) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> centroids(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    const double q = (static_cast<double>(c) + 0.5) / static_cast<double>(clusters);
    centroids[c] = sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1) + 0.5)];
  }

  std::vector<double> sum(clusters);
  std::vector<std::size_t> count(clusters);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (double v : sorted) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < clusters; ++c)
        if (std::abs(v - centroids[c]) < std::abs(v - centroids[best])) best = c;
      sum[best] += v;
      ++count[best];
    }
    bool moved = false;
    for (std::size_t c = 0; c < clusters; ++c) {
      if (count[c] == 0) continue;
      const double next = sum[c] / static_cast<double>(count[c]);
      if (next != centroids[c]) moved = true;
      centroids[c] = next;
    }
    if (!moved) break;
  }
  std::sort(centroids.begin(), centroids.end());
  return centroids;
}

ApplianceStateModel fit_states(const std::string& appliance_id,
                               std::span<const Activation> activations,
                               std::size_t k, const StateFitOptions& options,
                               std::vector<std::string>* warnings) {
  if (k < 2) throw ConfigError("fit_states needs k >= 2 (including off)");
  if (activations.empty()) {
    throw DataError(appliance_id + ": no activations to fit states from");
  }
  std::vector<double> on;
  for (const auto& a : activations)
    for (double v : a.values)
      if (v > 0.0) on.push_back(v);
  if (on.empty()) throw DataError(appliance_id + ": activations carry no power");

  const std::set<double> distinct(on.begin(), on.end());
  std::size_t clusters = k - 1;
  if (distinct.size() < clusters) {
    clusters = distinct.size();
    if (warnings) {
      warnings->push_back(appliance_id + ": only " + std::to_string(distinct.size()) +
                          " distinct power values; using " +
                          std::to_string(clusters + 1) + " states");
    }
  }

  ApplianceStateModel m;
  m.appliance_id = appliance_id;
  m.state_powers.push_back(0.0);
  for (double c : kmeans_1d(on, clusters, options.max_iterations))
    m.state_powers.push_back(c);
  const std::size_t states = m.state_powers.size();

  auto quantise = [&](double v) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < states; ++s)
      if (std::abs(v - m.state_powers[s]) < std::abs(v - m.state_powers[best]))
        best = s;
    return best;
  };

  std::vector<std::vector<double>> counts(states, std::vector<double>(states, 1.0));
  std::vector<double> occupancy(states, 1.0);
  std::vector<double> sum(states, 0.0), sum_sq(states, 0.0);
  std::vector<std::size_t> members(states, 0);
  std::size_t on_samples = 0;
  for (const auto& a : activations) {
    std::size_t prev = 0;
    for (double v : a.values) {
      const std::size_t s = quantise(v);
      counts[prev][s] += 1.0;
      occupancy[s] += 1.0;
      sum[s] += v;
      sum_sq[s] += v * v;
      ++members[s];
      prev = s;
    }
    counts[prev][0] += 1.0;
    on_samples += a.values.size();
  }
  if (options.observed_samples > on_samples) {
    const double off = static_cast<double>(options.observed_samples - on_samples);
    occupancy[0] += off;
    counts[0][0] += std::max(0.0, off - static_cast<double>(activations.size()));
  }

  for (std::size_t s = 0; s < states; ++s) {
    const double row = std::accumulate(counts[s].begin(), counts[s].end(), 0.0);
    std::vector<double> p(states);
    for (std::size_t j = 0; j < states; ++j) p[j] = counts[s][j] / row;
    m.transition.push_back(std::move(p));
  }
  const double occ = std::accumulate(occupancy.begin(), occupancy.end(), 0.0);
  for (double o : occupancy) m.initial.push_back(o / occ);
  for (std::size_t s = 0; s < states; ++s) {
    double sd = 0.0;
    if (members[s] > 1) {
      const double n = static_cast<double>(members[s]);
      const double mean = sum[s] / n;
      sd = std::sqrt(std::max(0.0, sum_sq[s] / n - mean * mean));
    }
    m.emission_std.push_back(std::max(sd, options.std_floor));
  }
  m.validate();
  return m;
}

namespace {

// Mixed-radix enumeration of joint states, first model most significant.
std::vector<std::vector<std::size_t>> joint_states(
    std::span<const ApplianceStateModel> models, std::size_t limit,
    const char* what) {
  std::size_t total = 1;
  for (const auto& m : models) {
    if (m.states() == 0) throw ConfigError(m.appliance_id + ": no states");
    if (total > limit / m.states()) {
      throw ConfigError(std::string(what) + ": more than " + std::to_string(limit) +
                        " joint states; use fewer states per appliance" +
                        (std::string(what) == "fhmm" ? " or the co baseline" : ""));
    }
    total *= m.states();
  }
  std::vector<std::vector<std::size_t>> out(total,
                                            std::vector<std::size_t>(models.size()));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t a = models.size(); a-- > 0;) {
      out[idx][a] = rest % models[a].states();
      rest /= models[a].states();
    }
  }
  return out;
}

double joint_power(std::span<const ApplianceStateModel> models,
                   const std::vector<std::size_t>& s) {
  double total = 0.0;
  for (std::size_t a = 0; a < models.size(); ++a)
    total += models[a].state_powers[s[a]];
  return total;
}

std::vector<EstimateSeries> estimates_from_path(
    const PowerSeries& grid, std::span<const ApplianceStateModel> models,
    const JointPath& path) {
  std::vector<EstimateSeries> out(models.size());
  for (std::size_t a = 0; a < models.size(); ++a) {
    out[a].power.start_time = grid.start_time;
    out[a].power.sample_period = grid.sample_period;
    out[a].power.values.resize(path.size());
    for (std::size_t t = 0; t < path.size(); ++t)
      out[a].power.values[t] = models[a].state_powers[path[t][a]];
  }
  return out;
}

}  // namespace

JointPath co_assign(std::span<const double> aggregate,
                    std::span<const ApplianceStateModel> models) {
  if (models.empty()) throw ConfigError("co needs at least one appliance model");
  auto combos = joint_states(models, kMaxCoCombinations, "co");
  std::vector<double> totals(combos.size());
  for (std::size_t i = 0; i < combos.size(); ++i)
    totals[i] = joint_power(models, combos[i]);

  // Lexicographic enumeration + stable sort by total puts the preferred
  // assignment first among equal residuals.
  std::vector<std::size_t> order(combos.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return totals[a] < totals[b]; });
  std::vector<double> sorted_totals(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted_totals[i] = totals[order[i]];

  std::vector<std::size_t> chosen(aggregate.size());
  kernels::nearest_total(aggregate, sorted_totals, chosen);
  JointPath path(aggregate.size());
  for (std::size_t t = 0; t < aggregate.size(); ++t) path[t] = combos[order[chosen[t]]];
  return path;
}

std::vector<EstimateSeries> co_disaggregate(
    const PowerSeries& aggregate, std::span<const ApplianceStateModel> models) {
  return estimates_from_path(aggregate, models, co_assign(aggregate.values, models));
}

JointPath fhmm_viterbi(std::span<const double> aggregate,
                       std::span<const ApplianceStateModel> models,
                       double* log_probability) {
  if (models.empty()) throw ConfigError("fhmm needs at least one appliance model");
  for (const auto& m : models) m.validate();
  const auto joint = joint_states(models, kMaxFhmmJointStates, "fhmm");
  const std::size_t k = joint.size();
  const std::size_t steps = aggregate.size();
  if (steps == 0) {
    if (log_probability) *log_probability = 0.0;
    return {};
  }

  std::vector<double> mean(k), var(k), log_init(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double v = 0.0;
    for (std::size_t a = 0; a < models.size(); ++a) {
      const auto& m = models[a];
      v += m.emission_std[joint[j][a]] * m.emission_std[joint[j][a]];
      log_init[j] += std::log(m.initial[joint[j][a]]);
    }
    mean[j] = joint_power(models, joint[j]);
    var[j] = v;
  }
  auto log_emission = [&](std::size_t j, double y) {
    const double d = y - mean[j];
    return -0.5 * std::log(2.0 * std::numbers::pi * var[j]) - d * d / (2.0 * var[j]);
  };

  std::vector<std::vector<std::vector<double>>> log_trans(models.size());
  for (std::size_t a = 0; a < models.size(); ++a) {
    for (const auto& row : models[a].transition) {
      std::vector<double> lr(row.size());
      for (std::size_t j = 0; j < row.size(); ++j) lr[j] = std::log(row[j]);
      log_trans[a].push_back(std::move(lr));
    }
  }
  auto joint_log_trans = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t a = 0; a < models.size(); ++a)
      s += log_trans[a][joint[i][a]][joint[j][a]];
    return s;
  };
  std::vector<double> trans_cache;
  const bool cached = k <= 1024;
  if (cached) {
    trans_cache.resize(k * k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) trans_cache[i * k + j] = joint_log_trans(i, j);
  }

  std::vector<double> delta(k), next(k);
  std::vector<std::uint32_t> back(steps * k, 0);
  for (std::size_t j = 0; j < k; ++j) delta[j] = log_init[j] + log_emission(j, aggregate[0]);

  for (std::size_t t = 1; t < steps; ++t) {
    const auto kk = static_cast<std::int64_t>(k);
#pragma omp parallel for schedule(static) if (k >= 64)
    for (std::int64_t jj = 0; jj < kk; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      double best = -std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const double s =
            delta[i] + (cached ? trans_cache[i * k + j] : joint_log_trans(i, j));
        if (s > best) {
          best = s;
          arg = static_cast<std::uint32_t>(i);
        }
      }
      next[j] = best + log_emission(j, aggregate[t]);
      back[t * k + j] = arg;
    }
    std::swap(delta, next);
  }

  std::size_t state = static_cast<std::size_t>(
      std::max_element(delta.begin(), delta.end()) - delta.begin());
  if (log_probability) *log_probability = delta[state];
  JointPath path(steps);
  for (std::size_t t = steps; t-- > 0;) {
    path[t] = joint[state];
    if (t > 0) state = back[t * k + state];
  }
  return path;
}

std::vector<EstimateSeries> fhmm_disaggregate(
    const PowerSeries& aggregate, std::span<const ApplianceStateModel> models) {
  return estimates_from_path(aggregate, models,
                             fhmm_viterbi(aggregate.values, models));
}

void save_models(const std::filesystem::path& path,
                 std::span<const ApplianceStateModel> models) {
  json j = json::array();
  for (const auto& m : models) {
    j.push_back({{"appliance", m.appliance_id},
                 {"state_powers", m.state_powers},
                 {"transition", m.transition},
                 {"initial", m.initial},
                 {"emission_std", m.emission_std}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << json{{"models", j}}.dump(2) << '\n';
}

std::vector<ApplianceStateModel> load_models(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<ApplianceStateModel> models;
  try {
    const json j = json::parse(in);
    for (const auto& e : j.at("models")) {
      ApplianceStateModel m;
      m.appliance_id = e.at("appliance").get<std::string>();
      m.state_powers = e.at("state_powers").get<std::vector<double>>();
      m.transition = e.at("transition").get<std::vector<std::vector<double>>>();
      m.initial = e.at("initial").get<std::vector<double>>();
      m.emission_std = e.at("emission_std").get<std::vector<double>>();
      m.validate();
      models.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }
  return models;
}

}  // namespace nilm
