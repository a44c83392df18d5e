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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nilm/disaggregate.hpp"
#include "nilm/timeseries.hpp"

namespace nilm {

inline constexpr std::size_t kMaxCoCombinations = 1'000'000;
inline constexpr std::size_t kMaxFhmmJointStates = 4096;

// Discrete power states of one appliance. State 0 is always "off" at 0 W.
// The Markov parameters are used by the FHMM only.
struct ApplianceStateModel {
  std::string appliance_id;
  std::vector<double> state_powers;             // ascending, [0] == 0
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<double> initial;
  std::vector<double> emission_std;  // watts, > 0

  std::size_t states() const { return state_powers.size(); }
  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

struct StateFitOptions {
  std::size_t max_iterations = 200;
  double std_floor = 10.0;  // watts
  // Total samples of the channel the activations came from; the remainder
  // after the activations is counted as off -> off transitions. 0 = unknown.
  std::size_t observed_samples = 0;
};

// Lloyd's algorithm in one dimension, centroids seeded at evenly spaced
// quantiles. Returns ascending centroids.
std::vector<double> kmeans_1d(std::span<const double> values,
                              std::size_t clusters,
                              std::size_t max_iterations = 200);

// k states including off: k-1 clusters over the pooled activation samples,
// transitions counted on the quantised activations (padded with off) with
// add-one smoothing. When there are fewer distinct values than clusters, k is
// reduced and a message is appended to `warnings`.
ApplianceStateModel fit_states(const std::string& appliance_id,
                               std::span<const Activation> activations,
                               std::size_t k, const StateFitOptions& options = {},
                               std::vector<std::string>* warnings = nullptr);

// Joint state index per time step, one entry per model.
using JointPath = std::vector<std::vector<std::size_t>>;

// Per time step, the joint assignment minimising |aggregate - sum of state
// powers|; ties go to the lowest total power, then lexicographic order.
JointPath co_assign(std::span<const double> aggregate,
                    std::span<const ApplianceStateModel> models);
std::vector<EstimateSeries> co_disaggregate(
    const PowerSeries& aggregate, std::span<const ApplianceStateModel> models);

// Exact Viterbi over the product chain. `log_probability` receives the log
// joint probability of the decoded path.
JointPath fhmm_viterbi(std::span<const double> aggregate,
                       std::span<const ApplianceStateModel> models,
                       double* log_probability = nullptr);
std::vector<EstimateSeries> fhmm_disaggregate(
    const PowerSeries& aggregate, std::span<const ApplianceStateModel> models);

void save_models(const std::filesystem::path& path,
                 std::span<const ApplianceStateModel> models);
std::vector<ApplianceStateModel> load_models(const std::filesystem::path& path);

}  // namespace nilm
