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
#include <span>
#include <string>
#include <vector>

namespace nilm {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t positives() const { return tp + fn; }
  std::size_t negatives() const { return tn + fp; }
};

struct ClassificationScores {
  ConfusionCounts counts;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

struct EnergyScores {
  double relative_error_total_energy = 0.0;
  double mean_absolute_error = 0.0;  // watts
  double proportion_energy_correct = 0.0;
};

// The seven scores for one appliance estimate.
struct MetricsReport {
  ConfusionCounts counts;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double relative_error_total_energy = 0.0;
  double mean_absolute_error = 0.0;
  double proportion_energy_correct = 0.0;

  static const std::vector<std::string>& metric_names();
  // Values in metric_names() order.
  std::vector<double> values() const;
};

// On iff power > threshold.
std::vector<bool> on_off(std::span<const double> power, double on_threshold);

// Undefined ratios (zero denominators) are reported as 0.
ClassificationScores classification_metrics(const std::vector<bool>& predicted,
                                            const std::vector<bool>& actual);

// |E_hat - E| / max(E, E_hat) on power sums; 0 when both are zero.
double relative_error_total_energy(std::span<const double> predicted,
                                   std::span<const double> actual);
double mean_absolute_error(std::span<const double> predicted,
                           std::span<const double> actual);
// 1 - sum_t sum_i |y_hat - y| / (2 sum_t aggregate_t), over all appliances i.
// Not clamped: gross over-prediction can make it negative.
double proportion_energy_correct(
    std::span<const std::vector<double>> predicted,
    std::span<const std::vector<double>> actual,
    std::span<const double> aggregate);

// Single-appliance energy scores.
EnergyScores energy_metrics(std::span<const double> predicted,
                            std::span<const double> actual,
                            std::span<const double> aggregate);

MetricsReport evaluate_estimate(std::span<const double> predicted,
                                std::span<const double> actual,
                                std::span<const double> aggregate,
                                double on_threshold);

}  // namespace nilm
