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

#include "nilm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nilm/error.hpp"

namespace nilm {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": length " + std::to_string(a) +
                    " vs " + std::to_string(b));
  }
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

const std::vector<std::string>& MetricsReport::metric_names() {
  static const std::vector<std::string> names{
      "recall",
      "precision",
      "f1",
      "accuracy",
      "relative_error_total_energy",
      "mean_absolute_error",
      "proportion_energy_correct",
  };
  return names;
}

std::vector<double> MetricsReport::values() const {
  return {recall,
          precision,
          f1,
          accuracy,
          relative_error_total_energy,
          mean_absolute_error,
          proportion_energy_correct};
}

std::vector<bool> on_off(std::span<const double> power, double on_threshold) {
  std::vector<bool> out(power.size());
  for (std::size_t i = 0; i < power.size(); ++i) out[i] = power[i] > on_threshold;
  return out;
}

ClassificationScores classification_metrics(const std::vector<bool>& predicted,
                                            const std::vector<bool>& actual) {
  require_same_length(predicted.size(), actual.size(), "classification metrics");
  ClassificationScores s;
  auto& c = s.counts;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && actual[i]) ++c.tp;
    else if (predicted[i]) ++c.fp;
    else if (actual[i]) ++c.fn;
    else ++c.tn;
  }
  const auto tp = static_cast<double>(c.tp);
  s.recall = ratio(tp, static_cast<double>(c.tp + c.fn));
  s.precision = ratio(tp, static_cast<double>(c.tp + c.fp));
  s.f1 = ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
  s.accuracy = ratio(static_cast<double>(c.tp + c.tn),
                     static_cast<double>(c.positives() + c.negatives()));
  return s;
}

double relative_error_total_energy(std::span<const double> predicted,
                                   std::span<const double> actual) {
  require_same_length(predicted.size(), actual.size(), "relative error");
  const double e_hat = std::accumulate(predicted.begin(), predicted.end(), 0.0);
  const double e = std::accumulate(actual.begin(), actual.end(), 0.0);
  return ratio(std::abs(e_hat - e), std::max(e, e_hat));
}

double mean_absolute_error(std::span<const double> predicted,
                           std::span<const double> actual) {
  require_same_length(predicted.size(), actual.size(), "mean absolute error");
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < predicted.size(); ++t)
    sum += std::abs(predicted[t] - actual[t]);
  return sum / static_cast<double>(predicted.size());
}

double proportion_energy_correct(
    std::span<const std::vector<double>> predicted,
    std::span<const std::vector<double>> actual,
    std::span<const double> aggregate) {
  require_same_length(predicted.size(), actual.size(), "appliance count");
  double error = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    require_same_length(predicted[i].size(), aggregate.size(), "estimate");
    require_same_length(actual[i].size(), aggregate.size(), "ground truth");
    for (std::size_t t = 0; t < aggregate.size(); ++t)
      error += std::abs(predicted[i][t] - actual[i][t]);
  }
  const double total = std::accumulate(aggregate.begin(), aggregate.end(), 0.0);
  if (error == 0.0) return 1.0;
  if (!(total > 0.0)) return 0.0;
  return 1.0 - error / (2.0 * total);
}

EnergyScores energy_metrics(std::span<const double> predicted,
                            std::span<const double> actual,
                            std::span<const double> aggregate) {
  EnergyScores s;
  s.relative_error_total_energy = relative_error_total_energy(predicted, actual);
  s.mean_absolute_error = mean_absolute_error(predicted, actual);
  const std::vector<double> p(predicted.begin(), predicted.end());
  const std::vector<double> a(actual.begin(), actual.end());
  s.proportion_energy_correct = proportion_energy_correct(
      std::span<const std::vector<double>>(&p, 1),
      std::span<const std::vector<double>>(&a, 1), aggregate);
  return s;
}

MetricsReport evaluate_estimate(std::span<const double> predicted,
                                std::span<const double> actual,
                                std::span<const double> aggregate,
                                double on_threshold) {
  const auto cls = classification_metrics(on_off(predicted, on_threshold),
                                          on_off(actual, on_threshold));
  const auto energy = energy_metrics(predicted, actual, aggregate);
  MetricsReport r;
  r.counts = cls.counts;
  r.recall = cls.recall;
  r.precision = cls.precision;
  r.f1 = cls.f1;
  r.accuracy = cls.accuracy;
  r.relative_error_total_energy = energy.relative_error_total_energy;
  r.mean_absolute_error = energy.mean_absolute_error;
  r.proportion_energy_correct = energy.proportion_energy_correct;
  return r;
}

}  // namespace nilm
