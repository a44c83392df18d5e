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
#include <span>
#include <vector>

namespace nilm {

inline constexpr std::int64_t kDefaultSamplePeriod = 6;
inline constexpr std::int64_t kMaxForwardFillSeconds = 180;

// Uniformly sampled power demand in watts. Sample i is taken at
// start_time + i * sample_period (seconds since epoch).
struct PowerSeries {
  std::int64_t start_time = 0;
  std::int64_t sample_period = kDefaultSamplePeriod;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  std::int64_t timestamp(std::size_t i) const {
    return start_time + static_cast<std::int64_t>(i) * sample_period;
  }

  // Throws DataError if the period is not positive or any value is negative
  // or non-finite.
  void validate() const;

  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;
};

// One raw (timestamp, watts) row, before snapping to a grid.
struct TimedSample {
  std::int64_t timestamp = 0;
  double watts = 0.0;
};

// Thresholds handed to activation extraction for one appliance class.
struct ActivationParams {
  double max_power = 0.0;           // watts
  double on_power_threshold = 0.0;  // watts
  double min_on_duration = 0.0;     // seconds
  double min_off_duration = 0.0;    // seconds

  void validate() const;
};

// One complete appliance cycle cut out of a PowerSeries.
struct Activation {
  std::size_t source_offset = 0;  // sample index into the source series
  std::vector<double> values;     // watts, clipped to max_power

  std::size_t size() const { return values.size(); }
  std::size_t end_offset() const { return source_offset + values.size(); }

  friend bool operator==(const Activation&, const Activation&) = default;
};

// Reads `timestamp,watts` rows. The header line is optional. Errors name the
// offending 1-based line: malformed rows, negative or non-finite power and
// non-increasing timestamps all raise DataError.
std::vector<TimedSample> read_power_csv(const std::filesystem::path& path);

// Reads a channel CSV and places it on the uniform grid via fill_gaps.
// An empty file yields an empty series with the given period.
PowerSeries load_csv(const std::filesystem::path& path,
                     std::int64_t sample_period = kDefaultSamplePeriod,
                     std::int64_t max_forward_fill = kMaxForwardFillSeconds);

// Writes `timestamp,watts` with the header line.
void save_csv(const std::filesystem::path& path, const PowerSeries& series);

// Snaps samples onto a grid anchored at the first timestamp (nearest slot,
// later rows win on collision) and fills missing slots: a run of missing
// slots lasting at most max_forward_fill seconds repeats the previous value,
// longer runs are zero.
PowerSeries fill_gaps(std::span<const TimedSample> samples,
                      std::int64_t sample_period = kDefaultSamplePeriod,
                      std::int64_t max_forward_fill = kMaxForwardFillSeconds);

// Bin-mean downsampling. target_period must be a positive multiple of the
// series period; a partial trailing bin is dropped.
PowerSeries resample(const PowerSeries& series, std::int64_t target_period);

// Runs of samples strictly above on_power_threshold, merged across
// sub-threshold stretches shorter than min_off_duration, dropped when shorter
// than min_on_duration and clipped at max_power. Chronological order.
std::vector<Activation> extract_activations(const PowerSeries& series,
                                            const ActivationParams& params);

}  // namespace nilm
