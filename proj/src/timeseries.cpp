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

#include "nilm/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include "nilm/error.hpp"

namespace nilm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

void PowerSeries::validate() const {
  if (sample_period <= 0) throw DataError("sample period must be positive");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw DataError("invalid power value at sample " + std::to_string(i));
    }
  }
}

void ActivationParams::validate() const {
  if (max_power < 0 || on_power_threshold < 0 || min_on_duration < 0 ||
      min_off_duration < 0) {
    throw ConfigError("activation parameters must be non-negative");
  }
  if (on_power_threshold > max_power) {
    throw ConfigError("on_power_threshold exceeds max_power");
  }
}

std::vector<TimedSample> read_power_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<TimedSample> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (line_no == 1 && view.starts_with("timestamp")) continue;

    const auto comma = view.find(',');
    TimedSample row;
    if (comma == std::string_view::npos ||
        !parse_number(view.substr(0, comma), row.timestamp) ||
        !parse_number(view.substr(comma + 1), row.watts)) {
      throw DataError("malformed row at line " + std::to_string(line_no) +
                      " of " + path.string());
    }
    if (!std::isfinite(row.watts)) {
      throw DataError("non-finite power at line " + std::to_string(line_no));
    }
    if (row.watts < 0.0) {
      throw DataError("negative power at line " + std::to_string(line_no));
    }
    if (!rows.empty() && row.timestamp <= rows.back().timestamp) {
      throw DataError("non-increasing timestamp at line " +
                      std::to_string(line_no));
    }
    rows.push_back(row);
  }
  return rows;
}

PowerSeries load_csv(const std::filesystem::path& path,
                     std::int64_t sample_period,
                     std::int64_t max_forward_fill) {
  const auto rows = read_power_csv(path);
  return fill_gaps(rows, sample_period, max_forward_fill);
}

void save_csv(const std::filesystem::path& path, const PowerSeries& series) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "timestamp,watts\n" << std::setprecision(10);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.timestamp(i) << ',' << series.values[i] << '\n';
  }
}

PowerSeries fill_gaps(std::span<const TimedSample> samples,
                      std::int64_t sample_period,
                      std::int64_t max_forward_fill) {
  if (sample_period <= 0) throw ConfigError("sample period must be positive");
  PowerSeries out;
  out.sample_period = sample_period;
  if (samples.empty()) return out;

  const std::int64_t origin = samples.front().timestamp;
  out.start_time = origin;

  auto slot_of = [&](std::int64_t t) {
    const double rel = static_cast<double>(t - origin) /
                       static_cast<double>(sample_period);
    return static_cast<std::size_t>(std::llround(rel));
  };

  const std::size_t slots = slot_of(samples.back().timestamp) + 1;
  std::vector<double> values(slots, 0.0);
  std::vector<bool> present(slots, false);
  for (const auto& s : samples) {
    const std::size_t slot = slot_of(s.timestamp);
    values[slot] = s.watts;
    present[slot] = true;
  }

  std::size_t last = 0;  // slot 0 is always present
  for (std::size_t slot = 1; slot < slots; ++slot) {
    if (!present[slot]) continue;
    const std::size_t missing = slot - last - 1;
    if (missing > 0) {
      const auto gap_seconds = static_cast<std::int64_t>(missing) * sample_period;
      const double fill = gap_seconds <= max_forward_fill ? values[last] : 0.0;
      std::fill(values.begin() + static_cast<std::ptrdiff_t>(last + 1),
                values.begin() + static_cast<std::ptrdiff_t>(slot), fill);
    }
    last = slot;
  }
  out.values = std::move(values);
  return out;
}

PowerSeries resample(const PowerSeries& series, std::int64_t target_period) {
  if (target_period <= 0 || series.sample_period <= 0 ||
      target_period % series.sample_period != 0) {
    throw ConfigError("unsupported resampling ratio: " +
                      std::to_string(target_period) + " s from " +
                      std::to_string(series.sample_period) + " s");
  }
  const auto ratio = static_cast<std::size_t>(target_period / series.sample_period);
  PowerSeries out;
  out.start_time = series.start_time;
  out.sample_period = target_period;
  if (ratio == 1) {
    out.values = series.values;
    return out;
  }
  const std::size_t bins = series.size() / ratio;
  out.values.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < ratio; ++j) sum += series.values[b * ratio + j];
    out.values[b] = sum / static_cast<double>(ratio);
  }
  return out;
}

std::vector<Activation> extract_activations(const PowerSeries& series,
                                            const ActivationParams& params) {
  struct Run {
    std::size_t begin;
    std::size_t end;  // exclusive
  };

  std::vector<Run> runs;
  const auto& v = series.values;
  for (std::size_t i = 0; i < v.size();) {
    if (v[i] > params.on_power_threshold) {
      std::size_t j = i;
      while (j < v.size() && v[j] > params.on_power_threshold) ++j;
      runs.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }

  const auto period = static_cast<double>(series.sample_period);
  std::vector<Run> merged;
  for (const Run& run : runs) {
    if (!merged.empty()) {
      const double off_seconds =
          static_cast<double>(run.begin - merged.back().end) * period;
      if (off_seconds < params.min_off_duration) {
        merged.back().end = run.end;
        continue;
      }
    }
    merged.push_back(run);
  }

  std::vector<Activation> activations;
  for (const Run& run : merged) {
    const double on_seconds = static_cast<double>(run.end - run.begin) * period;
    if (on_seconds < params.min_on_duration) continue;
    Activation act;
    act.source_offset = run.begin;
    act.values.assign(v.begin() + static_cast<std::ptrdiff_t>(run.begin),
                      v.begin() + static_cast<std::ptrdiff_t>(run.end));
    for (double& x : act.values) x = std::min(x, params.max_power);
    activations.push_back(std::move(act));
  }
  return activations;
}

}  // namespace nilm
