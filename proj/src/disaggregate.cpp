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

#include "nilm/disaggregate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nilm/error.hpp"

namespace nilm {

void DisaggConfig::validate(std::size_t window_width) const {
  if (stride < 1 || stride > window_width) {
    throw ConfigError("stride " + std::to_string(stride) +
                      " outside [1, " + std::to_string(window_width) + "]");
  }
  if (!(probability_threshold >= 0.0 && probability_threshold <= 1.0)) {
    throw ConfigError("probability threshold must lie in [0, 1]");
  }
  if (power_threshold < 0.0) throw ConfigError("power threshold must be >= 0");
}

NetworkPredictor::NetworkPredictor(const Network& network,
                                   ArchitectureKind kind,
                                   std::size_t window_width)
    : network_(network), kind_(kind), window_width_(window_width) {}

OutputLayout NetworkPredictor::layout() const {
  return output_layout(kind_, window_width_);
}

Tensor NetworkPredictor::predict(const Tensor& inputs,
                                 std::span<const std::ptrdiff_t>) const {
  return network_.forward(inputs);
}

std::vector<std::ptrdiff_t> window_origins(std::size_t length,
                                           std::size_t window_width,
                                           std::size_t stride) {
  std::vector<std::ptrdiff_t> origins;
  if (length == 0) return origins;
  const std::size_t padded = length + 2 * window_width;
  for (std::size_t p = 0; p + window_width <= padded; p += stride) {
    origins.push_back(static_cast<std::ptrdiff_t>(p) -
                      static_cast<std::ptrdiff_t>(window_width));
  }
  return origins;
}

WindowOutputs slide(const WindowPredictor& predictor,
                    const PowerSeries& aggregate, const WindowSpec& spec,
                    const DisaggConfig& config, std::size_t batch_size) {
  spec.validate();
  const std::size_t width = spec.window_width;
  if (predictor.window_width() != width) {
    throw ConfigError("predictor window " +
                      std::to_string(predictor.window_width()) +
                      " differs from spec window " + std::to_string(width));
  }
  config.validate(width);

  WindowOutputs out;
  out.series_length = aggregate.size();
  const auto origins = window_origins(aggregate.size(), width, config.stride);
  const OutputLayout layout = predictor.layout();
  const auto len = static_cast<std::ptrdiff_t>(aggregate.size());

  std::vector<double> raw(width);
  for (std::size_t first = 0; first < origins.size(); first += batch_size) {
    const std::size_t n = std::min(batch_size, origins.size() - first);
    Tensor inputs({n, width, 1});
    for (std::size_t w = 0; w < n; ++w) {
      const std::ptrdiff_t origin = origins[first + w];
      for (std::size_t i = 0; i < width; ++i) {
        const std::ptrdiff_t pos = origin + static_cast<std::ptrdiff_t>(i);
        raw[i] = pos >= 0 && pos < len ? aggregate.values[static_cast<std::size_t>(pos)]
                                       : 0.0;
      }
      const auto standardized = standardize_input(raw, spec.input_std);
      std::copy(standardized.begin(), standardized.end(),
                inputs.data().begin() + static_cast<std::ptrdiff_t>(w * width));
    }
    const std::span<const std::ptrdiff_t> batch_origins(origins.data() + first, n);
    const Tensor pred = predictor.predict(inputs, batch_origins);
    pred.check_finite("window predictions");

    for (std::size_t w = 0; w < n; ++w) {
      const std::ptrdiff_t origin = origins[first + w];
      if (layout.rectangle) {
        RectangleOutput r;
        r.origin = origin;
        r.width = width;
        r.triple = {pred[w * 3 + 0], pred[w * 3 + 1], pred[w * 3 + 2]};
        out.rectangles.push_back(r);
      } else {
        SequenceOutput s;
        s.first_sample = origin + static_cast<std::ptrdiff_t>(layout.offset);
        s.watts.resize(layout.length);
        for (std::size_t i = 0; i < layout.length; ++i)
          s.watts[i] = pred[w * layout.length + i] * spec.max_power;
        out.sequences.push_back(std::move(s));
      }
    }
  }
  return out;
}

namespace {

EstimateSeries empty_estimate(const PowerSeries& grid, std::size_t length) {
  EstimateSeries e;
  e.power.start_time = grid.start_time;
  e.power.sample_period = grid.sample_period;
  e.power.values.assign(length, 0.0);
  return e;
}

}  // namespace

EstimateSeries combine_mean(const WindowOutputs& outputs,
                            const PowerSeries& grid) {
  const std::size_t length = outputs.series_length;
  EstimateSeries e = empty_estimate(grid, length);
  std::vector<double> sum(length, 0.0);
  std::vector<std::size_t> count(length, 0);
  const auto len = static_cast<std::ptrdiff_t>(length);
  for (const SequenceOutput& s : outputs.sequences) {
    for (std::size_t i = 0; i < s.watts.size(); ++i) {
      const std::ptrdiff_t pos = s.first_sample + static_cast<std::ptrdiff_t>(i);
      if (pos < 0 || pos >= len) continue;
      sum[static_cast<std::size_t>(pos)] += s.watts[i];
      ++count[static_cast<std::size_t>(pos)];
    }
  }
  for (std::size_t t = 0; t < length; ++t) {
    if (count[t] == 0) continue;
    e.power.values[t] = std::max(0.0, sum[t] / static_cast<double>(count[t]));
  }
  return e;
}

std::optional<DecodedRectangle> decode_rectangle(const RectangleTriple& triple,
                                                 std::ptrdiff_t window_origin,
                                                 std::size_t window_width,
                                                 double max_power) {
  const auto width = static_cast<double>(window_width);
  const auto start = static_cast<std::ptrdiff_t>(
      std::llround(std::clamp(triple.start, 0.0, 1.0) * width));
  const auto end = static_cast<std::ptrdiff_t>(
      std::llround(std::clamp(triple.end, 0.0, 1.0) * width));
  if (end <= start) return std::nullopt;
  return DecodedRectangle{window_origin + start, window_origin + end,
                          std::clamp(triple.height, 0.0, 1.0) * max_power};
}

EstimateSeries combine_rectangles(const WindowOutputs& outputs,
                                  const PowerSeries& grid, double max_power,
                                  const DisaggConfig& config) {
  const std::size_t length = outputs.series_length;
  EstimateSeries e = empty_estimate(grid, length);
  e.probability.assign(length, 0.0);
  std::vector<std::size_t> windows(length, 0);
  std::vector<std::size_t> rects(length, 0);
  std::vector<double> height(length, 0.0);
  const auto len = static_cast<std::ptrdiff_t>(length);

  auto clip = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
    return std::pair{std::max<std::ptrdiff_t>(a, 0), std::min(b, len)};
  };

  for (const RectangleOutput& r : outputs.rectangles) {
    const auto [w0, w1] =
        clip(r.origin, r.origin + static_cast<std::ptrdiff_t>(r.width));
    for (auto t = w0; t < w1; ++t) ++windows[static_cast<std::size_t>(t)];

    const auto decoded = decode_rectangle(r.triple, r.origin, r.width, max_power);
    if (!decoded || !(decoded->watts > config.power_threshold)) continue;
    const auto [r0, r1] = clip(decoded->start_sample, decoded->end_sample);
    for (auto t = r0; t < r1; ++t) {
      ++rects[static_cast<std::size_t>(t)];
      height[static_cast<std::size_t>(t)] += decoded->watts;
    }
  }

  for (std::size_t t = 0; t < length; ++t) {
    if (windows[t] == 0) continue;
    const double p =
        static_cast<double>(rects[t]) / static_cast<double>(windows[t]);
    e.probability[t] = p;
    if (rects[t] == 0) continue;
    const double watts = height[t] / static_cast<double>(rects[t]);
    if (p >= config.probability_threshold && watts >= config.power_threshold)
      e.power.values[t] = watts;
  }
  return e;
}

EstimateSeries disaggregate(const WindowPredictor& predictor,
                            const PowerSeries& aggregate,
                            const WindowSpec& spec, const DisaggConfig& config) {
  const WindowOutputs outputs = slide(predictor, aggregate, spec, config);
  if (predictor.layout().rectangle) {
    return combine_rectangles(outputs, aggregate, spec.max_power, config);
  }
  return combine_mean(outputs, aggregate);
}

void save_estimate_csv(const std::filesystem::path& path,
                       const EstimateSeries& estimate) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const bool with_probability = !estimate.probability.empty();
  out << (with_probability ? "timestamp,estimated_watts,probability\n"
                           : "timestamp,estimated_watts\n");
  out << std::setprecision(10);
  for (std::size_t i = 0; i < estimate.power.size(); ++i) {
    out << estimate.power.timestamp(i) << ',' << estimate.power.values[i];
    if (with_probability) out << ',' << estimate.probability[i];
    out << '\n';
  }
}

EstimateSeries load_estimate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  EstimateSeries e;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::int64_t> stamps;
  bool with_probability = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("timestamp")) {
      with_probability = line.find("probability") != std::string::npos;
      continue;
    }
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    try {
      stamps.push_back(std::stoll(a));
      e.power.values.push_back(std::stod(b));
      if (with_probability) e.probability.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw DataError("malformed estimate row at line " + std::to_string(line_no));
    }
  }
  if (!stamps.empty()) e.power.start_time = stamps.front();
  if (stamps.size() > 1) e.power.sample_period = stamps[1] - stamps[0];
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    if (stamps[i] - stamps[i - 1] != e.power.sample_period) {
      throw DataError("estimate grid is not uniform at timestamp " +
                      std::to_string(stamps[i]));
    }
  }
  return e;
}

}  // namespace nilm
