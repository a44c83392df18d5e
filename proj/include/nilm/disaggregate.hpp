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
#include <optional>
#include <span>
#include <vector>

#include "nilm/architectures.hpp"
#include "nilm/datagen.hpp"
#include "nilm/network.hpp"
#include "nilm/timeseries.hpp"

namespace nilm {

struct DisaggConfig {
  std::size_t stride = 16;             // samples between window starts
  double power_threshold = 0.0;        // watts
  double probability_threshold = 0.5;  // fraction of covering windows

  // Throws ConfigError unless 1 <= stride <= window_width and the
  // probability threshold lies in [0, 1].
  void validate(std::size_t window_width) const;
};

// Estimated appliance power on the aggregate's grid. `probability` is filled
// only by the rectangles path.
struct EstimateSeries {
  PowerSeries power;
  std::vector<double> probability;

  friend bool operator==(const EstimateSeries&, const EstimateSeries&) = default;
};

// Maps standardised windows to scaled outputs. `origins` holds the absolute
// sample index of each window start; padding windows have negative origins.
class WindowPredictor {
 public:
  virtual ~WindowPredictor() = default;
  virtual std::size_t window_width() const = 0;
  virtual OutputLayout layout() const = 0;
  // inputs [n, W, 1]; returns [n, layout.length, 1] or [n, 3].
  virtual Tensor predict(const Tensor& inputs,
                         std::span<const std::ptrdiff_t> origins) const = 0;
};

class NetworkPredictor final : public WindowPredictor {
 public:
  NetworkPredictor(const Network& network, ArchitectureKind kind,
                   std::size_t window_width);
  std::size_t window_width() const override { return window_width_; }
  OutputLayout layout() const override;
  Tensor predict(const Tensor& inputs,
                 std::span<const std::ptrdiff_t> origins) const override;

 private:
  const Network& network_;
  ArchitectureKind kind_;
  std::size_t window_width_;
};

struct SequenceOutput {
  std::ptrdiff_t first_sample = 0;  // absolute index of watts[0]
  std::vector<double> watts;
};

struct RectangleOutput {
  std::ptrdiff_t origin = 0;
  std::size_t width = 0;
  RectangleTriple triple;
};

struct WindowOutputs {
  std::size_t series_length = 0;
  std::vector<SequenceOutput> sequences;
  std::vector<RectangleOutput> rectangles;
};

// Window start positions (absolute, may be negative) for a series of
// `length` samples padded by one window of zeros at each end.
std::vector<std::ptrdiff_t> window_origins(std::size_t length,
                                           std::size_t window_width,
                                           std::size_t stride);

// Runs the predictor over every padded, strided window. Inputs are
// standardised with spec.input_std; sequence outputs are multiplied back by
// spec.max_power.
WindowOutputs slide(const WindowPredictor& predictor,
                    const PowerSeries& aggregate, const WindowSpec& spec,
                    const DisaggConfig& config, std::size_t batch_size = 256);

// Per-sample mean of every sequence output covering it; negative means are
// clipped to zero and uncovered samples are zero.
EstimateSeries combine_mean(const WindowOutputs& outputs,
                            const PowerSeries& grid);

struct DecodedRectangle {
  std::ptrdiff_t start_sample = 0;  // inclusive
  std::ptrdiff_t end_sample = 0;    // exclusive
  double watts = 0.0;

  friend bool operator==(const DecodedRectangle&, const DecodedRectangle&) = default;
};

// Fields are clamped to [0, 1]; spans that are empty after rounding are
// discarded.
std::optional<DecodedRectangle> decode_rectangle(const RectangleTriple& triple,
                                                 std::ptrdiff_t window_origin,
                                                 std::size_t window_width,
                                                 double max_power);

// Overlays the decoded rectangles: probability = covering rectangles /
// covering windows, power = mean rectangle height in watts, output power
// where probability >= probability_threshold and power >= power_threshold.
EstimateSeries combine_rectangles(const WindowOutputs& outputs,
                                  const PowerSeries& grid, double max_power,
                                  const DisaggConfig& config);

// slide followed by the combination matching the predictor's layout.
EstimateSeries disaggregate(const WindowPredictor& predictor,
                            const PowerSeries& aggregate,
                            const WindowSpec& spec, const DisaggConfig& config);

// CSV `timestamp,estimated_watts[,probability]`.
void save_estimate_csv(const std::filesystem::path& path,
                       const EstimateSeries& estimate);
// Reads either form back; the probability column is optional.
EstimateSeries load_estimate_csv(const std::filesystem::path& path);

}  // namespace nilm
