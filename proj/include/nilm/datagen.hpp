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

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "nilm/timeseries.hpp"

namespace nilm {

using Rng = std::mt19937_64;

struct WindowSpec {
  std::string appliance_id;
  std::size_t window_width = 0;  // samples
  double max_power = 0.0;        // watts, target scaling divisor
  double input_std = 1.0;        // watts, dataset-level input scale

  void validate() const;
};

// Start/end as fractions of the window, height as a fraction of max_power.
// All zero when the window holds no target activation.
struct RectangleTriple {
  double start = 0.0;
  double end = 0.0;
  double height = 0.0;

  bool empty() const { return start == 0.0 && end == 0.0 && height == 0.0; }
  friend bool operator==(const RectangleTriple&, const RectangleTriple&) = default;
};

enum class TargetEncoding { sequence, rectangle };

struct TrainingPair {
  std::vector<double> input;  // standardised aggregate window
  std::variant<std::vector<double>, RectangleTriple> target;

  const std::vector<double>& target_sequence() const {
    return std::get<std::vector<double>>(target);
  }
  const RectangleTriple& target_rectangle() const {
    return std::get<RectangleTriple>(target);
  }
};

// Where one activation landed inside a window. Offsets may be negative for
// distractors that only partially overlap the window.
struct Placement {
  std::string appliance;
  int house = 0;
  std::ptrdiff_t offset = 0;
  std::size_t length = 0;
  bool is_target = false;
};

// A window in watts before standardisation and scaling.
struct RawWindow {
  std::vector<double> aggregate;
  std::vector<double> target;
  std::vector<Placement> placements;
  bool synthetic = false;
  std::size_t source_start = 0;  // real windows: index into the house series
  int house = 0;
};

struct LabelledActivation {
  int house = 0;
  Activation activation;
};

enum class HouseRole { train, test };

// Activations per appliance class, tagged by house, with a per-appliance
// train/test house assignment. A house may not hold both roles for the same
// appliance.
class ActivationLibrary {
 public:
  void add(const std::string& appliance, int house,
           std::vector<Activation> activations);
  void assign_houses(const std::string& appliance, std::set<int> train,
                     std::set<int> test);

  std::vector<std::string> appliances() const;
  bool contains(const std::string& appliance) const;
  // Activations of `appliance` from houses holding `role`.
  std::vector<const LabelledActivation*> partition(const std::string& appliance,
                                                   HouseRole role) const;
  const std::set<int>& houses(const std::string& appliance,
                              HouseRole role) const;
  std::size_t count(const std::string& appliance, int house) const;

 private:
  struct Entry {
    std::vector<LabelledActivation> activations;
    std::set<int> train;
    std::set<int> test;
  };
  std::map<std::string, Entry> entries_;
};

// ------------------------------------------------------------ real windows

// One house: its aggregate and the target appliance's activations, indexed
// against the same grid.
struct HouseData {
  int house = 0;
  PowerSeries aggregate;
  std::vector<Activation> target_activations;
};

// Window of `aggregate` starting at `start` with the target built from the
// first target activation fully inside the window (or, when none is, the
// truncated activation overlapping the window start).
RawWindow window_at(const HouseData& house, std::size_t start,
                    std::size_t window_width);

// Places `activation_index` at `offset` samples into the window. Activations
// longer than the window are truncated at offset 0.
RawWindow window_with_activation(const HouseData& house,
                                 std::size_t activation_index,
                                 std::size_t offset, std::size_t window_width);

// Uniformly random window that overlaps no target activation. Throws
// DataError if the house has none.
RawWindow window_without_target(const HouseData& house,
                                std::size_t window_width, Rng& rng);

// With probability 0.5 a target-free window, otherwise a random activation
// placed uniformly so it is fully contained.
RawWindow select_real_window(const HouseData& house, const WindowSpec& spec,
                             Rng& rng);

// ------------------------------------------------------------ synthesis

struct SynthesisOptions {
  double target_probability = 0.5;
  double distractor_probability = 0.25;
};

// Sum of randomly drawn training activations: the target class fully inside
// the window, each other class anywhere with partial overlap allowed.
RawWindow synthesize_aggregate(const ActivationLibrary& library,
                               const std::string& target_class,
                               const WindowSpec& spec, Rng& rng,
                               const SynthesisOptions& options = {});

// ------------------------------------------------------------ scaling

// (window - mean(window)) / input_std.
std::vector<double> standardize_input(std::span<const double> window,
                                      double input_std);

// Population std of the pooled samples of `sample_count` windows drawn with
// replacement. Throws DataError on zero variance.
double estimate_input_std(std::span<const std::vector<double>> windows,
                          std::size_t sample_count, Rng& rng);

// window / max_power clipped to [0, 1].
std::vector<double> scale_target(std::span<const double> window,
                                 double max_power);

// (first nonzero / W, (last nonzero + 1) / W, mean over that span).
RectangleTriple encode_rectangle(std::span<const double> target,
                                 const WindowSpec& spec);

TrainingPair make_training_pair(const RawWindow& raw, const WindowSpec& spec,
                                TargetEncoding encoding);

// ------------------------------------------------------------ batches

// Infinite source of raw windows.
class WindowSource {
 public:
  virtual ~WindowSource() = default;
  virtual RawWindow draw(Rng& rng) const = 0;
};

class RealWindowSource final : public WindowSource {
 public:
  RealWindowSource(std::vector<HouseData> houses, WindowSpec spec);
  RawWindow draw(Rng& rng) const override;
  const std::vector<HouseData>& houses() const { return houses_; }

 private:
  std::vector<HouseData> houses_;
  WindowSpec spec_;
};

class SyntheticWindowSource final : public WindowSource {
 public:
  SyntheticWindowSource(std::shared_ptr<const ActivationLibrary> library,
                        std::string target_class, WindowSpec spec,
                        SynthesisOptions options = {});
  RawWindow draw(Rng& rng) const override;

 private:
  std::shared_ptr<const ActivationLibrary> library_;
  std::string target_class_;
  WindowSpec spec_;
  SynthesisOptions options_;
};

struct Batch {
  std::vector<TrainingPair> pairs;
  std::vector<RawWindow> raw;  // same order; kept for audits
};

// Deterministic 50:50 mix: the first batch_size / 2 pairs come from the real
// source, the rest from the synthetic source.
class BatchStream {
 public:
  BatchStream(std::shared_ptr<const WindowSource> real,
              std::shared_ptr<const WindowSource> synthetic, WindowSpec spec,
              TargetEncoding encoding, std::size_t batch_size,
              std::uint64_t seed);

  Batch next();
  std::size_t batch_size() const { return batch_size_; }
  const WindowSpec& spec() const { return spec_; }

 private:
  std::shared_ptr<const WindowSource> real_;
  std::shared_ptr<const WindowSource> synthetic_;
  WindowSpec spec_;
  TargetEncoding encoding_;
  std::size_t batch_size_;
  Rng rng_;
};

// Runs a BatchStream on a producer thread, keeping up to `depth` batches
// ready. The stream (and its random state) is owned by the producer; batches
// come out in generation order, so results match the unthreaded stream.
class PrefetchingBatchStream {
 public:
  PrefetchingBatchStream(BatchStream stream, std::size_t depth = 2);
  ~PrefetchingBatchStream();
  PrefetchingBatchStream(const PrefetchingBatchStream&) = delete;
  PrefetchingBatchStream& operator=(const PrefetchingBatchStream&) = delete;

  Batch next();

 private:
  void run();

  BatchStream stream_;
  std::size_t depth_;
  std::deque<Batch> ready_;
  std::exception_ptr error_;
  bool stop_ = false;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::thread worker_;
};

}  // namespace nilm
