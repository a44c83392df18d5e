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

#include "nilm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nilm/error.hpp"

namespace nilm {

void WindowSpec::validate() const {
  if (window_width == 0) throw ConfigError("window_width must be positive");
  if (!(max_power > 0.0)) throw ConfigError("max_power must be positive");
  if (!(input_std > 0.0)) throw ConfigError("input_std must be positive");
}

// ------------------------------------------------------------ library

void ActivationLibrary::add(const std::string& appliance, int house,
                            std::vector<Activation> activations) {
  auto& entry = entries_[appliance];
  for (auto& a : activations)
    entry.activations.push_back({house, std::move(a)});
}

void ActivationLibrary::assign_houses(const std::string& appliance,
                                      std::set<int> train, std::set<int> test) {
  for (int h : train) {
    if (test.contains(h)) {
      throw ConfigError("house " + std::to_string(h) +
                        " assigned to both train and test for " + appliance);
    }
  }
  auto& entry = entries_[appliance];
  entry.train = std::move(train);
  entry.test = std::move(test);
}

std::vector<std::string> ActivationLibrary::appliances() const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

bool ActivationLibrary::contains(const std::string& appliance) const {
  return entries_.contains(appliance);
}

std::vector<const LabelledActivation*> ActivationLibrary::partition(
    const std::string& appliance, HouseRole role) const {
  std::vector<const LabelledActivation*> out;
  const auto it = entries_.find(appliance);
  if (it == entries_.end()) return out;
  const auto& houses = role == HouseRole::train ? it->second.train
                                                : it->second.test;
  for (const auto& la : it->second.activations)
    if (houses.contains(la.house)) out.push_back(&la);
  return out;
}

const std::set<int>& ActivationLibrary::houses(const std::string& appliance,
                                               HouseRole role) const {
  const auto& entry = entries_.at(appliance);
  return role == HouseRole::train ? entry.train : entry.test;
}

std::size_t ActivationLibrary::count(const std::string& appliance,
                                     int house) const {
  const auto it = entries_.find(appliance);
  if (it == entries_.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.activations.begin(), it->second.activations.end(),
                    [&](const LabelledActivation& la) { return la.house == house; }));
}

// ------------------------------------------------------------ real windows

RawWindow window_at(const HouseData& house, std::size_t start,
                    std::size_t window_width) {
  const auto& agg = house.aggregate.values;
  if (start + window_width > agg.size()) {
    throw DataError("window [" + std::to_string(start) + ", " +
                    std::to_string(start + window_width) +
                    ") exceeds aggregate of length " + std::to_string(agg.size()));
  }
  RawWindow w;
  w.house = house.house;
  w.source_start = start;
  w.aggregate.assign(agg.begin() + static_cast<std::ptrdiff_t>(start),
                     agg.begin() + static_cast<std::ptrdiff_t>(start + window_width));
  w.target.assign(window_width, 0.0);

  const std::size_t end = start + window_width;
  for (const Activation& a : house.target_activations) {
    const bool contained = a.source_offset >= start && a.end_offset() <= end;
    const bool oversized = a.size() > window_width && a.source_offset < end &&
                           a.end_offset() > start;
    if (!contained && !oversized) continue;
    Placement p;
    p.house = house.house;
    p.offset = static_cast<std::ptrdiff_t>(a.source_offset) -
               static_cast<std::ptrdiff_t>(start);
    p.length = a.size();
    p.is_target = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::ptrdiff_t pos = p.offset + static_cast<std::ptrdiff_t>(i);
      if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(window_width))
        w.target[static_cast<std::size_t>(pos)] = a.values[i];
    }
    w.placements.push_back(p);
    break;
  }
  return w;
}

RawWindow window_with_activation(const HouseData& house,
                                 std::size_t activation_index,
                                 std::size_t offset, std::size_t window_width) {
  const Activation& a = house.target_activations.at(activation_index);
  if (a.size() > window_width) offset = 0;
  if (offset > a.source_offset) {
    throw DataError("activation cannot sit " + std::to_string(offset) +
                    " samples into a window: it starts at sample " +
                    std::to_string(a.source_offset));
  }
  return window_at(house, a.source_offset - offset, window_width);
}

RawWindow window_without_target(const HouseData& house,
                                std::size_t window_width, Rng& rng) {
  const std::size_t len = house.aggregate.size();
  if (len < window_width) {
    throw DataError("house " + std::to_string(house.house) +
                    " aggregate shorter than the window");
  }
  const std::size_t last_start = len - window_width;

  // Starts in [a - W + 1, e - 1] overlap activation [a, e).
  std::vector<std::pair<std::size_t, std::size_t>> blocked;
  for (const Activation& a : house.target_activations) {
    const std::size_t lo =
        a.source_offset + 1 > window_width ? a.source_offset + 1 - window_width : 0;
    const std::size_t hi = a.end_offset() - 1;
    blocked.emplace_back(lo, hi);
  }
  std::sort(blocked.begin(), blocked.end());

  std::vector<std::pair<std::size_t, std::size_t>> free;  // inclusive ranges
  std::size_t cursor = 0;
  for (const auto& [lo, hi] : blocked) {
    if (cursor > last_start) break;
    if (lo > cursor) free.emplace_back(cursor, std::min(lo - 1, last_start));
    cursor = std::max(cursor, hi + 1);
  }
  if (cursor <= last_start) free.emplace_back(cursor, last_start);

  std::size_t total = 0;
  for (const auto& [lo, hi] : free) total += hi - lo + 1;
  if (total == 0) {
    throw DataError("house " + std::to_string(house.house) +
                    " has no window free of target activations");
  }
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  std::size_t k = pick(rng);
  for (const auto& [lo, hi] : free) {
    const std::size_t n = hi - lo + 1;
    if (k < n) return window_at(house, lo + k, window_width);
    k -= n;
  }
  throw DataError("unreachable: free window index out of range");
}

RawWindow select_real_window(const HouseData& house, const WindowSpec& spec,
                             Rng& rng) {
  std::bernoulli_distribution include(0.5);
  const std::size_t width = spec.window_width;
  if (!include(rng) || house.target_activations.empty()) {
    return window_without_target(house, width, rng);
  }

  std::uniform_int_distribution<std::size_t> pick(
      0, house.target_activations.size() - 1);
  const std::size_t index = pick(rng);
  const Activation& a = house.target_activations[index];
  const std::size_t len = house.aggregate.size();
  if (len < width) throw DataError("aggregate shorter than the window");
  if (a.size() >= width) {
    if (a.source_offset + width > len) {
      throw DataError("oversized activation runs past the aggregate end");
    }
    return window_with_activation(house, index, 0, width);
  }
  // Offset k keeps the activation inside the window and the window inside
  // the aggregate.
  const std::size_t lo =
      a.source_offset + width > len ? a.source_offset + width - len : 0;
  const std::size_t hi = std::min(width - a.size(), a.source_offset);
  if (lo > hi) throw DataError("activation cannot be placed inside a window");
  std::uniform_int_distribution<std::size_t> offset(lo, hi);
  return window_with_activation(house, index, offset(rng), width);
}

// ------------------------------------------------------------ synthesis

RawWindow synthesize_aggregate(const ActivationLibrary& library,
                               const std::string& target_class,
                               const WindowSpec& spec, Rng& rng,
                               const SynthesisOptions& options) {
  if (!library.contains(target_class)) {
    throw ConfigError("activation library has no class '" + target_class + "'");
  }
  const std::size_t width = spec.window_width;
  const auto w = static_cast<std::ptrdiff_t>(width);
  RawWindow out;
  out.synthetic = true;
  out.aggregate.assign(width, 0.0);
  out.target.assign(width, 0.0);

  for (const std::string& cls : library.appliances()) {
    const bool is_target = cls == target_class;
    std::bernoulli_distribution draw(is_target ? options.target_probability
                                               : options.distractor_probability);
    if (!draw(rng)) continue;
    const auto pool = library.partition(cls, HouseRole::train);
    if (pool.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const LabelledActivation& la = *pool[pick(rng)];
    const auto n = static_cast<std::ptrdiff_t>(la.activation.size());

    std::ptrdiff_t offset = 0;
    if (is_target) {
      if (n <= w) {
        std::uniform_int_distribution<std::ptrdiff_t> at(0, w - n);
        offset = at(rng);
      }
    } else {
      std::uniform_int_distribution<std::ptrdiff_t> at(-(n - 1), w - 1);
      offset = at(rng);
    }

    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t pos = offset + i;
      if (pos < 0 || pos >= w) continue;
      const double v = la.activation.values[static_cast<std::size_t>(i)];
      out.aggregate[static_cast<std::size_t>(pos)] += v;
      if (is_target) out.target[static_cast<std::size_t>(pos)] += v;
    }
    out.placements.push_back({cls, la.house, offset,
                              static_cast<std::size_t>(n), is_target});
  }
  return out;
}

// ------------------------------------------------------------ scaling

std::vector<double> standardize_input(std::span<const double> window,
                                      double input_std) {
  if (!(input_std > 0.0)) throw ConfigError("input_std must be positive");
  std::vector<double> out(window.begin(), window.end());
  if (out.empty()) return out;
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) /
                      static_cast<double>(out.size());
  for (double& v : out) v = (v - mean) / input_std;
  return out;
}

double estimate_input_std(std::span<const std::vector<double>> windows,
                          std::size_t sample_count, Rng& rng) {
  if (windows.empty() || sample_count == 0) {
    throw DataError("no windows available to estimate the input std");
  }
  std::uniform_int_distribution<std::size_t> pick(0, windows.size() - 1);
  std::vector<std::size_t> chosen(sample_count);
  for (auto& c : chosen) c = pick(rng);

  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c : chosen) {
    for (double v : windows[c]) sum += v;
    n += windows[c].size();
  }
  if (n == 0) throw DataError("sampled windows are empty");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t c : chosen)
    for (double v : windows[c]) ss += (v - mean) * (v - mean);
  const double std = std::sqrt(ss / static_cast<double>(n));
  if (!(std > 0.0)) throw DataError("zero variance in sampled training windows");
  return std;
}

std::vector<double> scale_target(std::span<const double> window,
                                 double max_power) {
  if (!(max_power > 0.0)) throw ConfigError("max_power must be positive");
  std::vector<double> out(window.size());
  for (std::size_t i = 0; i < window.size(); ++i)
    out[i] = std::clamp(window[i] / max_power, 0.0, 1.0);
  return out;
}

RectangleTriple encode_rectangle(std::span<const double> target,
                                 const WindowSpec& spec) {
  const auto first = std::find_if(target.begin(), target.end(),
                                  [](double v) { return v > 0.0; });
  if (first == target.end()) return {};
  const auto last = std::find_if(target.rbegin(), target.rend(),
                                 [](double v) { return v > 0.0; });
  const auto begin = static_cast<std::size_t>(first - target.begin());
  const auto end = target.size() - static_cast<std::size_t>(last - target.rbegin());
  const double sum = std::accumulate(target.begin() + static_cast<std::ptrdiff_t>(begin),
                                     target.begin() + static_cast<std::ptrdiff_t>(end),
                                     0.0);
  const auto width = static_cast<double>(spec.window_width);
  return {static_cast<double>(begin) / width, static_cast<double>(end) / width,
          sum / static_cast<double>(end - begin)};
}

TrainingPair make_training_pair(const RawWindow& raw, const WindowSpec& spec,
                                TargetEncoding encoding) {
  TrainingPair pair;
  pair.input = standardize_input(raw.aggregate, spec.input_std);
  auto scaled = scale_target(raw.target, spec.max_power);
  if (encoding == TargetEncoding::rectangle) {
    pair.target = encode_rectangle(scaled, spec);
  } else {
    pair.target = std::move(scaled);
  }
  return pair;
}

// ------------------------------------------------------------ sources

RealWindowSource::RealWindowSource(std::vector<HouseData> houses,
                                   WindowSpec spec)
    : houses_(std::move(houses)), spec_(std::move(spec)) {
  if (houses_.empty()) throw ConfigError("real window source needs a house");
}

RawWindow RealWindowSource::draw(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, houses_.size() - 1);
  return select_real_window(houses_[pick(rng)], spec_, rng);
}

SyntheticWindowSource::SyntheticWindowSource(
    std::shared_ptr<const ActivationLibrary> library, std::string target_class,
    WindowSpec spec, SynthesisOptions options)
    : library_(std::move(library)),
      target_class_(std::move(target_class)),
      spec_(std::move(spec)),
      options_(options) {}

RawWindow SyntheticWindowSource::draw(Rng& rng) const {
  return synthesize_aggregate(*library_, target_class_, spec_, rng, options_);
}

// ------------------------------------------------------------ batches

BatchStream::BatchStream(std::shared_ptr<const WindowSource> real,
                         std::shared_ptr<const WindowSource> synthetic,
                         WindowSpec spec, TargetEncoding encoding,
                         std::size_t batch_size, std::uint64_t seed)
    : real_(std::move(real)),
      synthetic_(std::move(synthetic)),
      spec_(std::move(spec)),
      encoding_(encoding),
      batch_size_(batch_size),
      rng_(seed) {
  if (!real_ || !synthetic_) throw ConfigError("batch stream needs both sources");
  if (batch_size_ == 0) throw ConfigError("batch size must be positive");
  spec_.validate();
}

Batch BatchStream::next() {
  Batch batch;
  const std::size_t real_count = batch_size_ / 2;
  for (std::size_t i = 0; i < batch_size_; ++i) {
    const WindowSource& source = i < real_count ? *real_ : *synthetic_;
    RawWindow raw = source.draw(rng_);
    batch.pairs.push_back(make_training_pair(raw, spec_, encoding_));
    batch.raw.push_back(std::move(raw));
  }
  return batch;
}

PrefetchingBatchStream::PrefetchingBatchStream(BatchStream stream,
                                               std::size_t depth)
    : stream_(std::move(stream)), depth_(std::max<std::size_t>(depth, 1)) {
  worker_ = std::thread([this] { run(); });
}

PrefetchingBatchStream::~PrefetchingBatchStream() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void PrefetchingBatchStream::run() {
  while (true) {
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return stop_ || ready_.size() < depth_; });
      if (stop_) return;
    }
    try {
      Batch batch = stream_.next();
      std::lock_guard lock(mutex_);
      ready_.push_back(std::move(batch));
    } catch (...) {
      std::lock_guard lock(mutex_);
      error_ = std::current_exception();
      stop_ = true;
    }
    cv_.notify_all();
  }
}

Batch PrefetchingBatchStream::next() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [this] { return !ready_.empty() || error_ || stop_; });
  if (ready_.empty()) {
    if (error_) std::rethrow_exception(error_);
    throw Error("batch producer stopped");
  }
  Batch batch = std::move(ready_.front());
  ready_.pop_front();
  lock.unlock();
  cv_.notify_all();
  return batch;
}

}  // namespace nilm
