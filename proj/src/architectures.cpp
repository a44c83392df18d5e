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

#include "nilm/architectures.hpp"

#include <algorithm>

#include "nilm/error.hpp"

namespace nilm {

namespace {

constexpr std::size_t kConvFilter = 4;
constexpr std::size_t kDaeHalo = 3;

std::size_t scaled(std::size_t width, const ArchitectureOptions& o) {
  return std::max<std::size_t>(1, width / std::max<std::size_t>(1, o.width_divisor));
}

}  // namespace

std::string to_string(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::lstm: return "lstm";
    case ArchitectureKind::dae: return "dae";
    case ArchitectureKind::rectangles: return "rectangles";
  }
  return "dae";
}

ArchitectureKind architecture_from_string(const std::string& name) {
  if (name == "lstm") return ArchitectureKind::lstm;
  if (name == "dae") return ArchitectureKind::dae;
  if (name == "rectangles") return ArchitectureKind::rectangles;
  throw ConfigError("unknown architecture '" + name +
                    "'; expected one of {lstm,dae,rectangles}");
}

std::size_t default_update_budget(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::lstm: return 10000;
    case ArchitectureKind::dae: return 100000;
    case ArchitectureKind::rectangles: return 300000;
  }
  return 0;
}

std::size_t default_batch_size(ArchitectureKind kind) {
  return kind == ArchitectureKind::lstm ? 16 : 64;
}

ArchitectureSpec lstm_spec(std::size_t window_width,
                           const ArchitectureOptions& options) {
  if (window_width == 0) throw ConfigError("window width must be positive");
  ArchitectureSpec s;
  s.kind = ArchitectureKind::lstm;
  s.window_width = window_width;
  s.update_budget = default_update_budget(s.kind);
  s.batch_size = default_batch_size(s.kind);
  s.layers = {
      LayerSpec::conv1d(16, kConvFilter, 1, Border::same, ActivationFn::linear),
      LayerSpec::bilstm(scaled(128, options)),
      LayerSpec::bilstm(scaled(256, options)),
      LayerSpec::dense(scaled(128, options), ActivationFn::tanh),
      LayerSpec::dense(1, ActivationFn::linear),
  };
  return s;
}

ArchitectureSpec dae_spec(std::size_t window_width,
                          const ArchitectureOptions& options) {
  if (window_width <= 2 * kDaeHalo + 2) {
    throw ConfigError("dae window width must exceed 8");
  }
  const std::size_t conv_len = window_width - (kConvFilter - 1);
  const std::size_t wide = conv_len * 8;
  ArchitectureSpec s;
  s.kind = ArchitectureKind::dae;
  s.window_width = window_width;
  s.update_budget = default_update_budget(s.kind);
  s.batch_size = default_batch_size(s.kind);
  s.layers = {
      LayerSpec::conv1d(8, kConvFilter, 1, Border::valid, ActivationFn::linear),
      LayerSpec::reshape({wide}),
      LayerSpec::dense(wide, ActivationFn::relu),
      LayerSpec::dense(scaled(128, options), ActivationFn::relu),
      LayerSpec::dense(wide, ActivationFn::relu),
      LayerSpec::reshape({conv_len, 8}),
      LayerSpec::conv1d(1, kConvFilter, 1, Border::valid, ActivationFn::linear),
  };
  return s;
}

ArchitectureSpec rectangles_spec(std::size_t window_width,
                                 const ArchitectureOptions& options) {
  if (window_width <= 2 * kDaeHalo + 2) {
    throw ConfigError("rectangles window width must exceed 8");
  }
  const std::size_t conv_len = window_width - 2 * (kConvFilter - 1);
  ArchitectureSpec s;
  s.kind = ArchitectureKind::rectangles;
  s.window_width = window_width;
  s.update_budget = default_update_budget(s.kind);
  s.batch_size = default_batch_size(s.kind);
  s.layers = {
      LayerSpec::conv1d(16, kConvFilter, 1, Border::valid, ActivationFn::linear),
      LayerSpec::conv1d(16, kConvFilter, 1, Border::valid, ActivationFn::linear),
      LayerSpec::reshape({conv_len * 16}),
      LayerSpec::dense(scaled(4096, options), ActivationFn::relu),
      LayerSpec::dense(scaled(3072, options), ActivationFn::relu),
      LayerSpec::dense(scaled(2048, options), ActivationFn::relu),
      LayerSpec::dense(scaled(512, options), ActivationFn::relu),
      LayerSpec::dense(3, ActivationFn::linear),
  };
  return s;
}

ArchitectureSpec architecture_spec(ArchitectureKind kind,
                                   std::size_t window_width,
                                   const ArchitectureOptions& options) {
  switch (kind) {
    case ArchitectureKind::lstm: return lstm_spec(window_width, options);
    case ArchitectureKind::dae: return dae_spec(window_width, options);
    case ArchitectureKind::rectangles: return rectangles_spec(window_width, options);
  }
  throw ConfigError("unknown architecture");
}

Network build_network(const ArchitectureSpec& spec, std::uint64_t seed) {
  return Network({spec.window_width, 1}, spec.layers, seed);
}

Network build_lstm(std::size_t window_width, std::uint64_t seed) {
  return build_network(lstm_spec(window_width), seed);
}

Network build_dae(std::size_t window_width, std::uint64_t seed) {
  return build_network(dae_spec(window_width), seed);
}

Network build_rectangles(std::size_t window_width, std::uint64_t seed) {
  return build_network(rectangles_spec(window_width), seed);
}

OutputLayout output_layout(ArchitectureKind kind, std::size_t window_width) {
  switch (kind) {
    case ArchitectureKind::lstm: return {false, 0, window_width};
    case ArchitectureKind::dae:
      return {false, kDaeHalo, window_width - 2 * kDaeHalo};
    case ArchitectureKind::rectangles: return {true, 0, 0};
  }
  return {};
}

TargetEncoding target_encoding(ArchitectureKind kind) {
  return kind == ArchitectureKind::rectangles ? TargetEncoding::rectangle
                                              : TargetEncoding::sequence;
}

Tensor batch_inputs(const std::vector<TrainingPair>& pairs,
                    std::size_t window_width) {
  Tensor t({pairs.size(), window_width, 1});
  for (std::size_t b = 0; b < pairs.size(); ++b) {
    if (pairs[b].input.size() != window_width) {
      throw ShapeError("training input of length " +
                       std::to_string(pairs[b].input.size()) +
                       " for window " + std::to_string(window_width));
    }
    std::copy(pairs[b].input.begin(), pairs[b].input.end(),
              t.data().begin() + static_cast<std::ptrdiff_t>(b * window_width));
  }
  return t;
}

Tensor batch_targets(const std::vector<TrainingPair>& pairs,
                     ArchitectureKind kind, std::size_t window_width) {
  const OutputLayout layout = output_layout(kind, window_width);
  if (layout.rectangle) {
    Tensor t({pairs.size(), 3});
    for (std::size_t b = 0; b < pairs.size(); ++b) {
      const RectangleTriple& r = pairs[b].target_rectangle();
      t[b * 3 + 0] = r.start;
      t[b * 3 + 1] = r.end;
      t[b * 3 + 2] = r.height;
    }
    return t;
  }
  Tensor t({pairs.size(), layout.length, 1});
  for (std::size_t b = 0; b < pairs.size(); ++b) {
    const auto& seq = pairs[b].target_sequence();
    std::copy_n(seq.begin() + static_cast<std::ptrdiff_t>(layout.offset),
                layout.length,
                t.data().begin() + static_cast<std::ptrdiff_t>(b * layout.length));
  }
  return t;
}

}  // namespace nilm
