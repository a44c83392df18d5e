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
#include <string>
#include <vector>

#include "nilm/datagen.hpp"
#include "nilm/network.hpp"

namespace nilm {

enum class ArchitectureKind { lstm, dae, rectangles };

std::string to_string(ArchitectureKind kind);
// Throws ConfigError listing {lstm,dae,rectangles} for unknown names.
ArchitectureKind architecture_from_string(const std::string& name);

std::size_t default_update_budget(ArchitectureKind kind);
std::size_t default_batch_size(ArchitectureKind kind);

// Hidden widths are divided by `width_divisor` (the desk profile uses this to
// shrink the wide layers); 1 reproduces the published stacks.
struct ArchitectureOptions {
  std::size_t width_divisor = 1;
};

struct ArchitectureSpec {
  ArchitectureKind kind = ArchitectureKind::dae;
  std::size_t window_width = 0;
  std::vector<LayerSpec> layers;
  std::size_t update_budget = 0;
  std::size_t batch_size = 0;
};

// conv1d(4,1,16,linear,same) -> biLSTM(128) -> biLSTM(256) -> dense(128,tanh)
// -> dense(1,linear), per time step.
ArchitectureSpec lstm_spec(std::size_t window_width,
                           const ArchitectureOptions& options = {});
// conv1d(4,1,8,linear,valid) -> dense((L-3)*8,relu) -> dense(128,relu)
// -> dense((L-3)*8,relu) -> conv1d(4,1,1,linear,valid); output length L-6.
ArchitectureSpec dae_spec(std::size_t window_width,
                          const ArchitectureOptions& options = {});
// conv1d(4,1,16,linear,valid) x2 -> dense 4096/3072/2048/512 relu
// -> dense(3,linear).
ArchitectureSpec rectangles_spec(std::size_t window_width,
                                 const ArchitectureOptions& options = {});
ArchitectureSpec architecture_spec(ArchitectureKind kind,
                                   std::size_t window_width,
                                   const ArchitectureOptions& options = {});

Network build_network(const ArchitectureSpec& spec, std::uint64_t seed);
Network build_lstm(std::size_t window_width, std::uint64_t seed = 0);
Network build_dae(std::size_t window_width, std::uint64_t seed = 0);
Network build_rectangles(std::size_t window_width, std::uint64_t seed = 0);

// Which part of the input window a network's sequence output covers.
struct OutputLayout {
  bool rectangle = false;
  std::size_t offset = 0;  // first covered sample within the window
  std::size_t length = 0;  // covered samples (0 for rectangles)
};
OutputLayout output_layout(ArchitectureKind kind, std::size_t window_width);
TargetEncoding target_encoding(ArchitectureKind kind);

// [batch, window, 1] input tensor.
Tensor batch_inputs(const std::vector<TrainingPair>& pairs,
                    std::size_t window_width);
// Targets in the shape the network emits: [batch, W, 1] for lstm,
// [batch, W-6, 1] (window centre) for dae, [batch, 3] for rectangles.
Tensor batch_targets(const std::vector<TrainingPair>& pairs,
                     ArchitectureKind kind, std::size_t window_width);

}  // namespace nilm
