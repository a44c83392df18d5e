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
#include <functional>
#include <optional>
#include <vector>

#include "nilm/architectures.hpp"
#include "nilm/datagen.hpp"
#include "nilm/network.hpp"
#include "nilm/optimizer.hpp"

namespace nilm {

struct TrainOptions {
  std::size_t update_budget = 0;
  std::optional<double> gradient_clip;  // elementwise bound, if any
  double smoothing = 0.95;              // EMA factor for smoothed_loss
  // Halve the learning rate when the smoothed loss has not improved by
  // plateau_tolerance (relative) for plateau_patience updates; 0 disables.
  std::size_t plateau_patience = 0;
  double plateau_tolerance = 1e-3;
  std::size_t log_every = 1;
  std::size_t checkpoint_every = 0;  // 0 = only at the end
  std::function<void(std::size_t step, Network&)> on_checkpoint;
};

struct LossRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double smoothed_loss = 0.0;
  double wallclock_s = 0.0;
};

struct TrainResult {
  std::vector<LossRecord> trace;
  std::size_t steps_completed = 0;
  bool diverged = false;  // network holds the last finite parameters
};

using BatchSupplier = std::function<Batch()>;

// One forward/backward pass on a batch; returns the MSE loss. Leaves the
// gradients in the network without applying them.
double compute_gradients(Network& network, ArchitectureKind kind,
                         std::size_t window_width, const Batch& batch);

// Runs exactly options.update_budget SGD steps. On a non-finite loss or
// gradient the parameters from before the failing step are restored, the
// checkpoint callback fires and the result is flagged as diverged.
TrainResult train(Network& network, ArchitectureKind kind,
                  std::size_t window_width, const BatchSupplier& next_batch,
                  NesterovSgd& optimizer, const TrainOptions& options);

// CSV `step,loss,smoothed_loss,wallclock_s`.
void write_loss_log(const std::filesystem::path& path,
                    const std::vector<LossRecord>& trace);

}  // namespace nilm
