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

#include "nilm/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "nilm/error.hpp"

namespace nilm {

double compute_gradients(Network& network, ArchitectureKind kind,
                         std::size_t window_width, const Batch& batch) {
  const Tensor input = batch_inputs(batch.pairs, window_width);
  const Tensor target = batch_targets(batch.pairs, kind, window_width);
  network.zero_grad();
  const Tensor prediction = network.forward_train(input);
  Tensor grad;
  const double loss = mse_loss(prediction, target, &grad);
  if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
  network.backward(grad);
  return loss;
}

TrainResult train(Network& network, ArchitectureKind kind,
                  std::size_t window_width, const BatchSupplier& next_batch,
                  NesterovSgd& optimizer, const TrainOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  TrainResult result;
  double smoothed = 0.0;
  double best = 0.0;
  std::size_t since_best = 0;

  for (std::size_t step = 1; step <= options.update_budget; ++step) {
    const Batch batch = next_batch();
    const auto snapshot = network.parameter_values();
    double loss = 0.0;
    try {
      loss = compute_gradients(network, kind, window_width, batch);
      if (options.gradient_clip) clip_gradients(network, *options.gradient_clip);
      optimizer.step(network);
      for (const auto& v : network.parameter_values())
        v.check_finite("parameters after update");
    } catch (const NumericError&) {
      network.set_parameter_values(snapshot);
      result.diverged = true;
      if (options.on_checkpoint) options.on_checkpoint(step - 1, network);
      return result;
    }

    smoothed = step == 1 ? loss
                         : options.smoothing * smoothed +
                               (1.0 - options.smoothing) * loss;
    if (options.plateau_patience > 0) {
      if (step == 1 || smoothed < best * (1.0 - options.plateau_tolerance)) {
        best = smoothed;
        since_best = 0;
      } else if (++since_best >= options.plateau_patience) {
        optimizer.set_learning_rate(optimizer.learning_rate() / 2.0);
        best = smoothed;
        since_best = 0;
      }
    }

    result.steps_completed = step;
    if (options.log_every > 0 &&
        (step % options.log_every == 0 || step == options.update_budget)) {
      const std::chrono::duration<double> elapsed = Clock::now() - started;
      result.trace.push_back({step, loss, smoothed, elapsed.count()});
    }
    if (options.on_checkpoint && options.checkpoint_every > 0 &&
        step % options.checkpoint_every == 0 && step != options.update_budget) {
      options.on_checkpoint(step, network);
    }
  }
  if (options.on_checkpoint) options.on_checkpoint(result.steps_completed, network);
  return result;
}

void write_loss_log(const std::filesystem::path& path,
                    const std::vector<LossRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "step,loss,smoothed_loss,wallclock_s\n";
  out << std::setprecision(17);
  for (const auto& r : trace) {
    out << r.step << ',' << r.loss << ',' << r.smoothed_loss << ','
        << std::setprecision(6) << r.wallclock_s << std::setprecision(17)
        << '\n';
  }
}

}  // namespace nilm
