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

#include <span>
#include <vector>

#include "nilm/network.hpp"
#include "nilm/tensor.hpp"

namespace nilm {

inline constexpr double kGradientClip = 10.0;
inline constexpr double kNesterovMomentum = 0.9;

// Elementwise clamp into [-bound, bound].
void clip_gradients(std::span<double> grads, double bound = kGradientClip);
void clip_gradients(Network& network, double bound = kGradientClip);

// One Nesterov update on flat buffers:
//   v' = momentum * v - lr * g
//   p' = p + momentum * v' - lr * g
void nesterov_update(std::span<double> params, std::span<const double> grads,
                     std::span<double> velocity, double learning_rate,
                     double momentum);

// SGD with Nesterov momentum. Velocity buffers are created on the first step
// and mirror the network's parameter shapes.
class NesterovSgd {
 public:
  explicit NesterovSgd(double learning_rate = 0.01,
                       double momentum = kNesterovMomentum)
      : learning_rate_(learning_rate), momentum_(momentum) {}

  void step(Network& network);

  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }
  double momentum() const { return momentum_; }
  const std::vector<Tensor>& velocity() const { return velocity_; }

 private:
  double learning_rate_;
  double momentum_;
  std::vector<Tensor> velocity_;
};

}  // namespace nilm
