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

#include "nilm/optimizer.hpp"

#include <algorithm>

#include "nilm/error.hpp"

namespace nilm {

void clip_gradients(std::span<double> grads, double bound) {
  for (double& g : grads) g = std::clamp(g, -bound, bound);
}

void clip_gradients(Network& network, double bound) {
  for (auto& np : network.parameters())
    clip_gradients(np.parameter->grad.data(), bound);
}

void nesterov_update(std::span<double> params, std::span<const double> grads,
                     std::span<double> velocity, double learning_rate,
                     double momentum) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double v = momentum * velocity[i] - learning_rate * grads[i];
    velocity[i] = v;
    params[i] += momentum * v - learning_rate * grads[i];
  }
}

void NesterovSgd::step(Network& network) {
  auto params = network.parameters();
  if (velocity_.empty()) {
    for (auto& np : params) velocity_.emplace_back(np.parameter->value.shape());
  }
  if (velocity_.size() != params.size()) {
    throw ConfigError("optimizer state does not match network parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i].parameter;
    if (velocity_[i].shape() != p.value.shape()) {
      throw ConfigError("velocity shape mismatch for " + params[i].name);
    }
    nesterov_update(p.value.data(), p.grad.data(), velocity_[i].data(),
                    learning_rate_, momentum_);
  }
}

}  // namespace nilm
