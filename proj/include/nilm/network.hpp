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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "nilm/layers.hpp"
#include "nilm/tensor.hpp"

namespace nilm {

enum class LayerType { dense, conv1d, bilstm, reshape };

std::string to_string(LayerType type);

// Declarative description of one layer; a Network is built from a list of
// these plus the per-sample input shape.
struct LayerSpec {
  LayerType type = LayerType::dense;
  std::size_t units = 0;  // dense units, conv filters or LSTM cells per direction
  std::size_t filter_size = 0;
  std::size_t stride = 1;
  Border border = Border::valid;
  ActivationFn activation = ActivationFn::linear;
  bool peepholes = true;
  std::size_t bptt_steps = 500;
  std::vector<std::size_t> shape;  // reshape target, batch axis excluded

  static LayerSpec dense(std::size_t units, ActivationFn activation);
  static LayerSpec conv1d(std::size_t filters, std::size_t filter_size,
                          std::size_t stride, Border border,
                          ActivationFn activation);
  static LayerSpec bilstm(std::size_t units, bool peepholes = true);
  static LayerSpec reshape(std::vector<std::size_t> sample_shape);

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// A named handle used by optimisers and checkpoints.
struct NamedParameter {
  std::string name;  // "layer<i>.<param>"
  Parameter* parameter = nullptr;
};

class Network {
 public:
  Network() = default;
  // Builds and initialises the layer stack; shapes are propagated from
  // input_shape (per sample, batch axis excluded).
  Network(std::vector<std::size_t> input_shape, std::vector<LayerSpec> specs,
          std::uint64_t seed);

  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const std::vector<std::size_t>& input_shape() const { return input_shape_; }
  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::vector<std::size_t> output_shape() const;  // per sample
  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  // Pure inference; safe to call concurrently on a frozen network.
  Tensor forward(const Tensor& input) const;
  // Caches activations for backward.
  Tensor forward_train(const Tensor& input);
  // Accumulates parameter gradients for the last forward_train. Throws
  // NumericError naming the layer when a gradient goes non-finite.
  void backward(const Tensor& grad_output);

  std::vector<NamedParameter> parameters();
  void zero_grad();
  std::size_t parameter_count() const;

  // Snapshot of parameter values in parameters() order.
  std::vector<Tensor> parameter_values() const;
  void set_parameter_values(const std::vector<Tensor>& values);

 private:
  void check_input(const Tensor& input) const;

  std::vector<std::size_t> input_shape_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// Mean squared error over every element. When `grad` is given it receives
// dL/dprediction = 2 (prediction - target) / count.
double mse_loss(const Tensor& prediction, const Tensor& target,
                Tensor* grad = nullptr);

// Checkpoint container: layer specs, named tensors and the hash of the
// manifest the network was trained under. Stored as CBOR.
struct Checkpoint {
  std::string manifest_hash;
  std::uint64_t step = 0;
};

void save_checkpoint(const std::filesystem::path& path, Network& network,
                     const Checkpoint& meta);
// Rebuilds the network from the stored specs and loads every tensor; shape
// or name mismatches raise ConfigError.
Network load_checkpoint(const std::filesystem::path& path, Checkpoint* meta);
// Loads tensors into an existing network, rejecting shape mismatches.
void load_parameters(const std::filesystem::path& path, Network& network,
                     Checkpoint* meta);

}  // namespace nilm
