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
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nilm/tensor.hpp"

namespace nilm {

enum class ActivationFn { linear, relu, tanh };
enum class Border { same, valid };

std::string to_string(ActivationFn fn);
std::string to_string(Border border);
ActivationFn activation_from_string(const std::string& name);
Border border_from_string(const std::string& name);

// A trainable tensor and its accumulated gradient (same shape).
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}
};

// A differentiable stage of a Network. `forward` is pure and may run
// concurrently; `forward_train` additionally caches what `backward` needs.
// `backward` adds parameter gradients into Parameter::grad and returns the
// gradient with respect to the layer input.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  virtual std::vector<std::size_t> output_shape(
      std::span<const std::size_t> input_shape) const = 0;

  virtual Tensor forward(const Tensor& input) const = 0;
  virtual Tensor forward_train(const Tensor& input) = 0;
  virtual Tensor backward(const Tensor& grad_output) = 0;

  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual void initialize(std::mt19937_64& /*rng*/) {}
};

// y = act(x W + b) applied over the last axis; leading axes are rows.
class Dense final : public Layer {
 public:
  Dense(std::size_t inputs, std::size_t units, ActivationFn activation);

  std::string kind() const override { return "dense"; }
  std::vector<std::size_t> output_shape(
      std::span<const std::size_t> input_shape) const override;
  Tensor forward(const Tensor& input) const override;
  Tensor forward_train(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weights_, &bias_}; }
  void initialize(std::mt19937_64& rng) override;

  std::size_t inputs() const { return inputs_; }
  std::size_t units() const { return units_; }
  ActivationFn activation() const { return activation_; }
  Parameter& weights() { return weights_; }
  Parameter& bias() { return bias_; }

 private:
  Tensor run(const Tensor& input) const;

  std::size_t inputs_;
  std::size_t units_;
  ActivationFn activation_;
  Parameter weights_;  // [inputs, units]
  Parameter bias_;     // [units]
  Tensor cached_input_;
  Tensor cached_output_;
};

// Cross-correlation over the time axis of [batch, time, channels]. `same`
// pads filter_size - 1 zeros in total (the odd one on the right) and needs
// stride 1; `valid` yields floor((L - filter_size) / stride) + 1 steps.
class Conv1D final : public Layer {
 public:
  Conv1D(std::size_t channels, std::size_t filters, std::size_t filter_size,
         std::size_t stride, Border border, ActivationFn activation);

  std::string kind() const override { return "conv1d"; }
  std::vector<std::size_t> output_shape(
      std::span<const std::size_t> input_shape) const override;
  Tensor forward(const Tensor& input) const override;
  Tensor forward_train(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weights_, &bias_}; }
  void initialize(std::mt19937_64& rng) override;

  std::size_t output_length(std::size_t input_length) const;
  std::size_t filters() const { return filters_; }
  std::size_t filter_size() const { return filter_size_; }
  std::size_t stride() const { return stride_; }
  Border border() const { return border_; }
  ActivationFn activation() const { return activation_; }
  Parameter& weights() { return weights_; }
  Parameter& bias() { return bias_; }

 private:
  Tensor run(const Tensor& input, Tensor* cols) const;

  std::size_t channels_;
  std::size_t filters_;
  std::size_t filter_size_;
  std::size_t stride_;
  Border border_;
  ActivationFn activation_;
  Parameter weights_;  // [filter_size * channels, filters], tap-major
  Parameter bias_;     // [filters]
  std::vector<std::size_t> cached_input_shape_;
  Tensor cached_cols_;
  Tensor cached_output_;
};

// Changes the per-sample shape; the batch axis is preserved.
class Reshape final : public Layer {
 public:
  explicit Reshape(std::vector<std::size_t> sample_shape);

  std::string kind() const override { return "reshape"; }
  std::vector<std::size_t> output_shape(
      std::span<const std::size_t> input_shape) const override;
  Tensor forward(const Tensor& input) const override;
  Tensor forward_train(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;

  const std::vector<std::size_t>& sample_shape() const { return sample_shape_; }

 private:
  std::vector<std::size_t> sample_shape_;
  std::vector<std::size_t> cached_input_shape_;
};

// LSTM with peephole connections from the cell to the input, forget and
// output gates. Maps [batch, time, inputs] to per-step hidden states
// [batch, time, hidden]; h_0 = c_0 = 0. A reversed layer reads t = T-1..0.
// Backpropagation through time covers at most `bptt_steps` steps counted
// from the end of the processing order (0 = unlimited).
class Lstm final : public Layer {
 public:
  Lstm(std::size_t inputs, std::size_t hidden, bool peepholes = true,
       bool reversed = false, std::size_t bptt_steps = 500);

  std::string kind() const override { return "lstm"; }
  std::vector<std::size_t> output_shape(
      std::span<const std::size_t> input_shape) const override;
  Tensor forward(const Tensor& input) const override;
  Tensor forward_train(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override;
  void initialize(std::mt19937_64& rng) override;

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }
  bool peepholes() const { return peepholes_; }
  bool reversed() const { return reversed_; }
  std::size_t bptt_steps() const { return bptt_steps_; }

  // Gate blocks inside the 4 * hidden columns of the weight matrices.
  enum Gate : std::size_t { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

  Parameter& input_weights() { return w_input_; }
  Parameter& recurrent_weights() { return w_recurrent_; }
  Parameter& bias() { return bias_; }
  Parameter& peephole(Gate gate);

 private:
  struct Trace;
  Tensor run(const Tensor& input, Trace* trace) const;

  std::size_t inputs_;
  std::size_t hidden_;
  bool peepholes_;
  bool reversed_;
  std::size_t bptt_steps_;
  Parameter w_input_;      // [inputs, 4 * hidden]
  Parameter w_recurrent_;  // [hidden, 4 * hidden]
  Parameter bias_;         // [4 * hidden]
  Parameter peep_input_;   // [hidden]
  Parameter peep_forget_;  // [hidden]
  Parameter peep_output_;  // [hidden]
  std::shared_ptr<Trace> trace_;
};

// Forward and reversed LSTM over the same input, outputs concatenated per
// time step: [batch, time, 2 * hidden].
class Bidirectional final : public Layer {
 public:
  Bidirectional(std::size_t inputs, std::size_t hidden, bool peepholes = true,
                std::size_t bptt_steps = 500);

  std::string kind() const override { return "bilstm"; }
  std::vector<std::size_t> output_shape(
      std::span<const std::size_t> input_shape) const override;
  Tensor forward(const Tensor& input) const override;
  Tensor forward_train(const Tensor& input) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override;
  void initialize(std::mt19937_64& rng) override;

  Lstm& forward_half() { return forward_; }
  Lstm& backward_half() { return backward_; }
  std::size_t hidden() const { return forward_.hidden(); }

 private:
  static Tensor concat(const Tensor& a, const Tensor& b);

  Lstm forward_;
  Lstm backward_;
};

// Applies the activation in place / its derivative given the activation
// output.
void apply_activation(ActivationFn fn, std::span<double> values);
void activation_backward(ActivationFn fn, std::span<const double> output,
                         std::span<double> grad);

}  // namespace nilm
