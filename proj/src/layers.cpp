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

#include "nilm/layers.hpp"

#include <algorithm>
#include <cmath>

#include "nilm/error.hpp"
#include "nilm/kernels.hpp"

namespace nilm {

std::string to_string(ActivationFn fn) {
  switch (fn) {
    case ActivationFn::linear: return "linear";
    case ActivationFn::relu: return "relu";
    case ActivationFn::tanh: return "tanh";
  }
  return "linear";
}

std::string to_string(Border border) {
  return border == Border::same ? "same" : "valid";
}

ActivationFn activation_from_string(const std::string& name) {
  if (name == "linear") return ActivationFn::linear;
  if (name == "relu") return ActivationFn::relu;
  if (name == "tanh") return ActivationFn::tanh;
  throw ConfigError("unknown activation '" + name + "'");
}

Border border_from_string(const std::string& name) {
  if (name == "same") return Border::same;
  if (name == "valid") return Border::valid;
  throw ConfigError("unknown border mode '" + name + "'");
}

void apply_activation(ActivationFn fn, std::span<double> values) {
  switch (fn) {
    case ActivationFn::linear:
      break;
    case ActivationFn::relu:
      for (double& v : values) v = v > 0.0 ? v : 0.0;
      break;
    case ActivationFn::tanh:
      for (double& v : values) v = std::tanh(v);
      break;
  }
}

void activation_backward(ActivationFn fn, std::span<const double> output,
                         std::span<double> grad) {
  switch (fn) {
    case ActivationFn::linear:
      break;
    case ActivationFn::relu:
      for (std::size_t i = 0; i < grad.size(); ++i)
        if (output[i] <= 0.0) grad[i] = 0.0;
      break;
    case ActivationFn::tanh:
      for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] *= 1.0 - output[i] * output[i];
      break;
  }
}

namespace {

void glorot_uniform(Tensor& w, std::size_t fan_in, std::size_t fan_out,
                    std::mt19937_64& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w.values()) v = dist(rng);
}

void add_bias_rows(std::span<double> out, std::span<const double> bias) {
  const std::size_t n = bias.size();
  for (std::size_t r = 0; r < out.size() / n; ++r)
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] += bias[j];
}

void add_column_sums(std::span<const double> rows, std::span<double> sums) {
  const std::size_t n = sums.size();
  for (std::size_t r = 0; r < rows.size() / n; ++r)
    for (std::size_t j = 0; j < n; ++j) sums[j] += rows[r * n + j];
}

[[noreturn]] void dimension_error(const std::string& layer,
                                  const std::string& detail) {
  throw ShapeError("dimension error in " + layer + " layer: " + detail);
}

}  // namespace

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t inputs, std::size_t units, ActivationFn activation)
    : inputs_(inputs),
      units_(units),
      activation_(activation),
      weights_("W", {inputs, units}),
      bias_("b", {units}) {}

std::vector<std::size_t> Dense::output_shape(
    std::span<const std::size_t> input_shape) const {
  if (input_shape.empty() || input_shape.back() != inputs_) {
    dimension_error("dense", "expected last axis " + std::to_string(inputs_) +
                                 ", got shape " + shape_string(input_shape));
  }
  std::vector<std::size_t> out(input_shape.begin(), input_shape.end());
  out.back() = units_;
  return out;
}

void Dense::initialize(std::mt19937_64& rng) {
  glorot_uniform(weights_.value, inputs_, units_, rng);
  bias_.value.fill(0.0);
}

Tensor Dense::run(const Tensor& input) const {
  Tensor out(output_shape(input.shape()));
  const std::size_t rows = input.size() / inputs_;
  kernels::matmul_nn(input.data(), weights_.value.data(), out.data(), rows,
                     inputs_, units_, false);
  add_bias_rows(out.data(), bias_.value.data());
  apply_activation(activation_, out.data());
  return out;
}

Tensor Dense::forward(const Tensor& input) const { return run(input); }

Tensor Dense::forward_train(const Tensor& input) {
  cached_input_ = input;
  cached_output_ = run(input);
  return cached_output_;
}

Tensor Dense::backward(const Tensor& grad_output) {
  Tensor dz = grad_output;
  activation_backward(activation_, cached_output_.data(), dz.data());
  const std::size_t rows = cached_input_.size() / inputs_;
  kernels::matmul_tn(cached_input_.data(), dz.data(), weights_.grad.data(),
                     inputs_, rows, units_, true);
  add_column_sums(dz.data(), bias_.grad.data());
  Tensor dx(cached_input_.shape());
  kernels::matmul_nt(dz.data(), weights_.value.data(), dx.data(), rows, units_,
                     inputs_, false);
  return dx;
}

// ---------------------------------------------------------------- Conv1D

Conv1D::Conv1D(std::size_t channels, std::size_t filters,
               std::size_t filter_size, std::size_t stride, Border border,
               ActivationFn activation)
    : channels_(channels),
      filters_(filters),
      filter_size_(filter_size),
      stride_(stride),
      border_(border),
      activation_(activation),
      weights_("W", {filter_size * channels, filters}),
      bias_("b", {filters}) {
  if (filter_size == 0 || stride == 0 || filters == 0 || channels == 0) {
    throw ConfigError("conv1d sizes must be positive");
  }
  if (border == Border::same && stride != 1) {
    throw ConfigError("conv1d border 'same' requires stride 1");
  }
}

std::size_t Conv1D::output_length(std::size_t input_length) const {
  if (border_ == Border::same) return input_length;
  if (input_length < filter_size_) {
    dimension_error("conv1d", "input length " + std::to_string(input_length) +
                                  " shorter than filter " +
                                  std::to_string(filter_size_));
  }
  return (input_length - filter_size_) / stride_ + 1;
}

std::vector<std::size_t> Conv1D::output_shape(
    std::span<const std::size_t> input_shape) const {
  if (input_shape.size() != 3 || input_shape[2] != channels_) {
    dimension_error("conv1d", "expected [batch, time, " +
                                  std::to_string(channels_) + "], got " +
                                  shape_string(input_shape));
  }
  return {input_shape[0], output_length(input_shape[1]), filters_};
}

void Conv1D::initialize(std::mt19937_64& rng) {
  glorot_uniform(weights_.value, filter_size_ * channels_,
                 filter_size_ * filters_, rng);
  bias_.value.fill(0.0);
}

Tensor Conv1D::run(const Tensor& input, Tensor* cols_out) const {
  const auto shape = output_shape(input.shape());
  kernels::ConvGeometry g;
  g.batch = input.dim(0);
  g.length = input.dim(1);
  g.channels = channels_;
  g.filter_size = filter_size_;
  g.stride = stride_;
  g.pad_left = border_ == Border::same ? (filter_size_ - 1) / 2 : 0;
  g.out_length = shape[1];

  Tensor cols({g.rows(), g.patch()});
  kernels::im2col(input.data(), g, cols.data());
  Tensor out(shape);
  kernels::matmul_nn(cols.data(), weights_.value.data(), out.data(), g.rows(),
                     g.patch(), filters_, false);
  add_bias_rows(out.data(), bias_.value.data());
  apply_activation(activation_, out.data());
  if (cols_out) *cols_out = std::move(cols);
  return out;
}

Tensor Conv1D::forward(const Tensor& input) const { return run(input, nullptr); }

Tensor Conv1D::forward_train(const Tensor& input) {
  cached_input_shape_ = input.shape();
  cached_output_ = run(input, &cached_cols_);
  return cached_output_;
}

Tensor Conv1D::backward(const Tensor& grad_output) {
  Tensor dz = grad_output;
  activation_backward(activation_, cached_output_.data(), dz.data());

  kernels::ConvGeometry g;
  g.batch = cached_input_shape_[0];
  g.length = cached_input_shape_[1];
  g.channels = channels_;
  g.filter_size = filter_size_;
  g.stride = stride_;
  g.pad_left = border_ == Border::same ? (filter_size_ - 1) / 2 : 0;
  g.out_length = grad_output.dim(1);

  kernels::matmul_tn(cached_cols_.data(), dz.data(), weights_.grad.data(),
                     g.patch(), g.rows(), filters_, true);
  add_column_sums(dz.data(), bias_.grad.data());

  Tensor dcols({g.rows(), g.patch()});
  kernels::matmul_nt(dz.data(), weights_.value.data(), dcols.data(), g.rows(),
                     filters_, g.patch(), false);
  Tensor dx(cached_input_shape_);
  kernels::col2im_add(dcols.data(), g, dx.data());
  return dx;
}

// ---------------------------------------------------------------- Reshape

Reshape::Reshape(std::vector<std::size_t> sample_shape)
    : sample_shape_(std::move(sample_shape)) {}

std::vector<std::size_t> Reshape::output_shape(
    std::span<const std::size_t> input_shape) const {
  if (input_shape.empty() ||
      shape_size(input_shape.subspan(1)) != shape_size(sample_shape_)) {
    dimension_error("reshape", "cannot map " + shape_string(input_shape) +
                                   " onto per-sample " +
                                   shape_string(sample_shape_));
  }
  std::vector<std::size_t> out{input_shape[0]};
  out.insert(out.end(), sample_shape_.begin(), sample_shape_.end());
  return out;
}

Tensor Reshape::forward(const Tensor& input) const {
  return input.reshaped(output_shape(input.shape()));
}

Tensor Reshape::forward_train(const Tensor& input) {
  cached_input_shape_ = input.shape();
  return forward(input);
}

Tensor Reshape::backward(const Tensor& grad_output) {
  return grad_output.reshaped(cached_input_shape_);
}

// ---------------------------------------------------------------- Bidirectional

Bidirectional::Bidirectional(std::size_t inputs, std::size_t hidden,
                             bool peepholes, std::size_t bptt_steps)
    : forward_(inputs, hidden, peepholes, false, bptt_steps),
      backward_(inputs, hidden, peepholes, true, bptt_steps) {}

std::vector<std::size_t> Bidirectional::output_shape(
    std::span<const std::size_t> input_shape) const {
  auto out = forward_.output_shape(input_shape);
  out.back() *= 2;
  return out;
}

Tensor Bidirectional::concat(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.dim(2);
  const std::size_t steps = a.dim(0) * a.dim(1);
  Tensor out({a.dim(0), a.dim(1), 2 * n});
  for (std::size_t s = 0; s < steps; ++s) {
    std::copy_n(a.data().data() + s * n, n, out.data().data() + s * 2 * n);
    std::copy_n(b.data().data() + s * n, n, out.data().data() + s * 2 * n + n);
  }
  return out;
}

Tensor Bidirectional::forward(const Tensor& input) const {
  return concat(forward_.forward(input), backward_.forward(input));
}

Tensor Bidirectional::forward_train(const Tensor& input) {
  Tensor a = forward_.forward_train(input);
  Tensor b = backward_.forward_train(input);
  return concat(a, b);
}

Tensor Bidirectional::backward(const Tensor& grad_output) {
  const std::size_t n = hidden();
  const std::size_t steps = grad_output.dim(0) * grad_output.dim(1);
  Tensor ga({grad_output.dim(0), grad_output.dim(1), n});
  Tensor gb(ga.shape());
  for (std::size_t s = 0; s < steps; ++s) {
    const double* src = grad_output.data().data() + s * 2 * n;
    std::copy_n(src, n, ga.data().data() + s * n);
    std::copy_n(src + n, n, gb.data().data() + s * n);
  }
  Tensor dx = forward_.backward(ga);
  const Tensor dxb = backward_.backward(gb);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dxb[i];
  return dx;
}

std::vector<Parameter*> Bidirectional::parameters() {
  auto out = forward_.parameters();
  for (Parameter* p : backward_.parameters()) out.push_back(p);
  return out;
}

void Bidirectional::initialize(std::mt19937_64& rng) {
  forward_.initialize(rng);
  backward_.initialize(rng);
}

}  // namespace nilm
