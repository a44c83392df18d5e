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

#include "nilm/network.hpp"

#include <fstream>
#include <iterator>
#include <random>

#include <json.hpp>

#include "nilm/error.hpp"

namespace nilm {

using nlohmann::json;

std::string to_string(LayerType type) {
  switch (type) {
    case LayerType::dense: return "dense";
    case LayerType::conv1d: return "conv1d";
    case LayerType::bilstm: return "bilstm";
    case LayerType::reshape: return "reshape";
  }
  return "dense";
}

namespace {

LayerType layer_type_from_string(const std::string& name) {
  if (name == "dense") return LayerType::dense;
  if (name == "conv1d") return LayerType::conv1d;
  if (name == "bilstm") return LayerType::bilstm;
  if (name == "reshape") return LayerType::reshape;
  throw ConfigError("unknown layer type '" + name + "'");
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec,
                                  std::span<const std::size_t> in) {
  switch (spec.type) {
    case LayerType::dense:
      return std::make_unique<Dense>(in.back(), spec.units, spec.activation);
    case LayerType::conv1d:
      if (in.size() != 2) {
        throw ShapeError("conv1d expects [time, channels] samples, got " +
                         shape_string(in));
      }
      return std::make_unique<Conv1D>(in[1], spec.units, spec.filter_size,
                                      spec.stride, spec.border, spec.activation);
    case LayerType::bilstm:
      if (in.size() != 2) {
        throw ShapeError("bilstm expects [time, features] samples, got " +
                         shape_string(in));
      }
      return std::make_unique<Bidirectional>(in[1], spec.units, spec.peepholes,
                                             spec.bptt_steps);
    case LayerType::reshape:
      return std::make_unique<Reshape>(spec.shape);
  }
  throw ConfigError("unknown layer type");
}

json spec_to_json(const LayerSpec& s) {
  json j{{"type", to_string(s.type)}};
  switch (s.type) {
    case LayerType::dense:
      j["units"] = s.units;
      j["activation"] = to_string(s.activation);
      break;
    case LayerType::conv1d:
      j["filters"] = s.units;
      j["filter_size"] = s.filter_size;
      j["stride"] = s.stride;
      j["border"] = to_string(s.border);
      j["activation"] = to_string(s.activation);
      break;
    case LayerType::bilstm:
      j["units"] = s.units;
      j["peepholes"] = s.peepholes;
      j["bptt_steps"] = s.bptt_steps;
      break;
    case LayerType::reshape:
      j["shape"] = s.shape;
      break;
  }
  return j;
}

LayerSpec spec_from_json(const json& j) {
  LayerSpec s;
  s.type = layer_type_from_string(j.at("type").get<std::string>());
  switch (s.type) {
    case LayerType::dense:
      s.units = j.at("units").get<std::size_t>();
      s.activation = activation_from_string(j.at("activation"));
      break;
    case LayerType::conv1d:
      s.units = j.at("filters").get<std::size_t>();
      s.filter_size = j.at("filter_size").get<std::size_t>();
      s.stride = j.at("stride").get<std::size_t>();
      s.border = border_from_string(j.at("border"));
      s.activation = activation_from_string(j.at("activation"));
      break;
    case LayerType::bilstm:
      s.units = j.at("units").get<std::size_t>();
      s.peepholes = j.at("peepholes").get<bool>();
      s.bptt_steps = j.at("bptt_steps").get<std::size_t>();
      break;
    case LayerType::reshape:
      s.shape = j.at("shape").get<std::vector<std::size_t>>();
      break;
  }
  return s;
}

}  // namespace

LayerSpec LayerSpec::dense(std::size_t units, ActivationFn activation) {
  LayerSpec s;
  s.type = LayerType::dense;
  s.units = units;
  s.activation = activation;
  return s;
}

LayerSpec LayerSpec::conv1d(std::size_t filters, std::size_t filter_size,
                            std::size_t stride, Border border,
                            ActivationFn activation) {
  LayerSpec s;
  s.type = LayerType::conv1d;
  s.units = filters;
  s.filter_size = filter_size;
  s.stride = stride;
  s.border = border;
  s.activation = activation;
  return s;
}

LayerSpec LayerSpec::bilstm(std::size_t units, bool peepholes) {
  LayerSpec s;
  s.type = LayerType::bilstm;
  s.units = units;
  s.peepholes = peepholes;
  return s;
}

LayerSpec LayerSpec::reshape(std::vector<std::size_t> sample_shape) {
  LayerSpec s;
  s.type = LayerType::reshape;
  s.shape = std::move(sample_shape);
  return s;
}

Network::Network(std::vector<std::size_t> input_shape,
                 std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_shape_(std::move(input_shape)), specs_(std::move(specs)) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> shape = input_shape_;
  for (const LayerSpec& spec : specs_) {
    auto layer = make_layer(spec, shape);
    std::vector<std::size_t> batched{1};
    batched.insert(batched.end(), shape.begin(), shape.end());
    auto out = layer->output_shape(batched);
    shape.assign(out.begin() + 1, out.end());
    layer->initialize(rng);
    layers_.push_back(std::move(layer));
  }
}

std::vector<std::size_t> Network::output_shape() const {
  std::vector<std::size_t> shape{1};
  shape.insert(shape.end(), input_shape_.begin(), input_shape_.end());
  for (const auto& layer : layers_) shape = layer->output_shape(shape);
  return {shape.begin() + 1, shape.end()};
}

void Network::check_input(const Tensor& input) const {
  const auto& s = input.shape();
  if (s.size() != input_shape_.size() + 1 ||
      !std::equal(input_shape_.begin(), input_shape_.end(), s.begin() + 1)) {
    throw ShapeError("network input " + input.shape_string() +
                     " does not match per-sample shape " +
                     shape_string(input_shape_));
  }
}

Tensor Network::forward(const Tensor& input) const {
  check_input(input);
  Tensor x = input;
  for (const auto& layer : layers_) x = layer->forward(x);
  return x;
}

Tensor Network::forward_train(const Tensor& input) {
  check_input(input);
  Tensor x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i]->forward_train(x);
    x.check_finite("forward pass of layer " + std::to_string(i) + " (" +
                   layers_[i]->kind() + ")");
  }
  return x;
}

void Network::backward(const Tensor& grad_output) {
  Tensor g = grad_output;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    g = layers_[i]->backward(g);
    const std::string where = "gradient of layer " + std::to_string(i) + " (" +
                              layers_[i]->kind() + ")";
    g.check_finite(where);
    for (Parameter* p : layers_[i]->parameters()) p->grad.check_finite(where);
  }
}

std::vector<NamedParameter> Network::parameters() {
  std::vector<NamedParameter> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (Parameter* p : layers_[i]->parameters()) {
      out.push_back({"layer" + std::to_string(i) + "." + p->name, p});
    }
  }
  return out;
}

void Network::zero_grad() {
  for (auto& np : parameters()) np.parameter->grad.fill(0.0);
}

std::size_t Network::parameter_count() const {
  std::size_t count = 0;
  for (auto& np : const_cast<Network*>(this)->parameters())
    count += np.parameter->value.size();
  return count;
}

std::vector<Tensor> Network::parameter_values() const {
  std::vector<Tensor> out;
  for (auto& np : const_cast<Network*>(this)->parameters())
    out.push_back(np.parameter->value);
  return out;
}

void Network::set_parameter_values(const std::vector<Tensor>& values) {
  auto params = parameters();
  if (values.size() != params.size()) {
    throw ConfigError("parameter count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (values[i].shape() != params[i].parameter->value.shape()) {
      throw ConfigError("shape mismatch for " + params[i].name);
    }
    params[i].parameter->value = values[i];
  }
}

double mse_loss(const Tensor& prediction, const Tensor& target, Tensor* grad) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("loss: prediction " + prediction.shape_string() +
                     " vs target " + target.shape_string());
  }
  const auto count = static_cast<double>(prediction.size());
  double sum = 0.0;
  if (grad) *grad = Tensor(prediction.shape());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double diff = prediction[i] - target[i];
    sum += diff * diff;
    if (grad) (*grad)[i] = 2.0 * diff / count;
  }
  return sum / count;
}

// ---------------------------------------------------------------- checkpoints

namespace {

json network_to_json(Network& network, const Checkpoint& meta) {
  json j;
  j["format"] = "nilm-checkpoint";
  j["version"] = 1;
  j["manifest_hash"] = meta.manifest_hash;
  j["step"] = meta.step;
  j["input_shape"] = network.input_shape();
  json layers = json::array();
  for (const auto& spec : network.specs()) layers.push_back(spec_to_json(spec));
  j["layers"] = layers;
  json tensors = json::array();
  for (auto& np : network.parameters()) {
    tensors.push_back({{"name", np.name},
                       {"shape", np.parameter->value.shape()},
                       {"data", np.parameter->value.values()}});
  }
  j["tensors"] = tensors;
  return j;
}

json read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::from_cbor(bytes);
  } catch (const json::exception& e) {
    throw DataError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "nilm-checkpoint") {
    throw DataError(path.string() + " is not a checkpoint");
  }
  return j;
}

void load_tensors(const json& j, Network& network) {
  auto params = network.parameters();
  const auto& tensors = j.at("tensors");
  if (tensors.size() != params.size()) {
    throw ConfigError("checkpoint holds " + std::to_string(tensors.size()) +
                      " tensors, network expects " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = tensors[i];
    const auto name = t.at("name").get<std::string>();
    const auto shape = t.at("shape").get<std::vector<std::size_t>>();
    if (name != params[i].name || shape != params[i].parameter->value.shape()) {
      throw ConfigError("checkpoint tensor " + name + " " +
                        shape_string(shape) + " does not match " +
                        params[i].name + " " +
                        params[i].parameter->value.shape_string());
    }
    params[i].parameter->value =
        Tensor(shape, t.at("data").get<std::vector<double>>());
  }
}

void fill_meta(const json& j, Checkpoint* meta) {
  if (!meta) return;
  meta->manifest_hash = j.at("manifest_hash").get<std::string>();
  meta->step = j.at("step").get<std::uint64_t>();
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, Network& network,
                     const Checkpoint& meta) {
  const auto bytes = json::to_cbor(network_to_json(network, meta));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Network load_checkpoint(const std::filesystem::path& path, Checkpoint* meta) {
  const json j = read_container(path);
  std::vector<LayerSpec> specs;
  for (const auto& l : j.at("layers")) specs.push_back(spec_from_json(l));
  Network network(j.at("input_shape").get<std::vector<std::size_t>>(),
                  std::move(specs), 0);
  load_tensors(j, network);
  fill_meta(j, meta);
  return network;
}

void load_parameters(const std::filesystem::path& path, Network& network,
                     Checkpoint* meta) {
  const json j = read_container(path);
  load_tensors(j, network);
  fill_meta(j, meta);
}

}  // namespace nilm
