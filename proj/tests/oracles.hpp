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

// Independent reference implementations used to check the library: brute
// force where the library is clever, and finite differences for gradients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nilm/baselines.hpp"
#include "nilm/layers.hpp"
#include "nilm/network.hpp"
#include "nilm/timeseries.hpp"

namespace oracle {

// ------------------------------------------------------------ activations

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  bool operator==(const Span&) const = default;
};

// Marks above-threshold samples, bridges every interior sub-threshold
// stretch shorter than min_off, then keeps the marked runs that last at
// least min_on.
inline std::vector<Span> activation_spans(const std::vector<double>& v,
                                          const nilm::ActivationParams& p,
                                          double period) {
  const std::size_t n = v.size();
  std::vector<int> mark(n, 0);
  for (std::size_t i = 0; i < n; ++i) mark[i] = v[i] > p.on_power_threshold;
  std::vector<int> bridged = mark;
  for (std::size_t i = 0; i < n; ++i) {
    if (mark[i]) continue;
    std::size_t j = i;
    while (j < n && !mark[j]) ++j;
    const bool interior = i > 0 && j < n;
    if (interior && static_cast<double>(j - i) * period < p.min_off_duration) {
      for (std::size_t k = i; k < j; ++k) bridged[k] = 1;
    }
    i = j;
  }
  std::vector<Span> out;
  for (std::size_t i = 0; i < n;) {
    if (!bridged[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && bridged[j]) ++j;
    if (static_cast<double>(j - i) * period >= p.min_on_duration) out.push_back({i, j});
    i = j;
  }
  return out;
}

// ------------------------------------------------------------ gradients

struct GradientReport {
  double max_relative_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-7});
  return std::abs(analytic - numeric) / scale;
}

inline void record(GradientReport& r, double analytic, double numeric,
                   const std::string& where) {
  const double e = relative_error(analytic, numeric);
  ++r.checked;
  if (e > r.max_relative_error) {
    r.max_relative_error = e;
    r.worst = where + " analytic=" + std::to_string(analytic) +
              " numeric=" + std::to_string(numeric);
  }
}

inline nilm::Tensor random_tensor(std::vector<std::size_t> shape,
                                  std::mt19937_64& rng, double scale = 1.0) {
  nilm::Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& x : t.values()) x = u(rng);
  return t;
}

// Checks d(sum(r * layer(x)))/d{params, x} against central differences.
inline GradientReport check_layer(nilm::Layer& layer, nilm::Tensor input,
                                  std::uint64_t seed, double eps = 1e-5) {
  std::mt19937_64 rng(seed);
  const nilm::Tensor probe_out = layer.forward(input);
  const nilm::Tensor r = random_tensor(probe_out.shape(), rng);
  auto objective = [&](const nilm::Tensor& x) {
    const nilm::Tensor y = layer.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
    return s;
  };

  for (auto* p : layer.parameters()) p->grad.fill(0.0);
  layer.forward_train(input);
  const nilm::Tensor dx = layer.backward(r);

  GradientReport report;
  for (auto* p : layer.parameters()) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + eps;
      const double up = objective(input);
      p->value[i] = saved - eps;
      const double down = objective(input);
      p->value[i] = saved;
      record(report, p->grad[i], (up - down) / (2 * eps),
             layer.kind() + "." + p->name + "[" + std::to_string(i) + "]");
    }
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double saved = input[i];
    input[i] = saved + eps;
    const double up = objective(input);
    input[i] = saved - eps;
    const double down = objective(input);
    input[i] = saved;
    record(report, dx[i], (up - down) / (2 * eps),
           layer.kind() + ".input[" + std::to_string(i) + "]");
  }
  return report;
}

// Checks the MSE gradient of a whole network with respect to every
// parameter.
inline GradientReport check_network(nilm::Network& net, const nilm::Tensor& input,
                                    const nilm::Tensor& target, double eps = 1e-5) {
  net.zero_grad();
  nilm::Tensor grad;
  nilm::mse_loss(net.forward_train(input), target, &grad);
  net.backward(grad);

  GradientReport report;
  for (auto& np : net.parameters()) {
    auto& p = *np.parameter;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + eps;
      const double up = nilm::mse_loss(net.forward(input), target);
      p.value[i] = saved - eps;
      const double down = nilm::mse_loss(net.forward(input), target);
      p.value[i] = saved;
      record(report, p.grad[i], (up - down) / (2 * eps),
             np.name + "[" + std::to_string(i) + "]");
    }
  }
  return report;
}

// ------------------------------------------------------------ baselines

inline std::vector<std::vector<std::size_t>> all_joint_states(
    const std::vector<nilm::ApplianceStateModel>& models) {
  std::vector<std::vector<std::size_t>> out{{}};
  for (const auto& m : models) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& prefix : out) {
      for (std::size_t s = 0; s < m.states(); ++s) {
        auto e = prefix;
        e.push_back(s);
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline double total_power(const std::vector<nilm::ApplianceStateModel>& models,
                          const std::vector<std::size_t>& s) {
  double t = 0.0;
  for (std::size_t a = 0; a < models.size(); ++a) t += models[a].state_powers[s[a]];
  return t;
}

inline double co_min_residual(const std::vector<nilm::ApplianceStateModel>& models,
                              double y) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : all_joint_states(models))
    best = std::min(best, std::abs(y - total_power(models, s)));
  return best;
}

inline double path_log_probability(const std::vector<nilm::ApplianceStateModel>& models,
                                   const std::vector<double>& y,
                                   const std::vector<std::vector<std::size_t>>& path) {
  double lp = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    double mean = 0.0, var = 0.0;
    for (std::size_t a = 0; a < models.size(); ++a) {
      const auto& m = models[a];
      const std::size_t s = path[t][a];
      mean += m.state_powers[s];
      var += m.emission_std[s] * m.emission_std[s];
      lp += t == 0 ? std::log(m.initial[s]) : std::log(m.transition[path[t - 1][a]][s]);
    }
    lp += -0.5 * std::log(2.0 * std::numbers::pi * var) -
          (y[t] - mean) * (y[t] - mean) / (2.0 * var);
  }
  return lp;
}

// Maximum log probability over every joint path of length y.size().
inline double fhmm_brute_force(const std::vector<nilm::ApplianceStateModel>& models,
                               const std::vector<double>& y) {
  const auto joint = all_joint_states(models);
  const std::size_t k = joint.size();
  const std::size_t steps = y.size();
  std::vector<std::size_t> idx(steps, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> path(steps);
  while (true) {
    for (std::size_t t = 0; t < steps; ++t) path[t] = joint[idx[t]];
    best = std::max(best, path_log_probability(models, y, path));
    std::size_t t = 0;
    while (t < steps && ++idx[t] == k) idx[t++] = 0;
    if (t == steps) break;
  }
  return best;
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = u(rng));
  for (double& x : p) x /= s;
  return p;
}

inline nilm::ApplianceStateModel random_model(std::size_t states, std::mt19937_64& rng,
                                              const std::string& id) {
  nilm::ApplianceStateModel m;
  m.appliance_id = id;
  std::uniform_real_distribution<double> watts(10.0, 3000.0);
  std::uniform_real_distribution<double> sd(10.0, 300.0);
  m.state_powers.push_back(0.0);
  for (std::size_t s = 1; s < states; ++s) m.state_powers.push_back(watts(rng));
  std::sort(m.state_powers.begin(), m.state_powers.end());
  for (std::size_t s = 0; s < states; ++s) {
    m.transition.push_back(random_simplex(states, rng));
    m.emission_std.push_back(sd(rng));
  }
  m.initial = random_simplex(states, rng);
  return m;
}

}  // namespace oracle
