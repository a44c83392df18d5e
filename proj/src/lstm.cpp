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

#include <algorithm>
#include <cmath>

#include "nilm/error.hpp"
#include "nilm/kernels.hpp"
#include "nilm/layers.hpp"

namespace nilm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// Per-step activations recorded by forward_train, indexed by processing
// step s (time t = s, or T-1-s when reversed). Each gate block is
// [batch, hidden].
struct Lstm::Trace {
  std::size_t batch = 0;
  std::size_t steps = 0;
  Tensor input;
  std::vector<double> gates;  // [steps, batch, 4 * hidden]: i, f, g, o
  std::vector<double> cell;   // [steps, batch, hidden]
  std::vector<double> cell_tanh;
  std::vector<double> hidden;  // [steps, batch, hidden]
};

Lstm::Lstm(std::size_t inputs, std::size_t hidden, bool peepholes,
           bool reversed, std::size_t bptt_steps)
    : inputs_(inputs),
      hidden_(hidden),
      peepholes_(peepholes),
      reversed_(reversed),
      bptt_steps_(bptt_steps) {
  const std::string prefix = reversed ? "bwd." : "fwd.";
  w_input_ = Parameter(prefix + "W_in", {inputs, 4 * hidden});
  w_recurrent_ = Parameter(prefix + "W_hid", {hidden, 4 * hidden});
  bias_ = Parameter(prefix + "b", {4 * hidden});
  if (peepholes) {
    peep_input_ = Parameter(prefix + "peep_i", {hidden});
    peep_forget_ = Parameter(prefix + "peep_f", {hidden});
    peep_output_ = Parameter(prefix + "peep_o", {hidden});
  }
}

std::vector<Parameter*> Lstm::parameters() {
  std::vector<Parameter*> out{&w_input_, &w_recurrent_, &bias_};
  if (peepholes_) {
    out.push_back(&peep_input_);
    out.push_back(&peep_forget_);
    out.push_back(&peep_output_);
  }
  return out;
}

Parameter& Lstm::peephole(Gate gate) {
  if (!peepholes_) throw ConfigError("lstm layer has no peepholes");
  switch (gate) {
    case kInput: return peep_input_;
    case kForget: return peep_forget_;
    case kOutput: return peep_output_;
    default: throw ConfigError("cell candidate has no peephole");
  }
}

void Lstm::initialize(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (double& v : w_input_.value.values()) v = dist(rng);
  for (double& v : w_recurrent_.value.values()) v = dist(rng);
  bias_.value.fill(0.0);
  if (peepholes_) {
    for (Parameter* p : {&peep_input_, &peep_forget_, &peep_output_})
      for (double& v : p->value.values()) v = dist(rng);
  }
}

std::vector<std::size_t> Lstm::output_shape(
    std::span<const std::size_t> input_shape) const {
  if (input_shape.size() != 3 || input_shape[2] != inputs_) {
    throw ShapeError("dimension error in lstm layer: expected [batch, time, " +
                     std::to_string(inputs_) + "], got " +
                     shape_string(input_shape));
  }
  return {input_shape[0], input_shape[1], hidden_};
}

Tensor Lstm::run(const Tensor& input, Trace* trace) const {
  const auto shape = output_shape(input.shape());
  const std::size_t batch = shape[0];
  const std::size_t steps = shape[1];
  const std::size_t n = hidden_;
  const std::size_t n4 = 4 * n;

  // Input contributions for every step at once: [batch * steps, 4n].
  std::vector<double> xz(batch * steps * n4);
  kernels::matmul_nn(input.data(), w_input_.value.data(), xz, batch * steps,
                     inputs_, n4, false);

  Tensor out(shape);
  std::vector<double> h_prev(batch * n, 0.0);
  std::vector<double> c_prev(batch * n, 0.0);
  std::vector<double> z(batch * n4);
  std::vector<double> h(batch * n);
  std::vector<double> c(batch * n);
  std::vector<double> tc(batch * n);

  if (trace) {
    trace->batch = batch;
    trace->steps = steps;
    trace->input = input;
    trace->gates.assign(steps * batch * n4, 0.0);
    trace->cell.assign(steps * batch * n, 0.0);
    trace->cell_tanh.assign(steps * batch * n, 0.0);
    trace->hidden.assign(steps * batch * n, 0.0);
  }

  const auto& b = bias_.value.values();
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reversed_ ? steps - 1 - s : s;
    for (std::size_t bi = 0; bi < batch; ++bi) {
      const double* src = xz.data() + (bi * steps + t) * n4;
      double* dst = z.data() + bi * n4;
      for (std::size_t j = 0; j < n4; ++j) dst[j] = src[j] + b[j];
    }
    if (s > 0) {
      kernels::matmul_nn(h_prev, w_recurrent_.value.data(), z, batch, n, n4,
                         true);
    }
    for (std::size_t bi = 0; bi < batch; ++bi) {
      double* zb = z.data() + bi * n4;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = bi * n + j;
        const double cp = c_prev[k];
        double zi = zb[kInput * n + j];
        double zf = zb[kForget * n + j];
        if (peepholes_) {
          zi += peep_input_.value[j] * cp;
          zf += peep_forget_.value[j] * cp;
        }
        const double ig = sigmoid(zi);
        const double fg = sigmoid(zf);
        const double gg = std::tanh(zb[kCell * n + j]);
        const double cc = fg * cp + ig * gg;
        double zo = zb[kOutput * n + j];
        if (peepholes_) zo += peep_output_.value[j] * cc;
        const double og = sigmoid(zo);
        const double tcc = std::tanh(cc);
        c[k] = cc;
        tc[k] = tcc;
        h[k] = og * tcc;
        zb[kInput * n + j] = ig;
        zb[kForget * n + j] = fg;
        zb[kCell * n + j] = gg;
        zb[kOutput * n + j] = og;
      }
      std::copy_n(h.data() + bi * n, n,
                  out.data().data() + (bi * steps + t) * n);
    }
    if (trace) {
      std::copy(z.begin(), z.end(), trace->gates.begin() + s * batch * n4);
      std::copy(c.begin(), c.end(), trace->cell.begin() + s * batch * n);
      std::copy(tc.begin(), tc.end(), trace->cell_tanh.begin() + s * batch * n);
      std::copy(h.begin(), h.end(), trace->hidden.begin() + s * batch * n);
    }
    std::swap(h_prev, h);
    std::swap(c_prev, c);
  }
  return out;
}

Tensor Lstm::forward(const Tensor& input) const { return run(input, nullptr); }

Tensor Lstm::forward_train(const Tensor& input) {
  trace_ = std::make_shared<Trace>();
  return run(input, trace_.get());
}

Tensor Lstm::backward(const Tensor& grad_output) {
  if (!trace_) throw ConfigError("lstm backward called without forward_train");
  const Trace& tr = *trace_;
  const std::size_t batch = tr.batch;
  const std::size_t steps = tr.steps;
  const std::size_t n = hidden_;
  const std::size_t n4 = 4 * n;
  const std::size_t horizon =
      bptt_steps_ == 0 ? steps : std::min(bptt_steps_, steps);

  // Gradient with respect to gate pre-activations, laid out like the input
  // contributions: [batch * steps, 4n].
  std::vector<double> dz_all(batch * steps * n4, 0.0);
  std::vector<double> dz(batch * n4);
  std::vector<double> dh_rec(batch * n, 0.0);
  std::vector<double> dc_rec(batch * n, 0.0);
  std::vector<double> zeros(batch * n, 0.0);

  for (std::size_t s = steps; s-- > steps - horizon;) {
    const std::size_t t = reversed_ ? steps - 1 - s : s;
    const double* gates = tr.gates.data() + s * batch * n4;
    const double* cell = tr.cell.data() + s * batch * n;
    const double* ctanh = tr.cell_tanh.data() + s * batch * n;
    const double* c_prev =
        s > 0 ? tr.cell.data() + (s - 1) * batch * n : zeros.data();

    for (std::size_t bi = 0; bi < batch; ++bi) {
      const double* g = gates + bi * n4;
      double* d = dz.data() + bi * n4;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = bi * n + j;
        const double ig = g[kInput * n + j];
        const double fg = g[kForget * n + j];
        const double gg = g[kCell * n + j];
        const double og = g[kOutput * n + j];
        const double dh =
            grad_output[(bi * steps + t) * n + j] + dh_rec[k];
        const double dzo = dh * ctanh[k] * og * (1.0 - og);
        double dc = dc_rec[k] + dh * og * (1.0 - ctanh[k] * ctanh[k]);
        if (peepholes_) dc += dzo * peep_output_.value[j];
        const double dzi = dc * gg * ig * (1.0 - ig);
        const double dzf = dc * c_prev[k] * fg * (1.0 - fg);
        const double dzg = dc * ig * (1.0 - gg * gg);
        double dc_prev = dc * fg;
        if (peepholes_) {
          peep_output_.grad[j] += dzo * cell[k];
          peep_input_.grad[j] += dzi * c_prev[k];
          peep_forget_.grad[j] += dzf * c_prev[k];
          dc_prev += dzi * peep_input_.value[j] + dzf * peep_forget_.value[j];
        }
        dc_rec[k] = dc_prev;
        d[kInput * n + j] = dzi;
        d[kForget * n + j] = dzf;
        d[kCell * n + j] = dzg;
        d[kOutput * n + j] = dzo;
      }
      std::copy_n(d, n4, dz_all.data() + (bi * steps + t) * n4);
    }

    if (s > 0) {
      const double* h_prev = tr.hidden.data() + (s - 1) * batch * n;
      kernels::matmul_tn({h_prev, batch * n}, dz, w_recurrent_.grad.data(), n,
                         batch, n4, true);
      kernels::matmul_nt(dz, w_recurrent_.value.data(), dh_rec, batch, n4, n,
                         false);
    } else {
      std::fill(dh_rec.begin(), dh_rec.end(), 0.0);
    }
  }

  kernels::matmul_tn(tr.input.data(), dz_all, w_input_.grad.data(), inputs_,
                     batch * steps, n4, true);
  for (std::size_t r = 0; r < batch * steps; ++r)
    for (std::size_t j = 0; j < n4; ++j) bias_.grad[j] += dz_all[r * n4 + j];

  Tensor dx(tr.input.shape());
  kernels::matmul_nt(dz_all, w_input_.value.data(), dx.data(), batch * steps,
                     n4, inputs_, false);
  return dx;
}

}  // namespace nilm
