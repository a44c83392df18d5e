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

#include <cmath>

#include "nilm/kernels.hpp"

namespace nilm::kernels::serial {

void matmul_nn(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c.data() + i * n;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* bp = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void matmul_tn(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c.data() + i * n;
    if (!accumulate)
      for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double api = a[p * m + i];
      if (api == 0.0) continue;
      const double* bp = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

void matmul_nt(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b.data() + j * k;
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) sum += ai[p] * bj[p];
      c[i * n + j] = accumulate ? c[i * n + j] + sum : sum;
    }
  }
}

void im2col(std::span<const double> input, const ConvGeometry& g,
            std::span<double> cols) {
  const std::size_t patch = g.patch();
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t t = 0; t < g.out_length; ++t) {
      double* row = cols.data() + (b * g.out_length + t) * patch;
      for (std::size_t f = 0; f < g.filter_size; ++f) {
        const std::size_t pos = t * g.stride + f;
        const bool inside = pos >= g.pad_left && pos - g.pad_left < g.length;
        const double* src =
            inside ? input.data() + (b * g.length + pos - g.pad_left) * g.channels
                   : nullptr;
        for (std::size_t ch = 0; ch < g.channels; ++ch)
          row[f * g.channels + ch] = inside ? src[ch] : 0.0;
      }
    }
  }
}

void col2im_add(std::span<const double> cols, const ConvGeometry& g,
                std::span<double> input_grad) {
  const std::size_t patch = g.patch();
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t t = 0; t < g.out_length; ++t) {
      const double* row = cols.data() + (b * g.out_length + t) * patch;
      for (std::size_t f = 0; f < g.filter_size; ++f) {
        const std::size_t pos = t * g.stride + f;
        if (pos < g.pad_left || pos - g.pad_left >= g.length) continue;
        double* dst =
            input_grad.data() + (b * g.length + pos - g.pad_left) * g.channels;
        for (std::size_t ch = 0; ch < g.channels; ++ch)
          dst[ch] += row[f * g.channels + ch];
      }
    }
  }
}

void nearest_total(std::span<const double> targets,
                   std::span<const double> totals,
                   std::span<std::size_t> chosen) {
  for (std::size_t t = 0; t < targets.size(); ++t) {
    std::size_t best = 0;
    double best_residual = std::abs(targets[t] - totals[0]);
    for (std::size_t s = 1; s < totals.size(); ++s) {
      const double r = std::abs(targets[t] - totals[s]);
      if (r < best_residual) {
        best_residual = r;
        best = s;
      }
    }
    chosen[t] = best;
  }
}

}  // namespace nilm::kernels::serial
