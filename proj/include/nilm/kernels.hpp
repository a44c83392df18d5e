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
#include <span>

// Numeric inner loops. Every kernel exists twice with identical signatures:
// `serial` is the reference implementation kept for testing, `parallel`
// distributes independent output rows over OpenMP threads. Both evaluate each
// output element with the same summation order, so results are bitwise equal.
//
// Matrix products compute C[m x n] (+)= op(A)[m x k] * op(B)[k x n] on
// row-major storage; `accumulate` adds into C instead of overwriting.

namespace nilm::kernels {

struct ConvGeometry {
  std::size_t batch = 0;
  std::size_t length = 0;       // input time steps
  std::size_t channels = 0;     // input channels
  std::size_t filter_size = 0;
  std::size_t stride = 1;
  std::size_t pad_left = 0;
  std::size_t out_length = 0;

  std::size_t patch() const { return filter_size * channels; }
  std::size_t rows() const { return batch * out_length; }
};

namespace serial {

// A stored m x k, B stored k x n.
void matmul_nn(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate);
// A stored k x m, B stored k x n.
void matmul_tn(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate);
// A stored m x k, B stored n x k.
void matmul_nt(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate);
// Unfolds [batch, length, channels] into [rows, filter_size * channels]
// patches; taps outside the input read as zero.
void im2col(std::span<const double> input, const ConvGeometry& g,
            std::span<double> cols);
// Adjoint of im2col: scatters patch gradients back onto the input.
void col2im_add(std::span<const double> cols, const ConvGeometry& g,
                std::span<double> input_grad);
// For each target picks the first entry of `totals` with minimal absolute
// residual.
void nearest_total(std::span<const double> targets,
                   std::span<const double> totals,
                   std::span<std::size_t> chosen);

}  // namespace serial

namespace parallel {

// Same contracts as the serial versions.
void matmul_nn(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate);
void matmul_tn(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate);
void matmul_nt(std::span<const double> a, std::span<const double> b,
               std::span<double> c, std::size_t m, std::size_t k,
               std::size_t n, bool accumulate);
void im2col(std::span<const double> input, const ConvGeometry& g,
            std::span<double> cols);
void col2im_add(std::span<const double> cols, const ConvGeometry& g,
                std::span<double> input_grad);
void nearest_total(std::span<const double> targets,
                   std::span<const double> totals,
                   std::span<std::size_t> chosen);

}  // namespace parallel

// Library code calls the OpenMP variants through these aliases.
using parallel::col2im_add;
using parallel::im2col;
using parallel::matmul_nn;
using parallel::matmul_nt;
using parallel::matmul_tn;
using parallel::nearest_total;

}  // namespace nilm::kernels
