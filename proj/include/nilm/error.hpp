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

#include <stdexcept>
#include <string>

namespace nilm {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV, activation stores, grids).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, flags or checkpoint/manifest mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor shape mismatch between a layer and its input.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf detected in a forward or backward pass, or a diverged loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nilm
