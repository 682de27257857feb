/* Copyright 2026 The liconv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef LICONV_ERRORS_HPP_
#define LICONV_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace liconv {

// Shape/rank mismatches between tensors and operation requirements.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& m) : std::runtime_error(m) {}
};

// Non-finite values, undefined losses, divergence.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};

// Out-of-range hyper-parameters (w_l outside [0,1], t < 0, ...).
struct ParameterError : std::runtime_error {
  explicit ParameterError(const std::string& m) : std::runtime_error(m) {}
};

// Bad config files, flag combinations, unknown names.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Malformed datasets, files, label maps.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

// Metric requested where it is undefined (e.g. every pixel ignored).
struct MetricError : NumericError {
  explicit MetricError(const std::string& m) : NumericError(m) {}
};

}  // namespace liconv

#endif  // LICONV_ERRORS_HPP_
