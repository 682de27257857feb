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
#ifndef LICONV_ORACLE_HPP_
#define LICONV_ORACLE_HPP_

// Brute-force reference implementations, double precision only, written as
// literal sums with per-tap bounds checks. These deliberately share no
// indexing helpers with the optimized kernels; they are the ground truth the
// fast paths are checked against.

#include <functional>
#include <string>
#include <vector>

#include "liconv/conv.hpp"
#include "liconv/li.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

struct OracleReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::string worst;   // where the worst relative error occurred
  size_t compared = 0;
  bool pass(double rel_tol) const { return max_rel_err <= rel_tol; }
  std::string to_text() const;
};

// rel err = |got - want| / max(floor, |want|), floor 1e-9.
void oracle_compare(OracleReport* rep, const std::string& where,
                    const Tensor4<double>& got, const Tensor4<double>& want,
                    double abs_floor = 1e-9);

Tensor4<double> oracle_dilated_conv(const Tensor4<double>& x,
                                    const Tensor4<double>& w,
                                    const Tensor4<double>& bias,
                                    const ConvSpec& sp);

Tensor4<double> oracle_depthwise_conv(const Tensor4<double>& x,
                                      const Tensor4<double>& w,
                                      const Tensor4<double>& bias,
                                      const ConvSpec& sp);

Tensor4<double> oracle_li_layer(const Tensor4<double>& x,
                                const std::vector<double>& wl,
                                const LIKernelSpec& sp);

Tensor4<double> oracle_li_conv(const Tensor4<double>& x,
                               const std::vector<double>& wl,
                               const Tensor4<double>& w,
                               const Tensor4<double>& bias,
                               const LIConvSpec& sp);

// Central-difference gradient of a scalar function of a flat parameter
// vector; the reference for every gradient check.
std::vector<double> oracle_grad(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& theta, double step);

}  // namespace liconv

#endif  // LICONV_ORACLE_HPP_
