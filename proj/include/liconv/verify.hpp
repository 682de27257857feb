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
// Self-check battery: kernel goldens, brute-force oracle sweeps, finite
// difference gradient checks, and structural invariants. The sweep functions
// are exposed on their own because the acceptance gate runs them at larger
// instance counts than the battery does.
#ifndef LICONV_VERIFY_HPP_
#define LICONV_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "liconv/gradcheck.hpp"
#include "liconv/oracle.hpp"

namespace liconv {

struct VerifyOptions {
  bool quick = false;    // subsampled battery, same coverage
  std::string inject;    // "" or a named fault: "kernel-sign"
  uint64_t seed = 20260816;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;  // worst-case descriptor
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
  const VerifyCheck* first_failure() const;  // null when everything passed
  std::string to_text() const;
};

VerifyReport run_verify(const VerifyOptions& opt = {});

// Composite LI pipeline (double) against the literal brute-force oracle over
// random configurations with t <= 2, e <= 3, d <= 4, spatial <= max_hw^2.
OracleReport li_conv_oracle_sweep(uint64_t seed, int instances, int max_hw);

// Dense dilated and depthwise convolutions against their oracles.
OracleReport conv_oracle_sweep(uint64_t seed, int instances, int max_hw);

// Central-difference checks of input/weight/bias/w_l gradients through the
// composite pipeline, in double. The report merges the worst case over all
// instances.
GradCheckReport li_conv_gradcheck_sweep(uint64_t seed, int instances);

// Central-difference check of every parameter gradient of a small segmenter
// under the cross-entropy loss, in double.
GradCheckReport model_gradcheck_sweep(uint64_t seed, int instances);

// Worst relative deviation between a forward pass with every w_l = 0 and the
// same weights run through the LI-free counterpart, over random instances.
double wl0_bottleneck_worst(uint64_t seed, int instances);
double wl0_aspp_worst(uint64_t seed, int instances);
double wl0_segmenter_worst(uint64_t seed, int instances);

}  // namespace liconv

#endif  // LICONV_VERIFY_HPP_
