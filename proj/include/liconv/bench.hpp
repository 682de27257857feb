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
#ifndef LICONV_BENCH_HPP_
#define LICONV_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace liconv {

// One timed grid point. Three pipelines share the row: the plain dilated
// convolution baseline, the LI pipeline with w_l = 0, and the LI pipeline
// with w_l > 0. Times are medians over the measured repetitions, in
// milliseconds. overhead_pct compares li_ms against base_ms.
struct BenchRow {
  std::string name;  // "op" for grid rows, "model" for whole-network rows
  int c = 0, h = 0, w = 0;
  int d = 0;  // conv dilation; 0 on model rows (mixed rates inside)
  int t = 0, e = 0;
  std::string mode;  // "fwd" or "fwdbwd"
  double base_ms = 0.0, li0_ms = 0.0, li_ms = 0.0;
  // Median over repetitions of the paired per-repetition li/base ratio,
  // minus one. Pairing cancels clock drift that a ratio of medians keeps.
  double overhead_pct = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  int reps = 0, warmup = 0;
  int op_rows() const;
  // Header name,c,h,w,d,t,e,mode,base_ms,li0_ms,li_ms,overhead_pct.
  std::string csv() const;
};

struct BenchOptions {
  int reps = 21;    // measured repetitions per pipeline (median reported)
  int warmup = 3;   // discarded leading repetitions
  bool include_model = true;
  int model_hw = 129;
  uint64_t seed = 20260816;
};

// Times the fixed op grid C{8,16} x HW{17,33} x d{1,2} x t{1,2} x e{1,2} in
// both fwd and fwdbwd modes (64 rows), then the toy segmenter against its
// LI-free twin at model_hw. A row's pipelines are timed round-robin so clock
// drift cancels out of the comparison, and each repetition loops the
// pipeline enough times to stay above ~0.5 ms before the clock is read.
BenchReport run_bench(const BenchOptions& opt = {});

}  // namespace liconv

#endif  // LICONV_BENCH_HPP_
