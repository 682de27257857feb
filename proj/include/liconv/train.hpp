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
// Two-phase training: a main phase over all parameters, then an optional
// fine-tune phase with everything frozen except the li_weights group. The
// optimizer state is rebuilt at the phase boundary.
#ifndef LICONV_TRAIN_HPP_
#define LICONV_TRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "liconv/data.hpp"
#include "liconv/model.hpp"
#include "liconv/param.hpp"

namespace liconv {

struct TrainSchedule {
  int main_epochs = 30;
  int li_finetune_epochs = 10;
  int batch_size = 8;
  double lr = 3e-4;
  double adam_epsilon = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double l2_lambda = 4e-5;
  uint64_t seed = 1;  // shuffle and augmentation stream
  bool augment = true;
  double aug_lo = 0.75;
  double aug_hi = 1.25;
  // Validation cadence in epochs; phase boundaries are always evaluated.
  // 0 means phase boundaries only.
  int eval_every = 1;
};

struct EpochRow {
  int epoch = 0;  // 1-based, continuous across phases
  int phase = 1;
  double loss = 0.0;
  double lr = 0.0;
  double val_miou = std::nan("");  // NaN when not evaluated this epoch
};

struct TrainResult {
  std::vector<EpochRow> rows;
  double phase1_val_miou = std::nan("");  // after the last main epoch
  double final_val_miou = std::nan("");   // after all training
  // Header "epoch,phase,loss,lr,miou"; the miou cell is empty on epochs
  // without a validation pass.
  std::string csv() const;
};

// Mean IoU of single-scale argmax predictions over a dataset.
double evaluate_miou(const SegmenterConfig& cfg, ParamStore<float>& store,
                     const std::vector<SegSample>& data, int batch_size = 8);

// Trains in place. The store must hold the parameters init_segmenter_params
// creates for cfg. Empty training data is a configuration error; a non-finite
// loss raises NumericError stamped with the epoch. Deterministic per
// (initial store, schedule seed).
TrainResult train_two_phase(const SegmenterConfig& cfg,
                            ParamStore<float>& store,
                            const std::vector<SegSample>& train_data,
                            const std::vector<SegSample>& val_data,
                            const TrainSchedule& sched);

}  // namespace liconv

#endif  // LICONV_TRAIN_HPP_
