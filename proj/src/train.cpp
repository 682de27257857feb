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
#include "liconv/train.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "liconv/autodiff.hpp"
#include "liconv/checkpoint.hpp"
#include "liconv/errors.hpp"
#include "liconv/loss.hpp"
#include "liconv/metrics.hpp"
#include "liconv/optim.hpp"

namespace liconv {

namespace {

void check_sample(const SegSample& s, int c, int h, int w, const char* which) {
  if (s.image.n() != 1 || s.image.c() != c || s.image.h() != h ||
      s.image.w() != w || s.labels.n() != 1 || s.labels.c() != 1 ||
      s.labels.h() != h || s.labels.w() != w)
    throw DimensionError(std::string(which) + " sample has image " +
                         s.image.shape_str() + " / labels " +
                         s.labels.shape_str() + ", expected (1," +
                         std::to_string(c) + "," + std::to_string(h) + "," +
                         std::to_string(w) + ")");
}

// Stacks samples[idx[lo..hi)] into one batch pair.
void fill_batch(const std::vector<SegSample>& samples,
                const std::vector<int>& idx, size_t lo, size_t hi,
                Tensor4<float>* bx, Tensor4<int>* by) {
  const int b = int(hi - lo);
  const SegSample& first = samples[size_t(idx[lo])];
  const int c = first.image.c(), h = first.image.h(), w = first.image.w();
  *bx = Tensor4<float>(b, c, h, w);
  *by = Tensor4<int>(b, 1, h, w);
  for (int n = 0; n < b; ++n) {
    const SegSample& s = samples[size_t(idx[lo + size_t(n)])];
    std::copy(s.image.data(), s.image.data() + s.image.size(),
              bx->data() + size_t(n) * s.image.size());
    std::copy(s.labels.data(), s.labels.data() + s.labels.size(),
              by->data() + size_t(n) * s.labels.size());
  }
}

}  // namespace

double evaluate_miou(const SegmenterConfig& cfg, ParamStore<float>& store,
                     const std::vector<SegSample>& data, int batch_size) {
  if (data.empty()) throw ConfigError("evaluate_miou: no samples");
  if (batch_size < 1) throw ConfigError("evaluate_miou: bad batch size");
  const int c = data[0].image.c(), h = data[0].image.h(),
            w = data[0].image.w();
  validate_input_size(cfg, h, w);
  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);

  ConfusionMatrix cm(cfg.num_classes);
  for (size_t i = 0; i < data.size();) {
    const size_t j = std::min(data.size(), i + size_t(batch_size));
    for (size_t k = i; k < j; ++k) check_sample(data[k], c, h, w, "eval");
    Tensor4<float> bx;
    Tensor4<int> by;
    fill_batch(data, idx, i, j, &bx, &by);
    const Tensor4<float> logits = segmenter_infer(bx, cfg, store);
    cm.update(argmax_channels(logits), by, 255);
    i = j;
  }
  return miou(cm).miou;
}

std::string TrainResult::csv() const {
  std::string out = "epoch,phase,loss,lr,miou\n";
  char buf[128];
  for (const EpochRow& r : rows) {
    if (std::isnan(r.val_miou)) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%g,\n", r.epoch, r.phase,
                    r.loss, r.lr);
    } else {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%g,%.4f\n", r.epoch,
                    r.phase, r.loss, r.lr, r.val_miou);
    }
    out += buf;
  }
  return out;
}

TrainResult train_two_phase(const SegmenterConfig& cfg,
                            ParamStore<float>& store,
                            const std::vector<SegSample>& train_data,
                            const std::vector<SegSample>& val_data,
                            const TrainSchedule& sched) {
  if (train_data.empty()) throw ConfigError("train: empty training dataset");
  if (sched.batch_size < 1) throw ConfigError("train: bad batch size");
  if (sched.main_epochs < 0 || sched.li_finetune_epochs < 0)
    throw ConfigError("train: negative epoch count");
  if (!(sched.lr > 0.0)) throw ConfigError("train: bad learning rate");
  validate_params_match(cfg, store);

  const int c = train_data[0].image.c(), h = train_data[0].image.h(),
            w = train_data[0].image.w();
  validate_input_size(cfg, h, w);
  for (const SegSample& s : train_data) check_sample(s, c, h, w, "train");

  const int total_epochs = sched.main_epochs + sched.li_finetune_epochs;
  Rng rng(sched.seed);
  std::vector<int> idx(train_data.size());
  std::iota(idx.begin(), idx.end(), 0);

  TrainResult result;
  auto maybe_eval = [&](int epoch, bool phase_end) -> double {
    if (val_data.empty()) return std::nan("");
    const bool due =
        sched.eval_every > 0 && epoch % sched.eval_every == 0;
    if (!due && !phase_end) return std::nan("");
    return evaluate_miou(cfg, store, val_data, sched.batch_size);
  };

  AdamState<float> adam;
  adam.lr = sched.lr;
  adam.epsilon = sched.adam_epsilon;
  adam.beta1 = sched.beta1;
  adam.beta2 = sched.beta2;

  store.unfreeze_all();
  // A zero-length main phase hands phase 2 the initial weights; record their
  // score as the phase-1 boundary value.
  if (!val_data.empty() && sched.main_epochs == 0)
    result.phase1_val_miou =
        evaluate_miou(cfg, store, val_data, sched.batch_size);
  int phase = 1;
  for (int epoch = 1; epoch <= total_epochs; ++epoch) {
    if (phase == 1 && epoch > sched.main_epochs) {
      phase = 2;
      store.freeze_all_except(ParamGroup::LiWeights);
      adam.reset();
    }

    rng.shuffle(idx.begin(), idx.end());
    double loss_sum = 0.0;
    int batches = 0;
    for (size_t i = 0; i < idx.size();) {
      const size_t j = std::min(idx.size(), i + size_t(sched.batch_size));
      Tensor4<float> bx;
      Tensor4<int> by;
      if (sched.augment) {
        std::vector<SegSample> aug;
        aug.reserve(j - i);
        for (size_t k = i; k < j; ++k)
          aug.push_back(random_scale_augment(train_data[size_t(idx[k])],
                                             sched.aug_lo, sched.aug_hi, rng));
        std::vector<int> aid(aug.size());
        std::iota(aid.begin(), aid.end(), 0);
        fill_batch(aug, aid, 0, aug.size(), &bx, &by);
      } else {
        fill_batch(train_data, idx, i, j, &bx, &by);
      }

      store.zero_grad();
      try {
        Tape<float> tape(&store);
        const int logits = segmenter_forward(tape, tape.input(bx), cfg);
        const LossResult<float> res = cross_entropy_loss(
            tape.value(logits), by, 255, sched.l2_lambda, &store);
        if (!std::isfinite(res.loss)) throw NumericError("non-finite loss");
        tape.backward(logits, res.dlogits);
        loss_sum += res.loss;
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
      if (sched.l2_lambda != 0.0)
        add_l2_grads(store, float(sched.l2_lambda));
      adam_step(store, adam);
      ++batches;
      i = j;
    }

    EpochRow row;
    row.epoch = epoch;
    row.phase = phase;
    row.loss = loss_sum / batches;
    row.lr = sched.lr;
    const bool phase_end =
        epoch == sched.main_epochs || epoch == total_epochs;
    row.val_miou = maybe_eval(epoch, phase_end);
    if (epoch == sched.main_epochs) result.phase1_val_miou = row.val_miou;
    if (epoch == total_epochs) result.final_val_miou = row.val_miou;
    result.rows.push_back(row);
  }

  if (total_epochs == 0) result.final_val_miou = result.phase1_val_miou;
  return result;
}

}  // namespace liconv
