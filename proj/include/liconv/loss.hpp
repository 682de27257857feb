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
#ifndef LICONV_LOSS_HPP_
#define LICONV_LOSS_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "liconv/errors.hpp"
#include "liconv/param.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

inline constexpr int kIgnoreIndex = 255;

// L2 penalty over non-frozen conv-group weights only. W_l stays out because
// shrinking it toward 0 would switch inhibition off; biases stay out as usual.
template <typename T>
double l2_penalty(const ParamStore<T>& store, double lambda) {
  if (lambda == 0.0) return 0.0;
  double acc = 0.0;
  for (const auto& [name, p] : store) {
    if (p.group != ParamGroup::ConvWeights || p.frozen) continue;
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double v = double(p.value.data()[i]);
      acc += v * v;
    }
  }
  return lambda * acc;
}

// d(l2_penalty)/dw = 2*lambda*w, accumulated into the store's grads.
template <typename T>
void add_l2_grads(ParamStore<T>& store, double lambda) {
  if (lambda == 0.0) return;
  for (auto& [name, p] : store) {
    if (p.group != ParamGroup::ConvWeights || p.frozen) continue;
    for (size_t i = 0; i < p.value.size(); ++i)
      p.grad.data()[i] += T(2.0 * lambda * double(p.value.data()[i]));
  }
}

template <typename T>
struct LossResult {
  double loss = 0.0;  // ce + l2
  double ce = 0.0;
  double l2 = 0.0;
  long long scored = 0;     // pixels that contributed
  Tensor4<T> dlogits;       // d(loss)/d(logits), already divided by `scored`
};

// Mean softmax cross-entropy over non-ignored pixels, plus the L2 term when a
// parameter store is given. Labels are (N,1,H,W) ints in [0,C) or
// ignore_index. Log-sum-exp and the mean run in double.
template <typename T>
LossResult<T> cross_entropy_loss(const Tensor4<T>& logits,
                                 const Tensor4<int>& labels,
                                 int ignore_index = kIgnoreIndex,
                                 double l2_lambda = 0.0,
                                 const ParamStore<T>* params = nullptr) {
  const int N = logits.n(), C = logits.c(), H = logits.h(), W = logits.w();
  if (labels.n() != N || labels.c() != 1 || labels.h() != H || labels.w() != W)
    throw DimensionError("cross_entropy_loss: labels " + labels.shape_str() +
                         " do not match logits " + logits.shape_str());
  require_finite(logits, "logits");

  LossResult<T> r;
  r.dlogits = Tensor4<T>(N, C, H, W);
  long long scored = 0;
  for (int n = 0; n < N; ++n)
    for (int h = 0; h < H; ++h)
      for (int w = 0; w < W; ++w)
        if (labels.at(n, 0, h, w) != ignore_index) {
          const int l = labels.at(n, 0, h, w);
          if (l < 0 || l >= C)
            throw DataError("cross_entropy_loss: label " + std::to_string(l) +
                            " outside [0," + std::to_string(C) + ")");
          ++scored;
        }
  if (scored == 0)
    throw NumericError("cross_entropy_loss: every pixel is ignored");
  r.scored = scored;
  const double inv_m = 1.0 / double(scored);

  double ce = 0.0;
  std::vector<double> row(static_cast<size_t>(C));
  for (int n = 0; n < N; ++n)
    for (int h = 0; h < H; ++h)
      for (int w = 0; w < W; ++w) {
        const int label = labels.at(n, 0, h, w);
        if (label == ignore_index) continue;
        double mx = -1e300;
        for (int c = 0; c < C; ++c) {
          row[size_t(c)] = double(logits.at(n, c, h, w));
          mx = std::max(mx, row[size_t(c)]);
        }
        double sum = 0.0;
        for (int c = 0; c < C; ++c) sum += std::exp(row[size_t(c)] - mx);
        const double lse = mx + std::log(sum);
        ce += lse - row[size_t(label)];
        for (int c = 0; c < C; ++c) {
          const double p = std::exp(row[size_t(c)] - lse);
          const double onehot = (c == label) ? 1.0 : 0.0;
          r.dlogits.at(n, c, h, w) = T((p - onehot) * inv_m);
        }
      }
  r.ce = ce * inv_m;
  r.l2 = params ? l2_penalty(*params, l2_lambda) : 0.0;
  r.loss = r.ce + r.l2;
  if (!std::isfinite(r.loss))
    throw NumericError("cross_entropy_loss: non-finite loss");
  return r;
}

}  // namespace liconv

#endif  // LICONV_LOSS_HPP_
