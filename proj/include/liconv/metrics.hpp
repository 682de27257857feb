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
#ifndef LICONV_METRICS_HPP_
#define LICONV_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "liconv/errors.hpp"
#include "liconv/model.hpp"
#include "liconv/ops.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

// Truth-major class confusion counts. Accumulation is additive, so per-worker
// matrices can be merged in any partition of the data.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  // pred and truth are (N, 1, H, W) integer maps of equal shape. Pixels with
  // truth == ignore_index are skipped; any other value outside
  // [0, num_classes) is a data error.
  void update(const Tensor4<int>& pred, const Tensor4<int>& truth,
              int ignore_index = 255);
  void merge(const ConfusionMatrix& other);
  void reset();

  int num_classes() const { return nc_; }
  long long at(int truth, int pred) const;
  long long total() const;

 private:
  int nc_;
  std::vector<long long> counts_;
};

// Per-class IoU = TP / (TP + FP + FN). Classes absent from both truth and
// prediction are excluded from the mean; their per_class slot is NaN.
struct MiouResult {
  double miou = 0.0;
  std::vector<double> per_class;
  std::vector<char> scored;

  std::string to_csv() const;
  std::string to_text() const;
};

// Throws MetricError when no class is scored at all.
MiouResult miou(const ConfusionMatrix& cm);

// Channel softmax with double accumulators, shape-preserving.
template <typename T>
Tensor4<T> softmax_channels(const Tensor4<T>& logits) {
  Tensor4<T> out(logits.n(), logits.c(), logits.h(), logits.w());
  const int C = logits.c();
  if (C < 1) throw DimensionError("softmax_channels: no channels");
  for (int n = 0; n < logits.n(); ++n)
    for (int y = 0; y < logits.h(); ++y)
      for (int x = 0; x < logits.w(); ++x) {
        double mx = double(logits.at(n, 0, y, x));
        for (int c = 1; c < C; ++c)
          mx = std::max(mx, double(logits.at(n, c, y, x)));
        double z = 0.0;
        for (int c = 0; c < C; ++c)
          z += std::exp(double(logits.at(n, c, y, x)) - mx);
        for (int c = 0; c < C; ++c)
          out.at(n, c, y, x) =
              T(std::exp(double(logits.at(n, c, y, x)) - mx) / z);
      }
  return out;
}

// Argmax over channels; ties break toward the lower class index.
template <typename T>
Tensor4<int> argmax_channels(const Tensor4<T>& scores) {
  if (scores.c() < 1) throw DimensionError("argmax_channels: no channels");
  Tensor4<int> out(scores.n(), 1, scores.h(), scores.w());
  for (int n = 0; n < scores.n(); ++n)
    for (int y = 0; y < scores.h(); ++y)
      for (int x = 0; x < scores.w(); ++x) {
        int best = 0;
        T bv = scores.at(n, 0, y, x);
        for (int c = 1; c < scores.c(); ++c) {
          const T v = scores.at(n, c, y, x);
          if (v > bv) { bv = v; best = c; }
        }
        out.at(n, 0, y, x) = best;
      }
  return out;
}

// Smallest dim >= d the segmenter accepts: at least the output stride, with
// residue 0 or 1 mod the stride.
inline int next_valid_input_dim(int d, int output_stride) {
  if (d < output_stride) return output_stride;
  const int r = d % output_stride;
  return r <= 1 ? d : d + (output_stride - r);
}

// Multi-scale inference: per scale, resize the image, zero-pad bottom-right
// to a valid input size, forward, crop the logits back, softmax, resize the
// probabilities to native size. Probabilities are averaged across scales in
// double. A single scale of 1.0 reduces to plain single-scale inference.
template <typename T>
Tensor4<T> multiscale_probs(const Tensor4<T>& image, const SegmenterConfig& cfg,
                            ParamStore<T>& params,
                            const std::vector<double>& scales) {
  if (scales.empty()) throw ParameterError("multiscale_probs: no scales");
  for (double s : scales)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ParameterError("multiscale_probs: bad scale " + std::to_string(s));
  if (image.n() != 1)
    throw DimensionError("multiscale_probs: batch must be 1, got " +
                         image.shape_str());
  const int H = image.h(), W = image.w();

  Tensor4<double> acc(1, cfg.num_classes, H, W);
  for (double s : scales) {
    const int sh = std::max(1, int(std::lround(H * s)));
    const int sw = std::max(1, int(std::lround(W * s)));
    Tensor4<T> scaled =
        (sh == H && sw == W) ? image : bilinear_resize(image, sh, sw);
    const int ph = next_valid_input_dim(sh, cfg.output_stride);
    const int pw = next_valid_input_dim(sw, cfg.output_stride);
    if (ph != sh || pw != sw) {
      Tensor4<T> padded(1, scaled.c(), ph, pw);
      for (int c = 0; c < scaled.c(); ++c)
        for (int y = 0; y < sh; ++y)
          for (int x = 0; x < sw; ++x)
            padded.at(0, c, y, x) = scaled.at(0, c, y, x);
      scaled = std::move(padded);
    }
    Tensor4<T> logits = segmenter_infer(scaled, cfg, params);
    if (ph != sh || pw != sw) {
      Tensor4<T> cropped(1, logits.c(), sh, sw);
      for (int c = 0; c < logits.c(); ++c)
        for (int y = 0; y < sh; ++y)
          for (int x = 0; x < sw; ++x)
            cropped.at(0, c, y, x) = logits.at(0, c, y, x);
      logits = std::move(cropped);
    }
    Tensor4<T> probs = softmax_channels(logits);
    if (sh != H || sw != W) probs = bilinear_resize(probs, H, W);
    for (size_t i = 0; i < acc.size(); ++i)
      acc.data()[i] += double(probs.data()[i]);
  }

  Tensor4<T> mean(1, cfg.num_classes, H, W);
  const double inv = 1.0 / double(scales.size());
  for (size_t i = 0; i < mean.size(); ++i)
    mean.data()[i] = T(acc.data()[i] * inv);
  return mean;
}

template <typename T>
Tensor4<int> multiscale_predict(const Tensor4<T>& image,
                                const SegmenterConfig& cfg,
                                ParamStore<T>& params,
                                const std::vector<double>& scales) {
  return argmax_channels(multiscale_probs(image, cfg, params, scales));
}

}  // namespace liconv

#endif  // LICONV_METRICS_HPP_
