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
#include "liconv/metrics.hpp"

#include <cstdio>
#include <limits>
#include <sstream>

namespace liconv {

ConfusionMatrix::ConfusionMatrix(int num_classes) : nc_(num_classes) {
  if (num_classes < 1)
    throw ParameterError("ConfusionMatrix: need at least 1 class");
  counts_.assign(size_t(nc_) * nc_, 0);
}

void ConfusionMatrix::update(const Tensor4<int>& pred,
                             const Tensor4<int>& truth, int ignore_index) {
  if (pred.n() != truth.n() || pred.c() != 1 || truth.c() != 1 ||
      pred.h() != truth.h() || pred.w() != truth.w())
    throw DimensionError("confusion update: pred " + pred.shape_str() +
                         " vs truth " + truth.shape_str());
  const int* p = pred.data();
  const int* t = truth.data();
  for (size_t i = 0; i < pred.size(); ++i) {
    if (t[i] == ignore_index) continue;
    if (t[i] < 0 || t[i] >= nc_)
      throw DataError("confusion update: truth label " + std::to_string(t[i]) +
                      " outside [0, " + std::to_string(nc_) + ")");
    if (p[i] < 0 || p[i] >= nc_)
      throw DataError("confusion update: predicted label " +
                      std::to_string(p[i]) + " outside [0, " +
                      std::to_string(nc_) + ")");
    ++counts_[size_t(t[i]) * nc_ + p[i]];
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.nc_ != nc_)
    throw DimensionError("confusion merge: " + std::to_string(other.nc_) +
                         " classes vs " + std::to_string(nc_));
  for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

void ConfusionMatrix::reset() { counts_.assign(counts_.size(), 0); }

long long ConfusionMatrix::at(int truth, int pred) const {
  if (truth < 0 || truth >= nc_ || pred < 0 || pred >= nc_)
    throw DimensionError("confusion at: index out of range");
  return counts_[size_t(truth) * nc_ + pred];
}

long long ConfusionMatrix::total() const {
  long long s = 0;
  for (long long v : counts_) s += v;
  return s;
}

MiouResult miou(const ConfusionMatrix& cm) {
  const int nc = cm.num_classes();
  MiouResult r;
  r.per_class.assign(size_t(nc), std::numeric_limits<double>::quiet_NaN());
  r.scored.assign(size_t(nc), 0);
  double sum = 0.0;
  int scored = 0;
  for (int c = 0; c < nc; ++c) {
    long long tp = cm.at(c, c), fp = 0, fn = 0;
    for (int o = 0; o < nc; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
    const long long uni = tp + fp + fn;
    if (uni == 0) continue;  // absent from both truth and prediction
    const double iou = double(tp) / double(uni);
    r.per_class[size_t(c)] = iou;
    r.scored[size_t(c)] = 1;
    sum += iou;
    ++scored;
  }
  if (scored == 0)
    throw MetricError("miou: no scored classes (empty confusion matrix)");
  r.miou = sum / scored;
  return r;
}

std::string MiouResult::to_csv() const {
  std::ostringstream os;
  os << "class,iou\n";
  char buf[64];
  for (size_t c = 0; c < per_class.size(); ++c) {
    if (scored[c]) {
      std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", c, per_class[c]);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,\n", c);
    }
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "mean,%.6f\n", miou);
  os << buf;
  return os.str();
}

std::string MiouResult::to_text() const {
  std::ostringstream os;
  char buf[64];
  for (size_t c = 0; c < per_class.size(); ++c) {
    if (scored[c]) {
      std::snprintf(buf, sizeof(buf), "class %2zu  iou %.4f\n", c,
                    per_class[c]);
    } else {
      std::snprintf(buf, sizeof(buf), "class %2zu  (absent)\n", c);
    }
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "mIoU %.4f over %zu classes\n", miou,
                size_t(std::count(scored.begin(), scored.end(), char(1))));
  os << buf;
  return os.str();
}

}  // namespace liconv
