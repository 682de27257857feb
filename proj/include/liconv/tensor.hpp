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
#ifndef LICONV_TENSOR_HPP_
#define LICONV_TENSOR_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "liconv/errors.hpp"

namespace liconv {

// Dense NCHW tensor, row-major, W fastest. Desk-scale sizes only, so
// dimensions are plain ints; the flat size uses size_t.
template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int n, int c, int h, int w, T fill = T(0))
      : n_(n), c_(c), h_(h), w_(w) {
    if (n < 0 || c < 0 || h < 0 || w < 0)
      throw DimensionError("tensor dims must be non-negative: " + shape_str());
    buf_.assign(size(), fill);
  }

  int n() const { return n_; }
  int c() const { return c_; }
  int h() const { return h_; }
  int w() const { return w_; }
  size_t size() const {
    return size_t(n_) * size_t(c_) * size_t(h_) * size_t(w_);
  }
  bool empty() const { return size() == 0; }

  size_t idx(int n, int c, int y, int x) const {
    return ((size_t(n) * c_ + c) * h_ + y) * w_ + x;
  }
  T& at(int n, int c, int y, int x) { return buf_[idx(n, c, y, x)]; }
  const T& at(int n, int c, int y, int x) const { return buf_[idx(n, c, y, x)]; }

  T* data() { return buf_.data(); }
  const T* data() const { return buf_.data(); }
  // Pointer to the start of one (n, c) plane of h*w contiguous scalars.
  T* plane(int n, int c) { return buf_.data() + idx(n, c, 0, 0); }
  const T* plane(int n, int c) const { return buf_.data() + idx(n, c, 0, 0); }

  bool same_shape(const Tensor4& o) const {
    return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }
  std::string shape_str() const {
    return "(" + std::to_string(n_) + "," + std::to_string(c_) + "," +
           std::to_string(h_) + "," + std::to_string(w_) + ")";
  }

  void fill(T v) { std::fill(buf_.begin(), buf_.end(), v); }

  bool all_finite() const {
    for (const T& v : buf_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  template <typename U>
  Tensor4<U> cast() const {
    Tensor4<U> r(n_, c_, h_, w_);
    for (size_t i = 0; i < buf_.size(); ++i) r.data()[i] = U(buf_[i]);
    return r;
  }

 private:
  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
  std::vector<T> buf_;
};

using Tensor4f = Tensor4<float>;
using Tensor4d = Tensor4<double>;

template <typename T>
inline void require_finite(const Tensor4<T>& t, const char* what) {
  if (!t.all_finite())
    throw NumericError(std::string(what) + ": non-finite input " + t.shape_str());
}

}  // namespace liconv

#endif  // LICONV_TENSOR_HPP_
