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
#ifndef LICONV_OPS_HPP_
#define LICONV_OPS_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "liconv/errors.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

template <typename T>
Tensor4<T> relu(const Tensor4<T>& x) {
  Tensor4<T> out(x.n(), x.c(), x.h(), x.w());
  for (size_t i = 0; i < x.size(); ++i)
    out.data()[i] = x.data()[i] > T(0) ? x.data()[i] : T(0);
  return out;
}

// Subgradient 0 at exactly 0.
template <typename T>
void relu_backward(const Tensor4<T>& x, const Tensor4<T>& gout, Tensor4<T>* gx) {
  for (size_t i = 0; i < x.size(); ++i)
    if (x.data()[i] > T(0)) gx->data()[i] += gout.data()[i];
}

template <typename T>
void add_inplace(Tensor4<T>& a, const Tensor4<T>& b) {
  if (!a.same_shape(b))
    throw DimensionError("add: shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  for (size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
}

template <typename T>
Tensor4<T> global_avg_pool(const Tensor4<T>& x) {
  if (x.h() < 1 || x.w() < 1)
    throw DimensionError("global_avg_pool: empty spatial dims " + x.shape_str());
  Tensor4<T> out(x.n(), x.c(), 1, 1);
  const size_t hw = size_t(x.h()) * x.w();
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c) {
      const T* p = x.plane(n, c);
      double acc = 0.0;
      for (size_t i = 0; i < hw; ++i) acc += double(p[i]);
      out.at(n, c, 0, 0) = T(acc / double(hw));
    }
  return out;
}

template <typename T>
void global_avg_pool_backward(const Tensor4<T>& x, const Tensor4<T>& gout,
                              Tensor4<T>* gx) {
  const size_t hw = size_t(x.h()) * x.w();
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c) {
      const T g = T(double(gout.at(n, c, 0, 0)) / double(hw));
      T* p = gx->plane(n, c);
      for (size_t i = 0; i < hw; ++i) p[i] += g;
    }
}

namespace detail {

// Half-pixel source coordinate mapping (align_corners = false), clamped taps.
// When in == out the mapping is the exact identity (t lands on 0).
struct LerpTap {
  int i0, i1;
  double t;
};

inline LerpTap lerp_tap(int o, int in, int out) {
  double src = (double(o) + 0.5) * double(in) / double(out) - 0.5;
  double f = std::floor(src);
  int i0 = int(f);
  double t = src - f;
  int j0 = std::clamp(i0, 0, in - 1);
  int j1 = std::clamp(i0 + 1, 0, in - 1);
  return {j0, j1, t};
}

}  // namespace detail

// Bilinear resize to (out_h, out_w). Identity (bitwise) when sizes match;
// constant inputs stay constant because the four tap weights sum to 1.
template <typename T>
Tensor4<T> bilinear_resize(const Tensor4<T>& x, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1)
    throw DimensionError("bilinear_resize: target dims must be positive");
  if (x.h() < 1 || x.w() < 1)
    throw DimensionError("bilinear_resize: empty input " + x.shape_str());
  Tensor4<T> out(x.n(), x.c(), out_h, out_w);
  std::vector<detail::LerpTap> ys(out_h), xs(out_w);
  for (int oy = 0; oy < out_h; ++oy) ys[oy] = detail::lerp_tap(oy, x.h(), out_h);
  for (int ox = 0; ox < out_w; ++ox) xs[ox] = detail::lerp_tap(ox, x.w(), out_w);
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c) {
      const T* p = x.plane(n, c);
      T* op = out.plane(n, c);
      for (int oy = 0; oy < out_h; ++oy) {
        const T* r0 = p + size_t(ys[oy].i0) * x.w();
        const T* r1 = p + size_t(ys[oy].i1) * x.w();
        const double ty = ys[oy].t;
        for (int ox = 0; ox < out_w; ++ox) {
          const double tx = xs[ox].t;
          const double a = double(r0[xs[ox].i0]) * (1.0 - tx) +
                           double(r0[xs[ox].i1]) * tx;
          const double b = double(r1[xs[ox].i0]) * (1.0 - tx) +
                           double(r1[xs[ox].i1]) * tx;
          op[size_t(oy) * out_w + ox] = T(a * (1.0 - ty) + b * ty);
        }
      }
    }
  return out;
}

template <typename T>
void bilinear_resize_backward(const Tensor4<T>& x, const Tensor4<T>& gout,
                              Tensor4<T>* gx) {
  const int out_h = gout.h(), out_w = gout.w();
  std::vector<detail::LerpTap> ys(out_h), xs(out_w);
  for (int oy = 0; oy < out_h; ++oy) ys[oy] = detail::lerp_tap(oy, x.h(), out_h);
  for (int ox = 0; ox < out_w; ++ox) xs[ox] = detail::lerp_tap(ox, x.w(), out_w);
  std::vector<double> acc(size_t(x.h()) * x.w());
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const T* gp = gout.plane(n, c);
      for (int oy = 0; oy < out_h; ++oy) {
        const double ty = ys[oy].t;
        double* a0 = acc.data() + size_t(ys[oy].i0) * x.w();
        double* a1 = acc.data() + size_t(ys[oy].i1) * x.w();
        for (int ox = 0; ox < out_w; ++ox) {
          const double g = double(gp[size_t(oy) * out_w + ox]);
          const double tx = xs[ox].t;
          a0[xs[ox].i0] += g * (1.0 - ty) * (1.0 - tx);
          a0[xs[ox].i1] += g * (1.0 - ty) * tx;
          a1[xs[ox].i0] += g * ty * (1.0 - tx);
          a1[xs[ox].i1] += g * ty * tx;
        }
      }
      T* gxp = gx->plane(n, c);
      for (size_t i = 0; i < acc.size(); ++i) gxp[i] += T(acc[i]);
    }
}

template <typename T>
Tensor4<T> concat_channels(const std::vector<const Tensor4<T>*>& xs) {
  if (xs.empty()) throw DimensionError("concat_channels: no inputs");
  int ctotal = 0;
  for (const auto* t : xs) {
    if (t->n() != xs[0]->n() || t->h() != xs[0]->h() || t->w() != xs[0]->w())
      throw DimensionError("concat_channels: mismatched N/H/W: " +
                           t->shape_str() + " vs " + xs[0]->shape_str());
    ctotal += t->c();
  }
  Tensor4<T> out(xs[0]->n(), ctotal, xs[0]->h(), xs[0]->w());
  const size_t hw = size_t(out.h()) * out.w();
  for (int n = 0; n < out.n(); ++n) {
    int co = 0;
    for (const auto* t : xs)
      for (int c = 0; c < t->c(); ++c, ++co)
        std::copy(t->plane(n, c), t->plane(n, c) + hw, out.plane(n, co));
  }
  return out;
}

template <typename T>
void concat_channels_backward(const Tensor4<T>& gout,
                              const std::vector<Tensor4<T>*>& gxs) {
  const size_t hw = size_t(gout.h()) * gout.w();
  for (int n = 0; n < gout.n(); ++n) {
    int co = 0;
    for (auto* g : gxs)
      for (int c = 0; c < g->c(); ++c, ++co) {
        const T* src = gout.plane(n, co);
        T* dst = g->plane(n, c);
        for (size_t i = 0; i < hw; ++i) dst[i] += src[i];
      }
  }
}

}  // namespace liconv

#endif  // LICONV_OPS_HPP_
