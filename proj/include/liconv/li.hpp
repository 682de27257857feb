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
#ifndef LICONV_LI_HPP_
#define LICONV_LI_HPP_

// Lateral inhibition. The LI kernel over a (2t+1)^2 zone is
//   K(0,0)   = 1.0 exactly (the pixel's own response passes through)
//   K(dy,dx) = -w_l * exp(-(dy^2+dx^2) / (2*sigma^2))   otherwise
// with w_l in [0,1], one learnable w_l per channel. It is applied as a
// stride-1 depthwise convolution whose taps are spread by the zone rate e
// (zero padding, output shape preserved). Distances are measured on the
// lattice offsets, not scaled by e. At w_l = 0 the surround taps are -0.0
// and the layer is a bitwise identity.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "liconv/conv.hpp"
#include "liconv/errors.hpp"
#include "liconv/ops.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

enum class LIDistance { Euclidean };

struct LIKernelSpec {
  int zone_half = 1;   // t: zone size is (2t+1)^2
  int zone_rate = 1;   // e: dilation of the zone taps
  double sigma = 1.0;  // Gaussian falloff of inhibition strength
  LIDistance distance = LIDistance::Euclidean;
};

inline void validate_li_spec(const LIKernelSpec& sp) {
  if (sp.zone_half < 0) throw ParameterError("li: zone_half must be >= 0");
  if (sp.zone_rate < 1) throw ParameterError("li: zone_rate must be >= 1");
  if (!(sp.sigma > 0.0)) throw ParameterError("li: sigma must be > 0");
}

template <typename T>
void validate_wl(T wl) {
  if (!(wl >= T(0) && wl <= T(1)))
    throw ParameterError("li: w_l must lie in [0,1], got " +
                         std::to_string(double(wl)));
}

// One channel's kernel as a flat (2t+1)^2 row-major grid.
template <typename T>
std::vector<T> build_li_kernel(const LIKernelSpec& sp, T wl) {
  validate_li_spec(sp);
  validate_wl(wl);
  const int t = sp.zone_half, kk = 2 * t + 1;
  std::vector<T> k(size_t(kk) * kk);
  for (int dy = -t; dy <= t; ++dy)
    for (int dx = -t; dx <= t; ++dx) {
      const size_t i = size_t(dy + t) * kk + (dx + t);
      if (dy == 0 && dx == 0) {
        k[i] = T(1);
      } else {
        const double d2 = double(dy) * dy + double(dx) * dx;
        k[i] = T(-double(wl) * std::exp(-d2 / (2.0 * sp.sigma * sp.sigma)));
      }
    }
  return k;
}

// Derivative of the kernel w.r.t. w_l (zero at the center).
inline std::vector<double> li_kernel_dwl(const LIKernelSpec& sp) {
  const int t = sp.zone_half, kk = 2 * t + 1;
  std::vector<double> k(size_t(kk) * kk, 0.0);
  for (int dy = -t; dy <= t; ++dy)
    for (int dx = -t; dx <= t; ++dx) {
      if (dy == 0 && dx == 0) continue;
      const double d2 = double(dy) * dy + double(dx) * dx;
      k[size_t(dy + t) * kk + (dx + t)] =
          -std::exp(-d2 / (2.0 * sp.sigma * sp.sigma));
    }
  return k;
}

// The Gaussian grid is shared across channels; only the w_l scale differs,
// so the exp() evaluations are hoisted out of the channel loop. Products and
// casts match build_li_kernel bit for bit.
template <typename T>
Tensor4<T> li_kernel_bank(const LIKernelSpec& sp, const std::vector<T>& wl) {
  validate_li_spec(sp);
  const int kk = 2 * sp.zone_half + 1;
  const std::vector<double> dk = li_kernel_dwl(sp);
  const size_t center = size_t(kk) * kk / 2;
  Tensor4<T> bank(int(wl.size()), 1, kk, kk);
  for (size_t c = 0; c < wl.size(); ++c) {
    validate_wl(wl[c]);
    T* k = bank.data() + bank.idx(int(c), 0, 0, 0);
    for (size_t i = 0; i < dk.size(); ++i) k[i] = T(double(wl[c]) * dk[i]);
    k[center] = T(1);
  }
  return bank;
}

inline ConvSpec li_conv_spec(const LIKernelSpec& sp) {
  return ConvSpec{sp.zone_half, sp.zone_rate, 1, Padding::SameZero};
}

// Inhibited features: x minus Gaussian-weighted surround, channel-wise.
// The surround stencil is shared across channels with only the w_l scale per
// channel, so each tap is applied as one flat pass over the whole plane; the
// few positions whose shifted read wrapped across a row boundary get that
// tap's contribution subtracted back out afterwards. The cancellation leaves
// rounding residue on the order of one double ulp, far below the library's
// comparison tolerances, and the w_l = 0 case stays exact because the
// accumulator is scaled by w_l before it touches the input. Every w_l value
// runs the identical code path.
template <typename T>
Tensor4<T> li_layer_forward(const Tensor4<T>& x, const std::vector<T>& wl,
                            const LIKernelSpec& sp) {
  validate_li_spec(sp);
  if (int(wl.size()) != x.c())
    throw DimensionError("li: need one w_l per channel, got " +
                         std::to_string(wl.size()) + " for C=" +
                         std::to_string(x.c()));
  const int t = sp.zone_half, e = sp.zone_rate, H = x.h(), W = x.w();
  struct Tap {
    int dy, dx;
    double g;
  };
  std::vector<Tap> taps;
  taps.reserve(size_t(2 * t + 1) * (2 * t + 1) - 1);
  for (int dy = -t; dy <= t; ++dy)
    for (int dx = -t; dx <= t; ++dx) {
      if (dy == 0 && dx == 0) continue;
      const double d2 = double(dy) * dy + double(dx) * dx;
      taps.push_back(
          {e * dy, e * dx, std::exp(-d2 / (2.0 * sp.sigma * sp.sigma))});
    }
  Tensor4<T> out(x.n(), x.c(), H, W);
  const std::ptrdiff_t HW = std::ptrdiff_t(H) * W;
  std::vector<double> acc(static_cast<size_t>(HW));
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c) {
      validate_wl(wl[size_t(c)]);
      const double wlc = double(wl[size_t(c)]);
      const T* xp = x.plane(n, c);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const Tap& tp : taps) {
        const std::ptrdiff_t o = std::ptrdiff_t(tp.dy) * W + tp.dx;
        const int y0 = std::max(0, -tp.dy), y1 = std::min(H - 1, H - 1 - tp.dy);
        if (y0 > y1) continue;
        const std::ptrdiff_t i0 = std::ptrdiff_t(y0) * W;
        const std::ptrdiff_t i1 = std::ptrdiff_t(y1) * W + W - 1;
        const std::ptrdiff_t a0 = std::max(i0, -o);
        const std::ptrdiff_t a1 = std::min(i1, HW - 1 - o);
        const double g = tp.g;
        const T* src = xp + o;
        double* dst = acc.data();
        for (std::ptrdiff_t i = a0; i <= a1; ++i) dst[i] += g * double(src[i]);
        if (tp.dx < 0) {
          for (int y = y0; y <= y1; ++y) {
            const std::ptrdiff_t base = std::ptrdiff_t(y) * W;
            for (int xx = 0; xx < std::min(-tp.dx, W); ++xx) {
              const std::ptrdiff_t f = base + xx;
              if (f >= a0 && f <= a1) dst[f] -= g * double(src[f]);
            }
          }
        } else if (tp.dx > 0) {
          for (int y = y0; y <= y1; ++y) {
            const std::ptrdiff_t base = std::ptrdiff_t(y) * W;
            for (int xx = std::max(0, W - tp.dx); xx < W; ++xx) {
              const std::ptrdiff_t f = base + xx;
              if (f >= a0 && f <= a1) dst[f] -= g * double(src[f]);
            }
          }
        }
      }
      T* op = out.plane(n, c);
      for (std::ptrdiff_t p = 0; p < HW; ++p)
        op[p] = T(double(xp[p]) - wlc * acc[p]);
    }
  return out;
}

// Accumulates into gx (same shape as x) and gwl (size C); either may be null.
template <typename T>
void li_layer_backward(const Tensor4<T>& x, const std::vector<T>& wl,
                       const LIKernelSpec& sp, const Tensor4<T>& gout,
                       Tensor4<T>* gx, std::vector<T>* gwl) {
  Tensor4<T> bank = li_kernel_bank(sp, wl);
  const int kk = 2 * sp.zone_half + 1;
  Tensor4<T> gbank;
  if (gwl) gbank = Tensor4<T>(x.c(), 1, kk, kk);
  depthwise_conv2d_backward(x, bank, li_conv_spec(sp), gout, gx,
                            gwl ? &gbank : nullptr, nullptr);
  if (gwl) {
    std::vector<double> dk = li_kernel_dwl(sp);
    for (int c = 0; c < x.c(); ++c) {
      double acc = 0.0;
      const T* g = gbank.data() + gbank.idx(c, 0, 0, 0);
      for (size_t i = 0; i < dk.size(); ++i) acc += dk[i] * double(g[i]);
      (*gwl)[size_t(c)] += T(acc);
    }
  }
}

// Hard clamp of w_l back into [0,1]; applied after optimizer steps.
template <typename T>
void project_wl(std::vector<T>& wl) {
  for (T& v : wl) v = std::min(T(1), std::max(T(0), v));
}

enum class Activation { ReLU, Identity };

template <typename T>
Tensor4<T> apply_activation(const Tensor4<T>& x, Activation a) {
  return a == Activation::ReLU ? relu(x) : x;
}

struct LIConvSpec {
  LIKernelSpec li;
  ConvSpec conv;
  Activation phi = Activation::ReLU;
};

// The full pipeline from the block diagram: ReLU, LI, phi, dilated conv.
template <typename T>
Tensor4<T> li_conv_forward(const Tensor4<T>& x, const std::vector<T>& wl,
                           const Tensor4<T>& w, const Tensor4<T>& bias,
                           const LIConvSpec& sp) {
  Tensor4<T> g = relu(x);
  Tensor4<T> inhibited = li_layer_forward(g, wl, sp.li);
  Tensor4<T> activated = apply_activation(inhibited, sp.phi);
  return conv2d_dilated(activated, w, bias, sp.conv);
}

// Text grid of one channel's kernel, one row per line, full precision.
template <typename T>
std::string li_kernel_text(const LIKernelSpec& sp, T wl) {
  std::vector<T> k = build_li_kernel(sp, wl);
  const int kk = 2 * sp.zone_half + 1;
  std::string out;
  char buf[64];
  for (int y = 0; y < kk; ++y) {
    for (int x = 0; x < kk; ++x) {
      std::snprintf(buf, sizeof buf, "%.17g", double(k[size_t(y) * kk + x]));
      if (x) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace liconv

#endif  // LICONV_LI_HPP_
