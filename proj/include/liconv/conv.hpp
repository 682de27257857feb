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
#ifndef LICONV_CONV_HPP_
#define LICONV_CONV_HPP_

// Direct NCHW convolutions with dilation. Kernels are (2k+1)x(2k+1), stored
// dense as (C_out, C_in, 2k+1, 2k+1) or depthwise as (C, 1, 2k+1, 2k+1).
//
// Padding rule:
//   same_zero: pad d*k of zeros on every side, H_out = (H-1)/s + 1.
//              Stride 1 preserves the spatial dims exactly; stride 2 maps
//              both 2m and 2m+1 inputs onto valid grids (65 -> 33 -> 17...).
//   valid:     no padding, H_out = (H - 2*d*k - 1)/s + 1; inputs smaller
//              than the dilated kernel extent are a dimension error.
//
// Output element (correlation orientation):
//   out[n,co,oy,ox] = b[co] + sum_{ci,ky,kx} w[co,ci,ky,kx] *
//                     x[n,ci, oy*s - pad + d*ky, ox*s - pad + d*kx]
//
// All reductions accumulate in double regardless of the storage scalar, and
// every loop has a fixed order, so results are bit-stable call to call.

#include <algorithm>
#include <type_traits>
#include <vector>

#include "liconv/errors.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

enum class Padding { SameZero, Valid };

struct ConvSpec {
  int kernel_half = 1;  // kernel size is (2*kernel_half+1)^2
  int dilation = 1;
  int stride = 1;
  Padding padding = Padding::SameZero;
};

inline void validate_conv_spec(const ConvSpec& sp) {
  if (sp.kernel_half < 0)
    throw ParameterError("conv: kernel_half must be >= 0");
  if (sp.dilation < 1) throw ParameterError("conv: dilation must be >= 1");
  if (sp.stride < 1) throw ParameterError("conv: stride must be >= 1");
}

inline int conv_pad(const ConvSpec& sp) {
  return sp.padding == Padding::SameZero ? sp.dilation * sp.kernel_half : 0;
}

inline int conv_out_dim(int in, const ConvSpec& sp) {
  const int extent = 2 * sp.dilation * sp.kernel_half + 1;
  if (sp.padding == Padding::Valid) {
    if (in < extent)
      throw DimensionError("conv: input dim " + std::to_string(in) +
                           " smaller than dilated kernel extent " +
                           std::to_string(extent) + " with valid padding");
    return (in - extent) / sp.stride + 1;
  }
  return (in - 1) / sp.stride + 1;
}

namespace detail {

// Dot product with eight independent double accumulators. Weight-gradient
// reductions are latency-bound as a single chain; fixed-width lanes keep the
// summation order deterministic while letting them vectorize.
template <typename T>
double striped_dot(const T* a, const T* b, int n) {
  double part[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int p = 0;
  for (; p + 8 <= n; p += 8)
    for (int j = 0; j < 8; ++j) part[j] += double(a[p + j]) * double(b[p + j]);
  for (int j = 0; p < n; ++p, ++j) part[j] += double(a[p]) * double(b[p]);
  return ((part[0] + part[1]) + (part[2] + part[3])) +
         ((part[4] + part[5]) + (part[6] + part[7]));
}

// Same lane scheme for a strided right-hand side (stride-2 convolutions).
template <typename T>
double striped_dot_strided(const T* a, const T* b, int n, int stride) {
  double part[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  int p = 0;
  for (; p + 8 <= n; p += 8)
    for (int j = 0; j < 8; ++j)
      part[j] += double(a[p + j]) * double(b[(p + j) * stride]);
  for (int j = 0; p < n; ++p, ++j)
    part[j] += double(a[p]) * double(b[p * stride]);
  return ((part[0] + part[1]) + (part[2] + part[3])) +
         ((part[4] + part[5]) + (part[6] + part[7]));
}

// Range of output x for which ox*s - pad + d*kx lands inside [0, in_w).
inline void ox_bounds(int kx, int d, int s, int pad, int in_w, int out_w,
                      int* lo, int* hi) {
  const int off = d * kx - pad;  // ix = ox*s + off
  int l = 0;
  if (off < 0) l = (-off + s - 1) / s;
  int h = out_w - 1;
  const int max_num = in_w - 1 - off;
  if (max_num < 0)
    h = -1;
  else
    h = std::min(h, max_num / s);
  *lo = l;
  *hi = h;
}

}  // namespace detail

template <typename T>
void validate_conv_args(const Tensor4<T>& x, const Tensor4<T>& w,
                        const Tensor4<T>& bias, const ConvSpec& sp,
                        bool depthwise) {
  validate_conv_spec(sp);
  const int kk = 2 * sp.kernel_half + 1;
  if (w.h() != kk || w.w() != kk)
    throw DimensionError("conv: weight spatial dims " + w.shape_str() +
                         " do not match kernel_half " +
                         std::to_string(sp.kernel_half));
  if (depthwise) {
    if (w.c() != 1 || w.n() != x.c())
      throw DimensionError("depthwise conv: weights must be (C,1,k,k) with C=" +
                           std::to_string(x.c()) + ", got " + w.shape_str());
  } else if (w.c() != x.c()) {
    throw DimensionError("conv: weight C_in " + std::to_string(w.c()) +
                         " != input channels " + std::to_string(x.c()));
  }
  if (!bias.empty() &&
      (bias.c() != w.n() || bias.n() != 1 || bias.h() != 1 || bias.w() != 1))
    throw DimensionError("conv: bias must be (1,C_out,1,1), got " +
                         bias.shape_str());
  require_finite(x, "conv input");
  require_finite(w, "conv weights");
  if (!bias.empty()) require_finite(bias, "conv bias");
}

// Dense dilated convolution. Pass an empty bias tensor for no bias.
template <typename T>
Tensor4<T> conv2d_dilated(const Tensor4<T>& x, const Tensor4<T>& w,
                          const Tensor4<T>& bias, const ConvSpec& sp) {
  validate_conv_args(x, w, bias, sp, false);
  const int k = sp.kernel_half, d = sp.dilation, s = sp.stride;
  const int pad = conv_pad(sp);
  const int kk = 2 * k + 1;
  const int ho = conv_out_dim(x.h(), sp), wo = conv_out_dim(x.w(), sp);
  const int cin = x.c(), cout = w.n();
  Tensor4<T> out(x.n(), cout, ho, wo);

  if (k == 0 && s == 1) {
    // 1x1 stride-1: pure channel mix, the hot path in bottleneck blocks.
    const size_t hw = size_t(x.h()) * x.w();
    std::vector<double> acc(hw);
    for (int n = 0; n < x.n(); ++n) {
      for (int co = 0; co < cout; ++co) {
        const double b = bias.empty() ? 0.0 : double(bias.at(0, co, 0, 0));
        std::fill(acc.begin(), acc.end(), b);
        for (int ci = 0; ci < cin; ++ci) {
          const double wv = double(w.at(co, ci, 0, 0));
          const T* xp = x.plane(n, ci);
          for (size_t p = 0; p < hw; ++p) acc[p] += wv * double(xp[p]);
        }
        T* op = out.plane(n, co);
        for (size_t p = 0; p < hw; ++p) op[p] = T(acc[p]);
      }
    }
    return out;
  }

  std::vector<double> acc(wo);
  std::vector<int> lo(kk), hi(kk);
  for (int kx = 0; kx < kk; ++kx)
    detail::ox_bounds(kx, d, s, pad, x.w(), wo, &lo[kx], &hi[kx]);

  for (int n = 0; n < x.n(); ++n) {
    for (int co = 0; co < cout; ++co) {
      const double b = bias.empty() ? 0.0 : double(bias.at(0, co, 0, 0));
      T* op = out.plane(n, co);
      for (int oy = 0; oy < ho; ++oy) {
        std::fill(acc.begin(), acc.end(), b);
        for (int ci = 0; ci < cin; ++ci) {
          const T* xp = x.plane(n, ci);
          for (int ky = 0; ky < kk; ++ky) {
            const int iy = oy * s - pad + d * ky;
            if (iy < 0 || iy >= x.h()) continue;
            const T* xrow = xp + size_t(iy) * x.w();
            const T* wrow = w.data() + w.idx(co, ci, ky, 0);
            for (int kx = 0; kx < kk; ++kx) {
              const double wv = double(wrow[kx]);
              const int off = d * kx - pad;
              if (s == 1) {
                for (int ox = lo[kx]; ox <= hi[kx]; ++ox)
                  acc[ox] += wv * double(xrow[ox + off]);
              } else {
                for (int ox = lo[kx]; ox <= hi[kx]; ++ox)
                  acc[ox] += wv * double(xrow[ox * s + off]);
              }
            }
          }
        }
        for (int ox = 0; ox < wo; ++ox) op[size_t(oy) * wo + ox] = T(acc[ox]);
      }
    }
  }
  return out;
}

// Gradients of conv2d_dilated. Any of gx/gw/gb may be null to skip that
// component. Contributions are *accumulated* into the outputs, which must be
// pre-shaped (callers zero them for a fresh gradient).
template <typename T>
void conv2d_dilated_backward(const Tensor4<T>& x, const Tensor4<T>& w,
                             const ConvSpec& sp, const Tensor4<T>& gout,
                             std::type_identity_t<Tensor4<T>*> gx,
                             std::type_identity_t<Tensor4<T>*> gw,
                             std::type_identity_t<Tensor4<T>*> gb) {
  const int k = sp.kernel_half, d = sp.dilation, s = sp.stride;
  const int pad = conv_pad(sp);
  const int kk = 2 * k + 1;
  const int ho = gout.h(), wo = gout.w();
  const int cin = x.c(), cout = w.n();

  if (gb) {
    for (int co = 0; co < cout; ++co) {
      double acc = 0.0;
      for (int n = 0; n < gout.n(); ++n) {
        const T* gp = gout.plane(n, co);
        for (size_t p = 0; p < size_t(ho) * wo; ++p) acc += double(gp[p]);
      }
      gb->at(0, co, 0, 0) += T(acc);
    }
  }

  if (k == 0 && s == 1) {
    const size_t hw = size_t(x.h()) * x.w();
    if (gx) {
      std::vector<double> acc(hw);
      for (int n = 0; n < x.n(); ++n) {
        for (int ci = 0; ci < cin; ++ci) {
          std::fill(acc.begin(), acc.end(), 0.0);
          for (int co = 0; co < cout; ++co) {
            const double wv = double(w.at(co, ci, 0, 0));
            const T* gp = gout.plane(n, co);
            for (size_t p = 0; p < hw; ++p) acc[p] += wv * double(gp[p]);
          }
          T* gxp = gx->plane(n, ci);
          for (size_t p = 0; p < hw; ++p) gxp[p] += T(acc[p]);
        }
      }
    }
    if (gw) {
      for (int co = 0; co < cout; ++co) {
        for (int ci = 0; ci < cin; ++ci) {
          double acc = 0.0;
          for (int n = 0; n < x.n(); ++n)
            acc += detail::striped_dot(gout.plane(n, co), x.plane(n, ci),
                                       int(hw));
          gw->at(co, ci, 0, 0) += T(acc);
        }
      }
    }
    return;
  }

  std::vector<int> lo(kk), hi(kk);
  for (int kx = 0; kx < kk; ++kx)
    detail::ox_bounds(kx, d, s, pad, x.w(), wo, &lo[kx], &hi[kx]);

  if (gx) {
    std::vector<double> acc(size_t(x.h()) * x.w());
    for (int n = 0; n < x.n(); ++n) {
      for (int ci = 0; ci < cin; ++ci) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int co = 0; co < cout; ++co) {
          const T* gp = gout.plane(n, co);
          for (int oy = 0; oy < ho; ++oy) {
            const T* grow = gp + size_t(oy) * wo;
            for (int ky = 0; ky < kk; ++ky) {
              const int iy = oy * s - pad + d * ky;
              if (iy < 0 || iy >= x.h()) continue;
              double* arow = acc.data() + size_t(iy) * x.w();
              const T* wrow = w.data() + w.idx(co, ci, ky, 0);
              for (int kx = 0; kx < kk; ++kx) {
                const double wv = double(wrow[kx]);
                const int off = d * kx - pad;
                if (s == 1) {
                  for (int ox = lo[kx]; ox <= hi[kx]; ++ox)
                    arow[ox + off] += wv * double(grow[ox]);
                } else {
                  for (int ox = lo[kx]; ox <= hi[kx]; ++ox)
                    arow[ox * s + off] += wv * double(grow[ox]);
                }
              }
            }
          }
        }
        T* gxp = gx->plane(n, ci);
        for (size_t p = 0; p < acc.size(); ++p) gxp[p] += T(acc[p]);
      }
    }
  }

  if (gw) {
    std::vector<double> acc(w.size());
    for (int n = 0; n < x.n(); ++n) {
      for (int co = 0; co < cout; ++co) {
        const T* gp = gout.plane(n, co);
        for (int ci = 0; ci < cin; ++ci) {
          const T* xp = x.plane(n, ci);
          for (int ky = 0; ky < kk; ++ky) {
            for (int kx = 0; kx < kk; ++kx) {
              double a = 0.0;
              const int off = d * kx - pad;
              const int cnt = hi[kx] - lo[kx] + 1;
              if (cnt <= 0) continue;
              for (int oy = 0; oy < ho; ++oy) {
                const int iy = oy * s - pad + d * ky;
                if (iy < 0 || iy >= x.h()) continue;
                const T* xrow = xp + size_t(iy) * x.w();
                const T* grow = gp + size_t(oy) * wo;
                if (s == 1) {
                  a += detail::striped_dot(grow + lo[kx],
                                           xrow + lo[kx] + off, cnt);
                } else {
                  a += detail::striped_dot_strided(
                      grow + lo[kx], xrow + size_t(lo[kx]) * s + off, cnt, s);
                }
              }
              acc[w.idx(co, ci, ky, kx)] += a;
            }
          }
        }
      }
    }
    for (size_t i = 0; i < acc.size(); ++i) gw->data()[i] += T(acc[i]);
  }
}

// Depthwise dilated convolution; weights (C,1,2k+1,2k+1), optional bias.
template <typename T>
Tensor4<T> depthwise_conv2d(const Tensor4<T>& x, const Tensor4<T>& w,
                            const Tensor4<T>& bias, const ConvSpec& sp) {
  validate_conv_args(x, w, bias, sp, true);
  const int k = sp.kernel_half, d = sp.dilation, s = sp.stride;
  const int pad = conv_pad(sp);
  const int kk = 2 * k + 1;
  const int ho = conv_out_dim(x.h(), sp), wo = conv_out_dim(x.w(), sp);
  Tensor4<T> out(x.n(), x.c(), ho, wo);

  std::vector<double> acc(wo);
  std::vector<int> lo(kk), hi(kk);
  for (int kx = 0; kx < kk; ++kx)
    detail::ox_bounds(kx, d, s, pad, x.w(), wo, &lo[kx], &hi[kx]);

  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      const double b = bias.empty() ? 0.0 : double(bias.at(0, c, 0, 0));
      const T* xp = x.plane(n, c);
      T* op = out.plane(n, c);
      for (int oy = 0; oy < ho; ++oy) {
        std::fill(acc.begin(), acc.end(), b);
        for (int ky = 0; ky < kk; ++ky) {
          const int iy = oy * s - pad + d * ky;
          if (iy < 0 || iy >= x.h()) continue;
          const T* xrow = xp + size_t(iy) * x.w();
          const T* wrow = w.data() + w.idx(c, 0, ky, 0);
          for (int kx = 0; kx < kk; ++kx) {
            const double wv = double(wrow[kx]);
            const int off = d * kx - pad;
            if (s == 1) {
              for (int ox = lo[kx]; ox <= hi[kx]; ++ox)
                acc[ox] += wv * double(xrow[ox + off]);
            } else {
              for (int ox = lo[kx]; ox <= hi[kx]; ++ox)
                acc[ox] += wv * double(xrow[ox * s + off]);
            }
          }
        }
        for (int ox = 0; ox < wo; ++ox) op[size_t(oy) * wo + ox] = T(acc[ox]);
      }
    }
  }
  return out;
}

template <typename T>
void depthwise_conv2d_backward(const Tensor4<T>& x, const Tensor4<T>& w,
                               const ConvSpec& sp, const Tensor4<T>& gout,
                               std::type_identity_t<Tensor4<T>*> gx,
                               std::type_identity_t<Tensor4<T>*> gw,
                               std::type_identity_t<Tensor4<T>*> gb) {
  const int k = sp.kernel_half, d = sp.dilation, s = sp.stride;
  const int pad = conv_pad(sp);
  const int kk = 2 * k + 1;
  const int ho = gout.h(), wo = gout.w();

  std::vector<int> lo(kk), hi(kk);
  for (int kx = 0; kx < kk; ++kx)
    detail::ox_bounds(kx, d, s, pad, x.w(), wo, &lo[kx], &hi[kx]);

  std::vector<double> accx(gx ? size_t(x.h()) * x.w() : 0);
  std::vector<double> accw(gw ? w.size() : 0, 0.0);

  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      const T* xp = x.plane(n, c);
      const T* gp = gout.plane(n, c);
      if (gb) {
        double a = 0.0;
        for (size_t p = 0; p < size_t(ho) * wo; ++p) a += double(gp[p]);
        gb->at(0, c, 0, 0) += T(a);
      }
      if (gx) std::fill(accx.begin(), accx.end(), 0.0);
      for (int oy = 0; oy < ho; ++oy) {
        const T* grow = gp + size_t(oy) * wo;
        for (int ky = 0; ky < kk; ++ky) {
          const int iy = oy * s - pad + d * ky;
          if (iy < 0 || iy >= x.h()) continue;
          const T* xrow = xp + size_t(iy) * x.w();
          double* arow = gx ? accx.data() + size_t(iy) * x.w() : nullptr;
          for (int kx = 0; kx < kk; ++kx) {
            const int off = d * kx - pad;
            const double wv = double(w.data()[w.idx(c, 0, ky, kx)]);
            double a = 0.0;
            if (s == 1) {
              for (int ox = lo[kx]; ox <= hi[kx]; ++ox) {
                const double g = double(grow[ox]);
                if (gx) arow[ox + off] += wv * g;
                a += g * double(xrow[ox + off]);
              }
            } else {
              for (int ox = lo[kx]; ox <= hi[kx]; ++ox) {
                const double g = double(grow[ox]);
                if (gx) arow[ox * s + off] += wv * g;
                a += g * double(xrow[ox * s + off]);
              }
            }
            if (gw) accw[w.idx(c, 0, ky, kx)] += a;
          }
        }
      }
      if (gx) {
        T* gxp = gx->plane(n, c);
        for (size_t p = 0; p < accx.size(); ++p) gxp[p] += T(accx[p]);
      }
    }
  }
  if (gw)
    for (size_t i = 0; i < accw.size(); ++i) gw->data()[i] += T(accw[i]);
}

}  // namespace liconv

#endif  // LICONV_CONV_HPP_
