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
#include "liconv/oracle.hpp"

#include <cmath>
#include <cstdio>

namespace liconv {

std::string OracleReport::to_text() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "compared=%zu max_abs_err=%.3e max_rel_err=%.3e",
                compared, max_abs_err, max_rel_err);
  std::string s(buf);
  if (!worst.empty()) s += " worst=" + worst;
  return s;
}

void oracle_compare(OracleReport* rep, const std::string& where,
                    const Tensor4<double>& got, const Tensor4<double>& want,
                    double abs_floor) {
  if (!got.same_shape(want)) {
    rep->max_rel_err = std::numeric_limits<double>::infinity();
    rep->worst = where + ": shape " + got.shape_str() + " vs " + want.shape_str();
    return;
  }
  for (int n = 0; n < got.n(); ++n)
    for (int c = 0; c < got.c(); ++c)
      for (int y = 0; y < got.h(); ++y)
        for (int x = 0; x < got.w(); ++x) {
          const double a = got.at(n, c, y, x), b = want.at(n, c, y, x);
          const double abs_err = std::abs(a - b);
          const double rel = abs_err / std::max(abs_floor, std::abs(b));
          rep->compared++;
          if (abs_err > rep->max_abs_err) rep->max_abs_err = abs_err;
          if (rel > rep->max_rel_err) {
            rep->max_rel_err = rel;
            char c4[96];
            std::snprintf(c4, sizeof c4, "[%d,%d,%d,%d] got=%.9g want=%.9g",
                          n, c, y, x, a, b);
            rep->worst = where + c4;
          }
        }
}

Tensor4<double> oracle_dilated_conv(const Tensor4<double>& x,
                                    const Tensor4<double>& w,
                                    const Tensor4<double>& bias,
                                    const ConvSpec& sp) {
  const int k = sp.kernel_half, d = sp.dilation, s = sp.stride;
  const int pad = conv_pad(sp);
  const int ho = conv_out_dim(x.h(), sp), wo = conv_out_dim(x.w(), sp);
  Tensor4<double> out(x.n(), w.n(), ho, wo);
  for (int n = 0; n < x.n(); ++n)
    for (int co = 0; co < w.n(); ++co)
      for (int oy = 0; oy < ho; ++oy)
        for (int ox = 0; ox < wo; ++ox) {
          double acc = bias.empty() ? 0.0 : bias.at(0, co, 0, 0);
          for (int ci = 0; ci < x.c(); ++ci)
            for (int ky = -k; ky <= k; ++ky)
              for (int kx = -k; kx <= k; ++kx) {
                const int iy = oy * s - pad + d * (ky + k);
                const int ix = ox * s - pad + d * (kx + k);
                if (iy < 0 || iy >= x.h() || ix < 0 || ix >= x.w()) continue;
                acc += w.at(co, ci, ky + k, kx + k) * x.at(n, ci, iy, ix);
              }
          out.at(n, co, oy, ox) = acc;
        }
  return out;
}

Tensor4<double> oracle_depthwise_conv(const Tensor4<double>& x,
                                      const Tensor4<double>& w,
                                      const Tensor4<double>& bias,
                                      const ConvSpec& sp) {
  const int k = sp.kernel_half, d = sp.dilation, s = sp.stride;
  const int pad = conv_pad(sp);
  const int ho = conv_out_dim(x.h(), sp), wo = conv_out_dim(x.w(), sp);
  Tensor4<double> out(x.n(), x.c(), ho, wo);
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c)
      for (int oy = 0; oy < ho; ++oy)
        for (int ox = 0; ox < wo; ++ox) {
          double acc = bias.empty() ? 0.0 : bias.at(0, c, 0, 0);
          for (int ky = -k; ky <= k; ++ky)
            for (int kx = -k; kx <= k; ++kx) {
              const int iy = oy * s - pad + d * (ky + k);
              const int ix = ox * s - pad + d * (kx + k);
              if (iy < 0 || iy >= x.h() || ix < 0 || ix >= x.w()) continue;
              acc += w.at(c, 0, ky + k, kx + k) * x.at(n, c, iy, ix);
            }
          out.at(n, c, oy, ox) = acc;
        }
  return out;
}

Tensor4<double> oracle_li_layer(const Tensor4<double>& x,
                                const std::vector<double>& wl,
                                const LIKernelSpec& sp) {
  const int t = sp.zone_half, e = sp.zone_rate;
  Tensor4<double> out(x.n(), x.c(), x.h(), x.w());
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c)
      for (int y = 0; y < x.h(); ++y)
        for (int xx = 0; xx < x.w(); ++xx) {
          double inhib = 0.0;
          for (int uy = -t; uy <= t; ++uy)
            for (int ux = -t; ux <= t; ++ux) {
              if (uy == 0 && ux == 0) continue;
              const int iy = y + e * uy, ix = xx + e * ux;
              if (iy < 0 || iy >= x.h() || ix < 0 || ix >= x.w()) continue;
              const double d2 = double(uy) * uy + double(ux) * ux;
              inhib += std::exp(-d2 / (2.0 * sp.sigma * sp.sigma)) *
                       x.at(n, c, iy, ix);
            }
          out.at(n, c, y, xx) = x.at(n, c, y, xx) - wl[size_t(c)] * inhib;
        }
  return out;
}

Tensor4<double> oracle_li_conv(const Tensor4<double>& x,
                               const std::vector<double>& wl,
                               const Tensor4<double>& w,
                               const Tensor4<double>& bias,
                               const LIConvSpec& sp) {
  Tensor4<double> g(x.n(), x.c(), x.h(), x.w());
  for (size_t i = 0; i < x.size(); ++i)
    g.data()[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
  Tensor4<double> inhibited = oracle_li_layer(g, wl, sp.li);
  if (sp.phi == Activation::ReLU)
    for (size_t i = 0; i < inhibited.size(); ++i)
      if (inhibited.data()[i] < 0.0) inhibited.data()[i] = 0.0;
  return oracle_dilated_conv(inhibited, w, bias, sp.conv);
}

std::vector<double> oracle_grad(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& theta, double step) {
  std::vector<double> g(theta.size());
  std::vector<double> t = theta;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double v = theta[i];
    t[i] = v + step;
    const double fp = f(t);
    t[i] = v - step;
    const double fm = f(t);
    t[i] = v;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace liconv
