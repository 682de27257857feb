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
#include "liconv/verify.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "liconv/autodiff.hpp"
#include "liconv/errors.hpp"
#include "liconv/li.hpp"
#include "liconv/loss.hpp"
#include "liconv/metrics.hpp"
#include "liconv/model.hpp"
#include "liconv/rng.hpp"

namespace liconv {

namespace {

template <typename T>
Tensor4<T> random_tensor(Rng& rng, int n, int c, int h, int w, double lo,
                         double hi) {
  Tensor4<T> t(n, c, h, w);
  for (size_t i = 0; i < t.size(); ++i) t.data()[i] = T(rng.uniform(lo, hi));
  return t;
}

template <typename T>
double max_rel(const Tensor4<T>& a, const Tensor4<T>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double x = double(a.data()[i]), y = double(b.data()[i]);
    const double rel = std::abs(x - y) / std::max(1e-9, std::abs(y));
    if (rel > worst) worst = rel;
  }
  return worst;
}

void merge_gradcheck(GradCheckReport* into, const GradCheckReport& r,
                     int inst) {
  into->coords += r.coords;
  if (r.max_abs_err > into->max_abs_err) into->max_abs_err = r.max_abs_err;
  if (r.max_rel_err > into->max_rel_err) {
    into->max_rel_err = r.max_rel_err;
    into->worst = "inst " + std::to_string(inst) + ": " + r.worst;
  }
}

// The small segmenter used for full-model gradient checks: two blocks, LI in
// the second block and the head, stride 4, three classes.
SegmenterConfig gradcheck_cfg() {
  SegmenterConfig cfg;
  cfg.in_channels = 3;
  cfg.stem_channels = 6;
  cfg.num_classes = 3;
  cfg.output_stride = 4;
  LIBottleneckConfig b1;
  b1.in_channels = 6;
  b1.out_channels = 8;
  b1.expansion = 2;
  b1.stride = 2;
  LIBottleneckConfig b2;
  b2.in_channels = 8;
  b2.out_channels = 10;
  b2.expansion = 2;
  b2.dilation = 2;
  b2.li_enabled = true;
  cfg.blocks = {b1, b2};
  cfg.head.in_channels = 10;
  cfg.head.branch_channels = 6;
  cfg.head.projection_channels = 6;
  cfg.head.rates = {2, 3, 4};
  cfg.head.li_enabled = true;
  return cfg;
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const VerifyCheck& c : checks)
    if (!c.pass) return false;
  return true;
}

const VerifyCheck* VerifyReport::first_failure() const {
  for (const VerifyCheck& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

std::string VerifyReport::to_text() const {
  std::string out;
  size_t failed = 0;
  for (const VerifyCheck& c : checks) {
    out += (c.pass ? "ok   " : "FAIL ") + c.name;
    if (!c.detail.empty()) out += "  " + c.detail;
    out += "\n";
    if (!c.pass) ++failed;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%zu/%zu checks passed\n",
                checks.size() - failed, checks.size());
  return out + buf;
}

OracleReport li_conv_oracle_sweep(uint64_t seed, int instances, int max_hw) {
  Rng rng(seed);
  OracleReport rep;
  for (int i = 0; i < instances; ++i) {
    const int cin = 1 + rng.uniform_int(4);
    const int cout = 1 + rng.uniform_int(4);
    const int n = 1 + rng.uniform_int(2);
    const int h = 3 + rng.uniform_int(max_hw - 2);
    const int w = 3 + rng.uniform_int(max_hw - 2);
    LIConvSpec sp;
    sp.li.zone_half = rng.uniform_int(3);
    sp.li.zone_rate = 1 + rng.uniform_int(3);
    sp.li.sigma = rng.uniform(0.5, 2.0);
    sp.conv.kernel_half = rng.uniform_int(2);
    sp.conv.dilation = 1 + rng.uniform_int(4);
    sp.conv.stride = 1 + rng.uniform_int(2);
    sp.phi = rng.uniform_int(2) ? Activation::ReLU : Activation::Identity;
    const int kk = 2 * sp.conv.kernel_half + 1;

    const Tensor4<double> x = random_tensor<double>(rng, n, cin, h, w, -1, 1);
    std::vector<double> wl(static_cast<size_t>(cin));
    for (double& v : wl) v = rng.uniform(0.0, 1.0);
    const Tensor4<double> wt =
        random_tensor<double>(rng, cout, cin, kk, kk, -0.6, 0.6);
    const Tensor4<double> b =
        random_tensor<double>(rng, 1, cout, 1, 1, -0.3, 0.3);

    const Tensor4<double> got = li_conv_forward(x, wl, wt, b, sp);
    const Tensor4<double> want = oracle_li_conv(x, wl, wt, b, sp);
    char where[96];
    std::snprintf(where, sizeof(where), "inst %d c=%d t=%d e=%d d=%d s=%d %dx%d",
                  i, cin, sp.li.zone_half, sp.li.zone_rate, sp.conv.dilation,
                  sp.conv.stride, h, w);
    oracle_compare(&rep, where, got, want);
  }
  return rep;
}

OracleReport conv_oracle_sweep(uint64_t seed, int instances, int max_hw) {
  Rng rng(seed);
  OracleReport rep;
  for (int i = 0; i < instances; ++i) {
    const int n = 1 + rng.uniform_int(2);
    const int cin = 1 + rng.uniform_int(4);
    const int h = 3 + rng.uniform_int(max_hw - 2);
    const int w = 3 + rng.uniform_int(max_hw - 2);
    ConvSpec sp;
    sp.kernel_half = rng.uniform_int(3);
    sp.dilation = 1 + rng.uniform_int(4);
    sp.stride = 1 + rng.uniform_int(2);
    const int kk = 2 * sp.kernel_half + 1;
    const Tensor4<double> x = random_tensor<double>(rng, n, cin, h, w, -1, 1);
    char where[80];
    if (i % 2 == 0) {
      const int cout = 1 + rng.uniform_int(4);
      const Tensor4<double> wt =
          random_tensor<double>(rng, cout, cin, kk, kk, -0.6, 0.6);
      const Tensor4<double> b =
          random_tensor<double>(rng, 1, cout, 1, 1, -0.3, 0.3);
      std::snprintf(where, sizeof(where), "dense inst %d k=%d d=%d s=%d", i,
                    sp.kernel_half, sp.dilation, sp.stride);
      oracle_compare(&rep, where, conv2d_dilated(x, wt, b, sp),
                     oracle_dilated_conv(x, wt, b, sp));
    } else {
      const Tensor4<double> wt =
          random_tensor<double>(rng, cin, 1, kk, kk, -0.6, 0.6);
      const Tensor4<double> b =
          random_tensor<double>(rng, 1, cin, 1, 1, -0.3, 0.3);
      std::snprintf(where, sizeof(where), "depthwise inst %d k=%d d=%d s=%d",
                    i, sp.kernel_half, sp.dilation, sp.stride);
      oracle_compare(&rep, where, depthwise_conv2d(x, wt, b, sp),
                     oracle_depthwise_conv(x, wt, b, sp));
    }
  }
  return rep;
}

GradCheckReport li_conv_gradcheck_sweep(uint64_t seed, int instances) {
  Rng rng(seed);
  GradCheckReport merged;
  for (int i = 0; i < instances; ++i) {
    const int cin = 1 + rng.uniform_int(3);
    const int cout = 1 + rng.uniform_int(3);
    const int h = 5 + rng.uniform_int(4);
    const int w = 5 + rng.uniform_int(4);
    LIKernelSpec li;
    li.zone_half = rng.uniform_int(3);
    li.zone_rate = 1 + rng.uniform_int(3);
    li.sigma = rng.uniform(0.6, 1.6);
    ConvSpec conv;
    conv.kernel_half = 1;
    conv.dilation = 1 + rng.uniform_int(4);

    ParamStore<double> store;
    store.add("x", random_tensor<double>(rng, 1, cin, h, w, -1, 1),
              ParamGroup::Other);
    store.add("w", random_tensor<double>(rng, cout, cin, 3, 3, -0.5, 0.5),
              ParamGroup::ConvWeights);
    store.add("b", random_tensor<double>(rng, 1, cout, 1, 1, -0.2, 0.2),
              ParamGroup::Other);
    store.add("wl", random_tensor<double>(rng, cin, 1, 1, 1, 0.05, 0.95),
              ParamGroup::LiWeights);
    const Tensor4<double> proj =
        random_tensor<double>(rng, 1, cout, h, w, -1, 1);

    auto run = [&](bool backprop) -> double {
      Tape<double> tape(&store);
      const int x = tape.param_leaf("x");
      const int g = tape.relu(x);
      const int inh = tape.li_layer(g, "wl", li);
      const int act = tape.relu(inh);
      const int y = tape.conv2d(act, "w", "b", conv);
      const Tensor4<double>& v = tape.value(y);
      double loss = 0.0;
      for (size_t j = 0; j < v.size(); ++j)
        loss += v.data()[j] * proj.data()[j];
      if (backprop) tape.backward(y, proj);
      return loss;
    };
    store.zero_grad();
    run(true);
    auto f = [&]() { return run(false); };
    Rng pick(rng.raw());
    merge_gradcheck(&merged, finite_diff_gradcheck(store, f, 1e-6, 8, pick),
                    i);
  }
  return merged;
}

GradCheckReport model_gradcheck_sweep(uint64_t seed, int instances) {
  const SegmenterConfig cfg = gradcheck_cfg();
  Rng rng(seed);
  GradCheckReport merged;
  for (int i = 0; i < instances; ++i) {
    ParamStore<double> store;
    Rng ir(rng.raw());
    init_segmenter_params(cfg, store, ir);
    // w_l initializes to the clamp boundary; nudge it inside so the +/- probe
    // stays in the legal range. Biases initialize to zero, which parks every
    // dead receptive field exactly on the relu kink where central differences
    // straddle the corner; draw them off zero as well.
    for (auto& [name, p] : store) {
      if (p.group == ParamGroup::LiWeights)
        for (size_t j = 0; j < p.value.size(); ++j)
          p.value.data()[j] = rng.uniform(0.1, 0.9);
      if (p.group == ParamGroup::Other)
        for (size_t j = 0; j < p.value.size(); ++j)
          p.value.data()[j] = rng.uniform(-0.2, 0.2);
    }

    const int hs = 9;
    const Tensor4<double> image =
        random_tensor<double>(rng, 1, cfg.in_channels, hs, hs, -1, 1);
    Tensor4<int> labels(1, 1, hs, hs);
    for (int y = 0; y < hs; ++y)
      for (int x = 0; x < hs; ++x)
        labels.at(0, 0, y, x) = rng.uniform_int(cfg.num_classes);
    labels.at(0, 0, 0, 0) = 255;

    auto run = [&](bool backprop) -> double {
      Tape<double> tape(&store);
      const int out = segmenter_forward(tape, tape.input(image), cfg);
      const auto r = cross_entropy_loss(tape.value(out), labels);
      if (backprop) tape.backward(out, r.dlogits);
      return r.loss;
    };
    store.zero_grad();
    run(true);
    auto f = [&]() { return run(false); };
    Rng pick(rng.raw());
    merge_gradcheck(&merged, finite_diff_gradcheck(store, f, 1e-6, 4, pick),
                    i);
  }
  return merged;
}

double wl0_bottleneck_worst(uint64_t seed, int instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    LIBottleneckConfig bc;
    bc.in_channels = 2 + rng.uniform_int(6);
    bc.out_channels =
        rng.uniform_int(2) ? bc.in_channels : 2 + rng.uniform_int(6);
    bc.expansion = 2 + rng.uniform_int(2);
    bc.stride = 1 + rng.uniform_int(2);
    bc.dilation = 1 + rng.uniform_int(2);
    bc.li_enabled = true;
    LIBottleneckConfig base = bc;
    base.li_enabled = false;
    const int mid = bc.in_channels * bc.expansion;

    ParamStore<float> store;
    store.add("blk.expand.w",
              random_tensor<float>(rng, mid, bc.in_channels, 1, 1, -0.5, 0.5),
              ParamGroup::ConvWeights);
    store.add("blk.expand.b",
              random_tensor<float>(rng, 1, mid, 1, 1, -0.1, 0.1),
              ParamGroup::Other);
    store.add("blk.li.wl", Tensor4<float>(mid, 1, 1, 1),
              ParamGroup::LiWeights);
    store.add("blk.dw.w",
              random_tensor<float>(rng, mid, 1, 3, 3, -0.5, 0.5),
              ParamGroup::ConvWeights);
    store.add("blk.dw.b", random_tensor<float>(rng, 1, mid, 1, 1, -0.1, 0.1),
              ParamGroup::Other);
    store.add("blk.project.w",
              random_tensor<float>(rng, bc.out_channels, mid, 1, 1, -0.5, 0.5),
              ParamGroup::ConvWeights);
    store.add("blk.project.b",
              random_tensor<float>(rng, 1, bc.out_channels, 1, 1, -0.1, 0.1),
              ParamGroup::Other);

    const int h = 8 + rng.uniform_int(5), w = 8 + rng.uniform_int(5);
    const Tensor4<float> x =
        random_tensor<float>(rng, 1, bc.in_channels, h, w, -1, 1);
    Tape<float> t1(&store);
    const Tensor4<float> with_li =
        t1.value(li_bottleneck_forward(t1, t1.input(x), bc, "blk"));
    Tape<float> t2(&store);
    const Tensor4<float> without =
        t2.value(li_bottleneck_forward(t2, t2.input(x), base, "blk"));
    worst = std::max(worst, max_rel(with_li, without));
  }
  return worst;
}

double wl0_aspp_worst(uint64_t seed, int instances) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    LIASPPConfig ac;
    ac.in_channels = 3 + rng.uniform_int(6);
    ac.branch_channels = 2 + rng.uniform_int(5);
    ac.projection_channels = 2 + rng.uniform_int(5);
    ac.rates = {1 + rng.uniform_int(3), 1 + rng.uniform_int(3),
                1 + rng.uniform_int(3)};
    ac.li_enabled = true;
    LIASPPConfig base = ac;
    base.li_enabled = false;

    ParamStore<float> store;
    auto conv = [&](const std::string& name, int cout, int cin) {
      store.add(name + ".w",
                random_tensor<float>(rng, cout, cin, 1, 1, -0.5, 0.5),
                ParamGroup::ConvWeights);
      store.add(name + ".b",
                random_tensor<float>(rng, 1, cout, 1, 1, -0.1, 0.1),
                ParamGroup::Other);
    };
    conv("aspp.b0", ac.branch_channels, ac.in_channels);
    for (int j = 1; j <= 3; ++j) {
      const std::string bp = "aspp.br" + std::to_string(j);
      store.add(bp + ".wl", Tensor4<float>(ac.in_channels, 1, 1, 1),
                ParamGroup::LiWeights);
      store.add(bp + ".dw.w",
                random_tensor<float>(rng, ac.in_channels, 1, 3, 3, -0.5, 0.5),
                ParamGroup::ConvWeights);
      store.add(bp + ".dw.b",
                random_tensor<float>(rng, 1, ac.in_channels, 1, 1, -0.1, 0.1),
                ParamGroup::Other);
      conv(bp + ".pw", ac.branch_channels, ac.in_channels);
    }
    conv("aspp.pool", ac.branch_channels, ac.in_channels);
    conv("aspp.proj", ac.projection_channels, 5 * ac.branch_channels);

    const int h = 7 + rng.uniform_int(5), w = 7 + rng.uniform_int(5);
    const Tensor4<float> x =
        random_tensor<float>(rng, 1, ac.in_channels, h, w, -1, 1);
    Tape<float> t1(&store);
    const Tensor4<float> with_li =
        t1.value(li_aspp_forward(t1, t1.input(x), ac, "aspp"));
    Tape<float> t2(&store);
    const Tensor4<float> without =
        t2.value(li_aspp_forward(t2, t2.input(x), base, "aspp"));
    worst = std::max(worst, max_rel(with_li, without));
  }
  return worst;
}

double wl0_segmenter_worst(uint64_t seed, int instances) {
  const SegmenterConfig cfg_li = toy_segmenter_config(4, true);
  const SegmenterConfig cfg_base = toy_segmenter_config(4, false);
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    // One store serves both configs: the LI-free forward simply never reads
    // the zero-initialized w_l entries.
    ParamStore<float> store;
    Rng ir(rng.raw());
    init_segmenter_params(cfg_li, store, ir);
    const Tensor4<float> x = random_tensor<float>(rng, 1, 3, 17, 17, 0, 1);
    const Tensor4<float> with_li = segmenter_infer(x, cfg_li, store);
    const Tensor4<float> without = segmenter_infer(x, cfg_base, store);
    worst = std::max(worst, max_rel(with_li, without));
  }
  return worst;
}

VerifyReport run_verify(const VerifyOptions& opt) {
  if (!opt.inject.empty() && opt.inject != "kernel-sign")
    throw ConfigError("verify: unknown fault '" + opt.inject + "'");
  VerifyReport rep;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
  };
  char buf[256];

  {
    // Frozen anchors for the kernel law: center exactly one, surround
    // -w_l * exp(-(dy^2+dx^2) / (2 sigma^2)) on the un-dilated offsets.
    struct Golden {
      int t, e;
      double sigma, wl;
      int dy, dx;
      double want;
    };
    const Golden goldens[] = {
        {1, 1, 1.0, 0.25, 0, 1, -0.15163266492815836},
        {1, 1, 1.0, 0.25, 1, 1, -0.091969860292860584},
        {1, 1, 1.0, 0.5, 1, 0, -0.30326532985631671},
        {2, 2, 2.0, 1.0, 2, 1, -0.53526142851899028},
        {2, 3, 1.5, 0.8, 2, 2, -0.13521065232485288},
        {1, 1, 1.0, 0.25, 0, 0, 1.0},
        {2, 1, 0.7, 0.0, 2, 2, 0.0},
    };
    bool ok = true;
    std::string detail;
    for (const Golden& g : goldens) {
      LIKernelSpec sp;
      sp.zone_half = g.t;
      sp.zone_rate = g.e;
      sp.sigma = g.sigma;
      const int kk = 2 * g.t + 1;
      std::vector<double> k = build_li_kernel<double>(sp, g.wl);
      if (opt.inject == "kernel-sign")
        for (int j = 0; j < kk * kk; ++j)
          if (j != (kk * kk) / 2) k[size_t(j)] = -k[size_t(j)];
      const double got = k[size_t(g.dy + g.t) * kk + (g.dx + g.t)];
      const double err =
          std::abs(got - g.want) / std::max(1e-9, std::abs(g.want));
      if (err > 1e-15 && ok) {
        ok = false;
        std::snprintf(buf, sizeof(buf),
                      "t=%d sigma=%g wl=%g tap(%d,%d) got %.17g want %.17g",
                      g.t, g.sigma, g.wl, g.dy, g.dx, got, g.want);
        detail = buf;
      }
    }
    // Symmetry sweep: the kernel only depends on the tap's distance.
    for (int t = 0; t <= 2 && ok; ++t) {
      LIKernelSpec sp;
      sp.zone_half = t;
      const int kk = 2 * t + 1;
      const std::vector<double> k = build_li_kernel<double>(sp, 0.7);
      for (int dy = -t; dy <= t && ok; ++dy)
        for (int dx = -t; dx <= t && ok; ++dx) {
          const double a = k[size_t(dy + t) * kk + (dx + t)];
          const double b = k[size_t(-dy + t) * kk + (-dx + t)];
          const double c = k[size_t(dx + t) * kk + (dy + t)];
          if (a != b || a != c) {
            ok = false;
            detail = "symmetry break at t=" + std::to_string(t);
          }
        }
    }
    if (ok) detail = "7 anchors, symmetry t<=2";
    add("li-kernel-golden", ok, detail);
  }

  const int n_oracle = opt.quick ? 6 : 40;
  const int hw_oracle = opt.quick ? 10 : 12;
  {
    const OracleReport r = li_conv_oracle_sweep(opt.seed, n_oracle, hw_oracle);
    std::snprintf(buf, sizeof(buf), "%d instances, %s", n_oracle,
                  r.to_text().c_str());
    add("li-conv-oracle", r.pass(1e-9), buf);
  }
  {
    const OracleReport r = conv_oracle_sweep(opt.seed + 1, n_oracle,
                                             hw_oracle);
    std::snprintf(buf, sizeof(buf), "%d instances, %s", n_oracle,
                  r.to_text().c_str());
    add("conv-oracle", r.pass(1e-9), buf);
  }

  {
    const int n = opt.quick ? 4 : 12;
    const GradCheckReport r = li_conv_gradcheck_sweep(opt.seed + 2, n);
    std::snprintf(buf, sizeof(buf), "%d instances, %s", n,
                  r.to_text().c_str());
    add("li-conv-gradcheck", r.pass(1e-4), buf);
  }
  {
    const int n = opt.quick ? 2 : 4;
    const GradCheckReport r = model_gradcheck_sweep(opt.seed + 3, n);
    std::snprintf(buf, sizeof(buf), "%d instances, %s", n,
                  r.to_text().c_str());
    add("model-gradcheck", r.pass(1e-3), buf);
  }

  {
    const int n = opt.quick ? 2 : 8;
    const int nseg = opt.quick ? 1 : 4;
    const double wb = wl0_bottleneck_worst(opt.seed + 4, n);
    const double wa = wl0_aspp_worst(opt.seed + 5, n);
    const double ws = wl0_segmenter_worst(opt.seed + 6, nseg);
    const double w = std::max({wb, wa, ws});
    std::snprintf(buf, sizeof(buf),
                  "max rel bottleneck %.3e aspp %.3e segmenter %.3e", wb, wa,
                  ws);
    add("wl0-reduction", w <= 1e-6, buf);
  }

  {
    // Two-column step: across-edge contrast after inhibition must exceed the
    // unit contrast before it, for every w_l on the grid, and match the
    // closed form 1 + (2 exp(-1) - exp(-1/2)) w_l.
    bool ok = true;
    std::string detail;
    const int h = 8;
    Tensor4<double> x(1, 1, h, 2);
    for (int r = 0; r < h; ++r) x.at(0, 0, r, 1) = 1.0;
    for (int i = 1; i <= 10 && ok; ++i) {
      const double w = 0.1 * i;
      LIKernelSpec sp;
      const Tensor4<double> y =
          li_layer_forward(x, std::vector<double>{w}, sp);
      const double expect =
          1.0 + (2.0 * std::exp(-1.0) - std::exp(-0.5)) * w;
      for (int r = 1; r < h - 1 && ok; ++r) {
        const double after = std::abs(y.at(0, 0, r, 1) - y.at(0, 0, r, 0));
        if (!(after > 1.0) ||
            std::abs(after - expect) > 1e-9 * std::abs(expect)) {
          ok = false;
          std::snprintf(buf, sizeof(buf),
                        "wl=%.1f row %d contrast %.12f expected %.12f", w, r,
                        after, expect);
          detail = buf;
        }
      }
    }
    if (ok) detail = "w_l grid 0.1..1.0, margin (2e^-1 - e^-1/2) w_l";
    add("edge-contrast", ok, detail);
  }

  {
    // Parameter-count delta: LI adds exactly one scalar per inhibited
    // channel and nothing anywhere else.
    Rng rng(opt.seed + 7);
    const int n = opt.quick ? 4 : 10;
    bool ok = true;
    std::string detail;
    for (int i = 0; i < n && ok; ++i) {
      SegmenterConfig cfg;
      cfg.in_channels = 3;
      cfg.stem_channels = 4 + 2 * rng.uniform_int(5);
      cfg.num_classes = 2 + rng.uniform_int(4);
      int in = cfg.stem_channels;
      long long want = 0;
      int stride = 2;
      const int nblocks = 1 + rng.uniform_int(3);
      for (int bidx = 0; bidx < nblocks; ++bidx) {
        LIBottleneckConfig b;
        b.in_channels = in;
        b.out_channels = 4 + 2 * rng.uniform_int(6);
        b.expansion = 1 + rng.uniform_int(3);
        b.stride = 1 + rng.uniform_int(2);
        b.dilation = 1 + rng.uniform_int(2);
        b.li_enabled = b.expansion > 1 && rng.uniform_int(2) == 1;
        if (b.li_enabled) want += int64_t(b.in_channels) * b.expansion;
        stride *= b.stride;
        in = b.out_channels;
        cfg.blocks.push_back(b);
      }
      cfg.output_stride = stride;
      cfg.head.in_channels = in;
      cfg.head.branch_channels = 4 + rng.uniform_int(5);
      cfg.head.projection_channels = 4 + rng.uniform_int(5);
      cfg.head.rates = {1 + rng.uniform_int(3), 1 + rng.uniform_int(3),
                        1 + rng.uniform_int(3)};
      cfg.head.li_enabled = rng.uniform_int(2) == 1;
      if (cfg.head.li_enabled) want += 3LL * cfg.head.in_channels;

      SegmenterConfig base = cfg;
      for (auto& b : base.blocks) b.li_enabled = false;
      base.head.li_enabled = false;
      const long long got =
          count_params(cfg).total - count_params(base).total;
      if (got != want) {
        ok = false;
        std::snprintf(buf, sizeof(buf), "inst %d delta %lld expected %lld", i,
                      got, want);
        detail = buf;
      }
    }
    if (ok) detail = std::to_string(n) + " random configs, exact";
    add("param-delta", ok, detail);
  }

  {
    // scales=[1.0] must be the single-scale path bit for bit.
    Rng rng(opt.seed + 8);
    const int n = opt.quick ? 1 : 2;
    bool ok = true;
    std::string detail = "bitwise";
    const SegmenterConfig cfg = gradcheck_cfg();
    for (int i = 0; i < n && ok; ++i) {
      ParamStore<float> store;
      Rng ir(rng.raw());
      init_segmenter_params(cfg, store, ir);
      const Tensor4<float> img = random_tensor<float>(rng, 1, 3, 9, 9, 0, 1);
      const Tensor4<float> multi =
          multiscale_probs(img, cfg, store, {1.0});
      const Tensor4<float> single =
          softmax_channels(segmenter_infer(img, cfg, store));
      if (multi.size() != single.size() ||
          std::memcmp(multi.data(), single.data(),
                      multi.size() * sizeof(float)) != 0) {
        ok = false;
        detail = "scales=[1.0] diverged from the single-scale pass";
      }
    }
    add("multiscale-identity", ok, detail);
  }

  return rep;
}

}  // namespace liconv
