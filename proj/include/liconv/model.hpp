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
#ifndef LICONV_MODEL_HPP_
#define LICONV_MODEL_HPP_

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "liconv/autodiff.hpp"
#include "liconv/errors.hpp"
#include "liconv/li.hpp"
#include "liconv/param.hpp"
#include "liconv/rng.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

// Five parallel branches: one 1x1 conv, three dilated depthwise-separable
// convs (optionally LI-Conv), one image-pooling branch; concatenated and
// projected back down with a 1x1 conv.
struct LIASPPConfig {
  int in_channels = 96;
  int branch_channels = 96;
  std::array<int, 3> rates{6, 12, 18};
  std::array<LIKernelSpec, 3> li{};
  bool li_enabled = true;
  int projection_channels = 96;
};

// Inverted-residual block; the LI layer slots between the 1x1 expansion and
// the 3x3 depthwise conv.
struct LIBottleneckConfig {
  int in_channels = 0;
  int out_channels = 0;
  int expansion = 1;
  int stride = 1;
  int dilation = 1;
  LIKernelSpec li{};
  bool li_enabled = false;
};

struct SegmenterConfig {
  int in_channels = 3;
  int stem_channels = 32;
  std::vector<LIBottleneckConfig> blocks;
  int output_stride = 16;
  LIASPPConfig head;
  int num_classes = 4;
};

// The desk-scale segmenter: stem /2, eight blocks reaching stride 16 with
// dilation taking over afterwards, LI at the three highest eligible blocks
// and in the head.
SegmenterConfig toy_segmenter_config(int num_classes = 4,
                                     bool li_enabled = true);

// Throws ConfigError on inconsistent channel chains, stride products,
// LI placement (needs an expansion conv), or bad LI/conv hyper-parameters.
void validate_config(const SegmenterConfig& cfg);

// Input sizes must satisfy dim % output_stride in {0, 1} so the stride-2
// chain lands on integer sizes both for 2^k and 2^k+1 style inputs.
void validate_input_size(const SegmenterConfig& cfg, int h, int w);

struct ParamDesc {
  std::string name;
  int n = 1, c = 1, h = 1, w = 1;
  ParamGroup group = ParamGroup::Other;
  int fan_in = 0;  // 0 means zero-init (biases, w_l)
  size_t size() const {
    return size_t(n) * size_t(c) * size_t(h) * size_t(w);
  }
};

// Single source of truth for the parameter set: registration order here is
// the initialization draw order, the checkpoint manifest order follows the
// store's name order, and count_params sums the same shapes.
void enumerate_params(const SegmenterConfig& cfg,
                      const std::function<void(const ParamDesc&)>& fn);

struct ParamCountReport {
  long long total = 0;
  std::map<std::string, long long> by_group;
  std::string to_text() const;
};

ParamCountReport count_params(const SegmenterConfig& cfg);

struct MacItem {
  std::string component;
  long long macs = 0;
  bool is_li = false;
};

// Conv and LI multiply-adds only; elementwise ops, pooling, and resizing are
// not counted. LI layer cost per plane is (2t+1)^2 - 1 taps.
std::vector<MacItem> enumerate_macs(const SegmenterConfig& cfg, int h, int w);

struct FlopReport {
  long long total = 0;
  long long li = 0;
  std::vector<MacItem> items;
  double li_fraction() const { return total ? double(li) / double(total) : 0; }
  std::string to_text() const;
};

FlopReport count_flops(const SegmenterConfig& cfg, int h, int w);

inline long long conv_macs(int cin, int cout, int k, int out_h, int out_w) {
  return 1LL * cin * cout * k * k * out_h * out_w;
}
inline long long depthwise_macs(int c, int k, int out_h, int out_w) {
  return 1LL * c * k * k * out_h * out_w;
}
inline long long li_macs(int c, int zone_half, int h, int w) {
  const long long kk = 2LL * zone_half + 1;
  return 1LL * c * h * w * (kk * kk - 1);
}

// Named tape nodes for feature dumps: stem, blockN, blockN.li.pre/.post,
// aspp branch outputs, aspp.out, logits_os, logits.
using FeatureTaps = std::map<std::string, int>;

template <typename T>
void init_segmenter_params(const SegmenterConfig& cfg, ParamStore<T>& store,
                           Rng& rng) {
  validate_config(cfg);
  enumerate_params(cfg, [&](const ParamDesc& d) {
    Tensor4<T> t(d.n, d.c, d.h, d.w);
    if (d.fan_in > 0) {
      const double stddev = std::sqrt(2.0 / double(d.fan_in));
      for (size_t i = 0; i < t.size(); ++i)
        t.data()[i] = T(rng.normal() * stddev);
    }
    store.add(d.name, std::move(t), d.group);
  });
}

template <typename T>
int li_bottleneck_forward(Tape<T>& tape, int x, const LIBottleneckConfig& cfg,
                          const std::string& prefix,
                          FeatureTaps* taps = nullptr) {
  if (tape.value(x).c() != cfg.in_channels)
    throw DimensionError(prefix + ": input has " +
                         std::to_string(tape.value(x).c()) + " channels, " +
                         "config says " + std::to_string(cfg.in_channels));
  ConvSpec pw;
  pw.kernel_half = 0;
  int e = x;
  if (cfg.expansion > 1)
    e = tape.relu(tape.conv2d(x, prefix + ".expand.w", prefix + ".expand.b",
                              pw));
  int d_in = e;
  if (cfg.li_enabled) {
    if (taps) (*taps)[prefix + ".li.pre"] = e;
    const int inh = tape.li_layer(e, prefix + ".li.wl", cfg.li);
    if (taps) (*taps)[prefix + ".li.post"] = inh;
    d_in = tape.relu(inh);
  }
  ConvSpec dw;
  dw.kernel_half = 1;
  dw.stride = cfg.stride;
  dw.dilation = cfg.dilation;
  const int d =
      tape.relu(tape.depthwise_conv2d(d_in, prefix + ".dw.w",
                                      prefix + ".dw.b", dw));
  int out = tape.conv2d(d, prefix + ".project.w", prefix + ".project.b", pw);
  if (cfg.stride == 1 && cfg.in_channels == cfg.out_channels)
    out = tape.add(x, out);
  return out;
}

template <typename T>
int li_aspp_forward(Tape<T>& tape, int x, const LIASPPConfig& cfg,
                    const std::string& prefix, FeatureTaps* taps = nullptr) {
  if (tape.value(x).c() != cfg.in_channels)
    throw DimensionError(prefix + ": input has " +
                         std::to_string(tape.value(x).c()) + " channels, " +
                         "config says " + std::to_string(cfg.in_channels));
  const int h = tape.value(x).h(), w = tape.value(x).w();
  if (h < 1 || w < 1)
    throw DimensionError(prefix + ": empty spatial extent");
  const int u = tape.relu(x);
  ConvSpec pw;
  pw.kernel_half = 0;
  std::vector<int> branches;
  branches.push_back(tape.conv2d(u, prefix + ".b0.w", prefix + ".b0.b", pw));
  if (taps) (*taps)[prefix + ".b0"] = branches.back();
  for (int j = 0; j < 3; ++j) {
    const std::string bp = prefix + ".br" + std::to_string(j + 1);
    int e = u;
    if (cfg.li_enabled) {
      if (taps) (*taps)[bp + ".li.pre"] = e;
      const int inh = tape.li_layer(e, bp + ".wl", cfg.li[size_t(j)]);
      if (taps) (*taps)[bp + ".li.post"] = inh;
      e = tape.relu(inh);
    }
    ConvSpec dw;
    dw.kernel_half = 1;
    dw.dilation = cfg.rates[size_t(j)];
    const int d = tape.depthwise_conv2d(e, bp + ".dw.w", bp + ".dw.b", dw);
    branches.push_back(tape.conv2d(d, bp + ".pw.w", bp + ".pw.b", pw));
    if (taps) (*taps)[bp] = branches.back();
  }
  const int gap = tape.global_avg_pool(u);
  const int pc =
      tape.relu(tape.conv2d(gap, prefix + ".pool.w", prefix + ".pool.b", pw));
  branches.push_back(tape.bilinear(pc, h, w));
  if (taps) (*taps)[prefix + ".pool"] = branches.back();
  const int cat = tape.concat(branches);
  return tape.relu(
      tape.conv2d(cat, prefix + ".proj.w", prefix + ".proj.b", pw));
}

// Full forward to upsampled logits (N, num_classes, H, W).
template <typename T>
int segmenter_forward(Tape<T>& tape, int image, const SegmenterConfig& cfg,
                      FeatureTaps* taps = nullptr) {
  const int in_h = tape.value(image).h(), in_w = tape.value(image).w();
  const int in_c = tape.value(image).c();
  validate_input_size(cfg, in_h, in_w);
  if (in_c != cfg.in_channels)
    throw DimensionError("segmenter: image has " + std::to_string(in_c) +
                         " channels, config says " +
                         std::to_string(cfg.in_channels));
  ConvSpec stem;
  stem.kernel_half = 1;
  stem.stride = 2;
  int h = tape.relu(tape.conv2d(image, "stem.w", "stem.b", stem));
  if (taps) (*taps)["stem"] = h;
  for (size_t i = 0; i < cfg.blocks.size(); ++i) {
    const std::string name = "block" + std::to_string(i + 1);
    h = li_bottleneck_forward(tape, h, cfg.blocks[i], name, taps);
    if (taps) (*taps)[name] = h;
  }
  const int head = li_aspp_forward(tape, h, cfg.head, "aspp", taps);
  if (taps) (*taps)["aspp.out"] = head;
  ConvSpec pw;
  pw.kernel_half = 0;
  const int logits_os = tape.conv2d(head, "cls.w", "cls.b", pw);
  if (taps) (*taps)["logits_os"] = logits_os;
  const int logits = tape.bilinear(logits_os, in_h, in_w);
  if (taps) (*taps)["logits"] = logits;
  return logits;
}

// Inference-only convenience wrapper: forward once, return the logits.
template <typename T>
Tensor4<T> segmenter_infer(const Tensor4<T>& image, const SegmenterConfig& cfg,
                           ParamStore<T>& store) {
  Tape<T> tape(&store);
  const int logits = segmenter_forward(tape, tape.input(image), cfg);
  return tape.value(logits);
}

}  // namespace liconv

#endif  // LICONV_MODEL_HPP_
