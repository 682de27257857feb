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
#include "liconv/model.hpp"

#include <cstdio>
#include <string>

#include "liconv/conv.hpp"

namespace liconv {

SegmenterConfig toy_segmenter_config(int num_classes, bool li_enabled) {
  SegmenterConfig cfg;
  cfg.in_channels = 3;
  cfg.stem_channels = 32;
  cfg.num_classes = num_classes;
  cfg.output_stride = 16;

  // out_channels, expansion, stride, dilation, li
  struct Row {
    int out, e, s, d;
    bool li;
  };
  const Row rows[] = {
      {16, 1, 1, 1, false}, {32, 4, 2, 1, false}, {48, 4, 2, 1, false},
      {64, 4, 2, 1, false}, {64, 4, 1, 2, false}, {80, 4, 1, 2, li_enabled},
      {96, 4, 1, 2, li_enabled}, {96, 4, 1, 2, li_enabled},
  };
  int in = cfg.stem_channels;
  for (const Row& r : rows) {
    LIBottleneckConfig b;
    b.in_channels = in;
    b.out_channels = r.out;
    b.expansion = r.e;
    b.stride = r.s;
    b.dilation = r.d;
    b.li_enabled = r.li;
    cfg.blocks.push_back(b);
    in = r.out;
  }

  cfg.head.in_channels = in;
  cfg.head.branch_channels = 96;
  cfg.head.projection_channels = 96;
  cfg.head.rates = {6, 12, 18};
  cfg.head.li_enabled = li_enabled;
  return cfg;
}

void validate_config(const SegmenterConfig& cfg) {
  if (cfg.in_channels < 1 || cfg.stem_channels < 1)
    throw ConfigError("segmenter: channel counts must be positive");
  if (cfg.num_classes < 2)
    throw ConfigError("segmenter: need at least two classes");
  if (cfg.blocks.empty()) throw ConfigError("segmenter: no backbone blocks");

  int in = cfg.stem_channels;
  long long stride = 2;  // stem
  for (size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto& b = cfg.blocks[i];
    const std::string name = "block" + std::to_string(i + 1);
    if (b.in_channels != in)
      throw ConfigError(name + ": expects in_channels " + std::to_string(in) +
                        ", config says " + std::to_string(b.in_channels));
    if (b.out_channels < 1 || b.expansion < 1)
      throw ConfigError(name + ": bad channel or expansion value");
    if (b.stride != 1 && b.stride != 2)
      throw ConfigError(name + ": stride must be 1 or 2");
    if (b.dilation < 1) throw ConfigError(name + ": dilation must be >= 1");
    if (b.li_enabled && b.expansion == 1)
      throw ConfigError(name +
                        ": LI needs an expansion conv to sit behind");
    if (b.li_enabled) {
      try {
        validate_li_spec(b.li);
      } catch (const ParameterError& e) {
        throw ConfigError(name + ": " + e.what());
      }
    }
    stride *= b.stride;
    in = b.out_channels;
  }
  if (stride != cfg.output_stride)
    throw ConfigError("segmenter: cumulative stride " +
                      std::to_string(stride) + " != output_stride " +
                      std::to_string(cfg.output_stride));
  if (cfg.head.in_channels != in)
    throw ConfigError("head: expects in_channels " + std::to_string(in) +
                      ", config says " + std::to_string(cfg.head.in_channels));
  if (cfg.head.branch_channels < 1 || cfg.head.projection_channels < 1)
    throw ConfigError("head: channel counts must be positive");
  for (int r : cfg.head.rates)
    if (r < 1) throw ConfigError("head: dilation rates must be >= 1");
  if (cfg.head.li_enabled)
    for (const auto& sp : cfg.head.li) {
      try {
        validate_li_spec(sp);
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("head: ") + e.what());
      }
    }
}

void validate_input_size(const SegmenterConfig& cfg, int h, int w) {
  if (h < cfg.output_stride || w < cfg.output_stride)
    throw ConfigError("segmenter: input " + std::to_string(h) + "x" +
                      std::to_string(w) + " smaller than output stride " +
                      std::to_string(cfg.output_stride));
  for (int dim : {h, w}) {
    const int r = dim % cfg.output_stride;
    if (r != 0 && r != 1)
      throw ConfigError(
          "segmenter: input dim " + std::to_string(dim) +
          " must be 0 or 1 mod output_stride " +
          std::to_string(cfg.output_stride));
  }
}

void enumerate_params(const SegmenterConfig& cfg,
                      const std::function<void(const ParamDesc&)>& fn) {
  auto conv = [&](const std::string& name, int cout, int cin, int k) {
    fn({name + ".w", cout, cin, k, k, ParamGroup::ConvWeights, cin * k * k});
    fn({name + ".b", 1, cout, 1, 1, ParamGroup::Other, 0});
  };
  auto dwconv = [&](const std::string& name, int c, int k) {
    fn({name + ".w", c, 1, k, k, ParamGroup::ConvWeights, k * k});
    fn({name + ".b", 1, c, 1, 1, ParamGroup::Other, 0});
  };
  auto li = [&](const std::string& name, int c) {
    fn({name, c, 1, 1, 1, ParamGroup::LiWeights, 0});
  };

  conv("stem", cfg.stem_channels, cfg.in_channels, 3);
  for (size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto& b = cfg.blocks[i];
    const std::string p = "block" + std::to_string(i + 1);
    const int mid = b.in_channels * b.expansion;
    if (b.expansion > 1) conv(p + ".expand", mid, b.in_channels, 1);
    if (b.li_enabled) li(p + ".li.wl", mid);
    dwconv(p + ".dw", mid, 3);
    conv(p + ".project", b.out_channels, mid, 1);
  }
  const auto& hd = cfg.head;
  conv("aspp.b0", hd.branch_channels, hd.in_channels, 1);
  for (int j = 1; j <= 3; ++j) {
    const std::string p = "aspp.br" + std::to_string(j);
    if (hd.li_enabled) li(p + ".wl", hd.in_channels);
    dwconv(p + ".dw", hd.in_channels, 3);
    conv(p + ".pw", hd.branch_channels, hd.in_channels, 1);
  }
  conv("aspp.pool", hd.branch_channels, hd.in_channels, 1);
  conv("aspp.proj", hd.projection_channels, 5 * hd.branch_channels, 1);
  conv("cls", cfg.num_classes, hd.projection_channels, 1);
}

ParamCountReport count_params(const SegmenterConfig& cfg) {
  ParamCountReport rep;
  rep.by_group["li_weights"] = 0;
  rep.by_group["conv_weights"] = 0;
  rep.by_group["other"] = 0;
  enumerate_params(cfg, [&](const ParamDesc& d) {
    rep.total += (long long)d.size();
    rep.by_group[param_group_name(d.group)] += (long long)d.size();
  });
  return rep;
}

std::string ParamCountReport::to_text() const {
  std::string out = "group,params\n";
  for (const auto& [g, n] : by_group)
    out += g + "," + std::to_string(n) + "\n";
  out += "total," + std::to_string(total) + "\n";
  return out;
}

std::vector<MacItem> enumerate_macs(const SegmenterConfig& cfg, int h,
                                    int w) {
  validate_input_size(cfg, h, w);
  std::vector<MacItem> items;
  auto out_dims = [](int hh, int ww, int stride) {
    ConvSpec sp;
    sp.kernel_half = 1;
    sp.stride = stride;
    return std::pair<int, int>(conv_out_dim(hh, sp), conv_out_dim(ww, sp));
  };

  auto [fh, fw] = out_dims(h, w, 2);
  items.push_back({"stem", conv_macs(cfg.in_channels, cfg.stem_channels, 3,
                                     fh, fw),
                   false});
  for (size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto& b = cfg.blocks[i];
    const std::string p = "block" + std::to_string(i + 1);
    const int mid = b.in_channels * b.expansion;
    long long macs = 0;
    if (b.expansion > 1) macs += conv_macs(b.in_channels, mid, 1, fh, fw);
    if (b.li_enabled)
      items.push_back({p + ".li", li_macs(mid, b.li.zone_half, fh, fw), true});
    auto [oh, ow] = out_dims(fh, fw, b.stride);
    macs += depthwise_macs(mid, 3, oh, ow);
    macs += conv_macs(mid, b.out_channels, 1, oh, ow);
    items.push_back({p, macs, false});
    fh = oh;
    fw = ow;
  }
  const auto& hd = cfg.head;
  items.push_back({"aspp.b0",
                   conv_macs(hd.in_channels, hd.branch_channels, 1, fh, fw),
                   false});
  for (int j = 1; j <= 3; ++j) {
    const std::string p = "aspp.br" + std::to_string(j);
    if (hd.li_enabled)
      items.push_back({p + ".li",
                       li_macs(hd.in_channels,
                               hd.li[size_t(j - 1)].zone_half, fh, fw),
                       true});
    items.push_back({p,
                     depthwise_macs(hd.in_channels, 3, fh, fw) +
                         conv_macs(hd.in_channels, hd.branch_channels, 1, fh,
                                   fw),
                     false});
  }
  items.push_back({"aspp.pool",
                   conv_macs(hd.in_channels, hd.branch_channels, 1, 1, 1),
                   false});
  items.push_back({"aspp.proj",
                   conv_macs(5 * hd.branch_channels, hd.projection_channels,
                             1, fh, fw),
                   false});
  items.push_back({"cls",
                   conv_macs(hd.projection_channels, cfg.num_classes, 1, fh,
                             fw),
                   false});
  return items;
}

FlopReport count_flops(const SegmenterConfig& cfg, int h, int w) {
  FlopReport rep;
  rep.items = enumerate_macs(cfg, h, w);
  for (const auto& it : rep.items) {
    rep.total += it.macs;
    if (it.is_li) rep.li += it.macs;
  }
  return rep;
}

std::string FlopReport::to_text() const {
  std::string out = "component,macs,li\n";
  for (const auto& it : items)
    out += it.component + "," + std::to_string(it.macs) + "," +
           (it.is_li ? "1" : "0") + "\n";
  out += "total," + std::to_string(total) + ",\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "li_total,%lld,\nli_fraction,%.6f,\n", li,
                li_fraction());
  return out + buf;
}

}  // namespace liconv
