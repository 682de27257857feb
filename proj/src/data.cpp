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
#include "liconv/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "liconv/errors.hpp"
#include "liconv/image_io.hpp"
#include "liconv/ops.hpp"

namespace liconv {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Fixed palette stepped by the golden angle; no RNG so class identity is
// stable across seeds and datasets.
std::array<double, 3> class_color(int cls) {
  const double t = 2.399963229728653 * cls;
  return {0.55 + 0.35 * std::sin(t), 0.55 + 0.35 * std::sin(t + kTwoPi / 3.0),
          0.55 + 0.35 * std::sin(t + 2.0 * kTwoPi / 3.0)};
}

// Signed distance to the shape boundary at a pixel center, negative inside.
// The label mask is the exact sign test; the image uses a one pixel linear
// coverage ramp over the same field.
double shape_sdf(const ShapeInfo& s, double y, double x) {
  const double dy = y - s.cy, dx = x - s.cx;
  switch (s.kind) {
    case 0: return std::sqrt(dy * dy + dx * dx) - s.a;
    case 1: return std::max(std::abs(dy) - s.a, std::abs(dx) - s.b);
    default: {
      const double d = std::sqrt(dy * dy + dx * dx);
      return std::max(d - s.a, s.b - d);
    }
  }
}

void validate_spec(const SynthSpec& spec) {
  if (spec.num_classes < 2)
    throw ConfigError("gen_synthetic_contours: need at least 2 classes, got " +
                      std::to_string(spec.num_classes));
  if (spec.min_shapes < 1 || spec.max_shapes < spec.min_shapes)
    throw ConfigError("gen_synthetic_contours: bad shape count range");
  if (!(spec.min_radius_frac > 0.0) ||
      spec.max_radius_frac < spec.min_radius_frac ||
      spec.max_radius_frac >= 0.5)
    throw ConfigError("gen_synthetic_contours: bad radius fractions");
  const double rmax = spec.max_radius_frac * spec.size;
  if (spec.size < 8 || 2.0 * rmax + 2.0 > spec.size)
    throw ConfigError("gen_synthetic_contours: size " +
                      std::to_string(spec.size) + " too small for shapes");
}

}  // namespace

std::vector<SegSample> gen_synthetic_contours(
    uint64_t seed, int n, const SynthSpec& spec,
    std::vector<std::vector<ShapeInfo>>* shapes_out) {
  validate_spec(spec);
  if (n < 0) throw ConfigError("gen_synthetic_contours: negative count");

  const int size = spec.size;
  const double rmin = spec.min_radius_frac * size;
  const double rmax = spec.max_radius_frac * size;

  // One sequential stream; per image the draw order is: shape count, per
  // shape (kind, class, geometry, color jitter), background texture
  // parameters, then one noise value per pixel.
  Rng rng(seed);
  std::vector<SegSample> out;
  out.reserve(size_t(n));
  if (shapes_out) shapes_out->clear();

  for (int i = 0; i < n; ++i) {
    const int nshapes =
        spec.min_shapes + rng.uniform_int(spec.max_shapes - spec.min_shapes + 1);
    std::vector<ShapeInfo> shapes;
    std::vector<std::array<double, 3>> colors;
    shapes.reserve(size_t(nshapes));
    for (int k = 0; k < nshapes; ++k) {
      ShapeInfo s;
      s.kind = spec.disks_only ? 0 : rng.uniform_int(3);
      s.cls = 1 + rng.uniform_int(spec.num_classes - 1);
      if (s.kind == 1) {
        s.a = rng.uniform(rmin, rmax);
        s.b = rng.uniform(rmin, rmax);
        s.cy = rng.uniform(s.a, size - 1 - s.a);
        s.cx = rng.uniform(s.b, size - 1 - s.b);
      } else {
        s.a = rng.uniform(rmin, rmax);
        if (s.kind == 2) s.b = s.a * rng.uniform(0.45, 0.70);
        s.cy = rng.uniform(s.a, size - 1 - s.a);
        s.cx = rng.uniform(s.a, size - 1 - s.a);
      }
      std::array<double, 3> col = class_color(s.cls);
      for (double& c : col)
        c = std::min(1.0, std::max(0.0, c + rng.uniform(-0.06, 0.06)));
      shapes.push_back(s);
      colors.push_back(col);
    }

    const double amp = rng.uniform(0.04, 0.10);
    const double fy = rng.uniform(0.15, 0.55), fx = rng.uniform(0.15, 0.55);
    const double py = rng.uniform(0.0, kTwoPi), px = rng.uniform(0.0, kTwoPi);

    SegSample sample;
    sample.image = Tensor4<float>(1, 3, size, size);
    sample.labels = Tensor4<int>(1, 1, size, size);
    std::vector<double> rgb(size_t(size) * size * 3);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double bg = 0.45 + amp * std::sin(fy * y + py) * std::sin(fx * x + px);
        for (int c = 0; c < 3; ++c)
          rgb[(size_t(y) * size + x) * 3 + c] = bg;
      }

    for (int k = 0; k < nshapes; ++k) {
      const ShapeInfo& s = shapes[size_t(k)];
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          const double d = shape_sdf(s, y, x);
          if (d <= 0.0) sample.labels.at(0, 0, y, x) = s.cls;
          const double alpha = std::min(1.0, std::max(0.0, 0.5 - d));
          if (alpha <= 0.0) continue;
          for (int c = 0; c < 3; ++c) {
            double& v = rgb[(size_t(y) * size + x) * 3 + c];
            v = (1.0 - alpha) * v + alpha * colors[size_t(k)][c];
          }
        }
    }

    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double e = 0.03 * rng.normal();
        for (int c = 0; c < 3; ++c) {
          const double v = rgb[(size_t(y) * size + x) * 3 + c] + e;
          sample.image.at(0, c, y, x) = float(std::min(1.0, std::max(0.0, v)));
        }
      }

    if (shapes_out) shapes_out->push_back(shapes);
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<SegSample> gen_synthetic_contours(uint64_t seed, int n,
                                              int num_classes, int size) {
  SynthSpec spec;
  spec.num_classes = num_classes;
  spec.size = size;
  return gen_synthetic_contours(seed, n, spec);
}

SegSample random_scale_augment(const SegSample& sample, double lo, double hi,
                               int out_h, int out_w, Rng& rng) {
  if (!(lo >= 0.5) || !(hi <= 2.0) || lo > hi)
    throw ParameterError("random_scale_augment: scale range must sit inside "
                         "[0.5, 2.0]");
  if (out_h < 1 || out_w < 1)
    throw ParameterError("random_scale_augment: output dims must be positive");
  const int in_h = sample.image.h(), in_w = sample.image.w();
  if (sample.image.n() != 1 || sample.labels.n() != 1 ||
      sample.labels.c() != 1 || sample.labels.h() != in_h ||
      sample.labels.w() != in_w)
    throw DimensionError("random_scale_augment: image " +
                         sample.image.shape_str() + " / labels " +
                         sample.labels.shape_str() + " mismatch");

  const double s = rng.uniform(lo, hi);
  const int sh = std::max(1, int(std::lround(in_h * s)));
  const int sw = std::max(1, int(std::lround(in_w * s)));

  const Tensor4<float> img = bilinear_resize(sample.image, sh, sw);
  Tensor4<int> lab(1, 1, sh, sw);
  for (int y = 0; y < sh; ++y) {
    const int sy = std::min(in_h - 1, int((y + 0.5) * in_h / sh));
    for (int x = 0; x < sw; ++x) {
      const int sx = std::min(in_w - 1, int((x + 0.5) * in_w / sw));
      lab.at(0, 0, y, x) = sample.labels.at(0, 0, sy, sx);
    }
  }

  const int oy = sh > out_h ? rng.uniform_int(sh - out_h + 1) : 0;
  const int ox = sw > out_w ? rng.uniform_int(sw - out_w + 1) : 0;
  SegSample out;
  out.image = Tensor4<float>(1, sample.image.c(), out_h, out_w);
  out.labels = Tensor4<int>(1, 1, out_h, out_w);
  out.labels.fill(255);
  const int ch = std::min(sh, out_h), cw = std::min(sw, out_w);
  for (int c = 0; c < sample.image.c(); ++c)
    for (int y = 0; y < ch; ++y)
      for (int x = 0; x < cw; ++x)
        out.image.at(0, c, y, x) = img.at(0, c, oy + y, ox + x);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x)
      out.labels.at(0, 0, y, x) = lab.at(0, 0, oy + y, ox + x);
  return out;
}

SegSample random_scale_augment(const SegSample& sample, double lo, double hi,
                               Rng& rng) {
  return random_scale_augment(sample, lo, hi, sample.image.h(),
                              sample.image.w(), rng);
}

void save_dataset(const std::string& dir, const std::vector<SegSample>& samples,
                  const std::string& split) {
  namespace fs = std::filesystem;
  if (split.empty() || split.find_first_of(" \t\n/") != std::string::npos)
    throw DataError("save_dataset: bad split name '" + split + "'");
  fs::create_directories(dir + "/images");
  fs::create_directories(dir + "/masks");
  std::ofstream manifest(dir + "/manifest.txt", std::ios::app);
  if (!manifest) throw DataError("save_dataset: cannot open manifest in " + dir);
  for (size_t i = 0; i < samples.size(); ++i) {
    char stem[64];
    std::snprintf(stem, sizeof(stem), "%s_%04zu", split.c_str(), i);
    write_image(dir + "/images/" + stem + ".png",
                tensor_to_image(samples[i].image));
    write_image(dir + "/masks/" + stem + ".png",
                labels_to_mask(samples[i].labels));
    manifest << stem << " " << split << "\n";
  }
}

std::vector<SegSample> load_dataset(const std::string& dir,
                                    const std::string& split) {
  namespace fs = std::filesystem;
  std::ifstream manifest(dir + "/manifest.txt");
  if (!manifest)
    throw DataError("load_dataset: cannot open " + dir + "/manifest.txt");
  std::vector<SegSample> out;
  std::string line;
  while (std::getline(manifest, line)) {
    std::istringstream is(line);
    std::string stem, sp;
    if (!(is >> stem >> sp)) continue;
    if (sp != split) continue;
    auto pick = [&](const std::string& sub) {
      for (const char* ext : {".png", ".pgm"}) {
        const std::string p = dir + "/" + sub + "/" + stem + ext;
        if (fs::exists(p)) return p;
      }
      throw DataError("load_dataset: no image for stem " + stem + " under " +
                      dir + "/" + sub);
    };
    SegSample s;
    s.image = image_to_tensor(read_image(pick("images")));
    s.labels = mask_to_labels(read_image(pick("masks")));
    out.push_back(std::move(s));
  }
  if (out.empty())
    throw DataError("load_dataset: split '" + split + "' is empty in " + dir);
  return out;
}

}  // namespace liconv
