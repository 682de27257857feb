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
// Synthetic contour datasets: overlapping anti-aliased shapes on a textured
// background, with exact per-pixel class masks. Everything is deterministic
// from (seed, parameters) so experiments can be rerun bit for bit.
#ifndef LICONV_DATA_HPP_
#define LICONV_DATA_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "liconv/rng.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

// One image / label pair. image is (1, 3, H, W) in [0, 1], labels is
// (1, 1, H, W) with values in [0, num_classes) or 255 for ignore.
struct SegSample {
  Tensor4<float> image;
  Tensor4<int> labels;
};

struct SynthSpec {
  int num_classes = 4;  // background plus num_classes - 1 shape classes
  int size = 65;
  int min_shapes = 3;
  int max_shapes = 6;
  double min_radius_frac = 0.10;  // of image size
  double max_radius_frac = 0.26;
  bool disks_only = false;        // restrict to disks (analytic-area tests)
};

// Geometry record for one rendered shape, in painter's order. kind 0 is a
// disk (radius a), kind 1 an axis-aligned rectangle (half-extents a, b),
// kind 2 a ring (outer radius a, inner radius b).
struct ShapeInfo {
  int kind = 0;
  int cls = 1;
  double cy = 0.0, cx = 0.0;
  double a = 0.0, b = 0.0;
};

// Generates n samples. Labels are exact point-in-shape tests at pixel
// centers; image rendering anti-aliases the same boundaries with a one pixel
// coverage band, so labels and appearance agree up to that band. When
// shapes_out is given it receives the geometry of every drawn shape.
std::vector<SegSample> gen_synthetic_contours(
    uint64_t seed, int n, const SynthSpec& spec,
    std::vector<std::vector<ShapeInfo>>* shapes_out = nullptr);

std::vector<SegSample> gen_synthetic_contours(uint64_t seed, int n,
                                              int num_classes, int size);

// Scale augmentation: draws s uniform in [lo, hi], resizes the image
// bilinearly and the labels by nearest neighbor to round(H*s) x round(W*s),
// then random-crops or bottom-right pads (image 0, labels 255) to
// (out_h, out_w). Labels are never interpolated.
SegSample random_scale_augment(const SegSample& sample, double lo, double hi,
                               int out_h, int out_w, Rng& rng);

// Same, keeping the sample's own size.
SegSample random_scale_augment(const SegSample& sample, double lo, double hi,
                               Rng& rng);

// On-disk layout under dir: images/<stem>.png, masks/<stem>.png and a
// manifest.txt of "<stem> <split>" lines. save appends to the manifest, so a
// directory can hold several splits; stems are <split>_<index>.
void save_dataset(const std::string& dir, const std::vector<SegSample>& samples,
                  const std::string& split);

std::vector<SegSample> load_dataset(const std::string& dir,
                                    const std::string& split);

}  // namespace liconv

#endif  // LICONV_DATA_HPP_
