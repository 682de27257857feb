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
#ifndef LICONV_IMAGE_IO_HPP_
#define LICONV_IMAGE_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "liconv/tensor.hpp"

namespace liconv {

// Interleaved row-major 8-bit image; channels is 1 (gray) or 3 (RGB).
struct ImageU8 {
  int h = 0, w = 0, channels = 0;
  std::vector<uint8_t> pixels;

  size_t size() const { return size_t(h) * w * channels; }
  uint8_t& at(int y, int x, int c) {
    return pixels[(size_t(y) * w + x) * channels + c];
  }
  uint8_t at(int y, int x, int c) const {
    return pixels[(size_t(y) * w + x) * channels + c];
  }
};

// PNG support covers what this project writes plus the common 8-bit cases:
// bit depth 8, grayscale or RGB, no interlacing; all five scanline filters
// are honored on read, writes use filter 0. Chunk CRCs are verified.
ImageU8 read_png(const std::string& path);
void write_png(const std::string& path, const ImageU8& img);
std::vector<uint8_t> encode_png(const ImageU8& img);
ImageU8 decode_png(const std::vector<uint8_t>& bytes);

// Binary PGM (P5), max value 255, single channel.
ImageU8 read_pgm(const std::string& path);
void write_pgm(const std::string& path, const ImageU8& img);

// Dispatch on file extension: .png or .pgm.
ImageU8 read_image(const std::string& path);
void write_image(const std::string& path, const ImageU8& img);

// Bridges between images and tensors. Images map to (1,C,H,W) in [0,1];
// masks carry class ids (and 255 for ignore) without scaling.
Tensor4<float> image_to_tensor(const ImageU8& img);
ImageU8 tensor_to_image(const Tensor4<float>& t);
Tensor4<int> mask_to_labels(const ImageU8& img);
ImageU8 labels_to_mask(const Tensor4<int>& labels);

}  // namespace liconv

#endif  // LICONV_IMAGE_IO_HPP_
