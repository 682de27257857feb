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
#include "liconv/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "liconv/errors.hpp"

namespace liconv {

namespace {

const uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_u32_be(std::vector<uint8_t>* out, uint32_t v) {
  out->push_back(uint8_t(v >> 24));
  out->push_back(uint8_t(v >> 16));
  out->push_back(uint8_t(v >> 8));
  out->push_back(uint8_t(v));
}

uint32_t get_u32_be(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void put_chunk(std::vector<uint8_t>* out, const char type[4],
               const std::vector<uint8_t>& data) {
  put_u32_be(out, uint32_t(data.size()));
  const size_t start = out->size();
  out->insert(out->end(), type, type + 4);
  out->insert(out->end(), data.begin(), data.end());
  const uint32_t crc =
      uint32_t(crc32(0, out->data() + start, uInt(out->size() - start)));
  put_u32_be(out, crc);
}

void validate_image(const ImageU8& img, const char* what) {
  if (img.h < 1 || img.w < 1)
    throw DataError(std::string(what) + ": empty image");
  if (img.channels != 1 && img.channels != 3)
    throw DataError(std::string(what) + ": channels must be 1 or 3, got " +
                    std::to_string(img.channels));
  if (img.pixels.size() != img.size())
    throw DataError(std::string(what) + ": pixel buffer has " +
                    std::to_string(img.pixels.size()) + " bytes, expected " +
                    std::to_string(img.size()));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, const void* data, size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(data), std::streamsize(n));
  if (!out) throw DataError("short write to " + path);
}

}  // namespace

std::vector<uint8_t> encode_png(const ImageU8& img) {
  validate_image(img, "encode_png");
  std::vector<uint8_t> out(kPngSig, kPngSig + 8);

  std::vector<uint8_t> ihdr;
  put_u32_be(&ihdr, uint32_t(img.w));
  put_u32_be(&ihdr, uint32_t(img.h));
  ihdr.push_back(8);                                   // bit depth
  ihdr.push_back(img.channels == 1 ? 0 : 2);           // gray / RGB
  ihdr.push_back(0);                                   // compression
  ihdr.push_back(0);                                   // filter method
  ihdr.push_back(0);                                   // no interlace
  put_chunk(&out, "IHDR", ihdr);

  const size_t row = size_t(img.w) * img.channels;
  std::vector<uint8_t> raw;
  raw.reserve((row + 1) * size_t(img.h));
  for (int y = 0; y < img.h; ++y) {
    raw.push_back(0);  // filter: none
    const uint8_t* src = img.pixels.data() + size_t(y) * row;
    raw.insert(raw.end(), src, src + row);
  }

  uLongf bound = compressBound(uLong(raw.size()));
  std::vector<uint8_t> idat(bound);
  if (compress2(idat.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
    throw DataError("encode_png: deflate failed");
  idat.resize(bound);
  put_chunk(&out, "IDAT", idat);
  put_chunk(&out, "IEND", {});
  return out;
}

ImageU8 decode_png(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSig, 8) != 0)
    throw DataError("decode_png: not a PNG file");

  ImageU8 img;
  std::vector<uint8_t> idat;
  bool saw_ihdr = false, saw_iend = false;
  size_t pos = 8;
  while (pos + 8 <= bytes.size() && !saw_iend) {
    const uint32_t len = get_u32_be(bytes.data() + pos);
    if (pos + 12 + len > bytes.size())
      throw DataError("decode_png: truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const uint8_t* data = bytes.data() + pos + 8;
    const uint32_t want_crc = get_u32_be(data + len);
    const uint32_t got_crc =
        uint32_t(crc32(0, bytes.data() + pos + 4, uInt(len + 4)));
    if (want_crc != got_crc)
      throw DataError("decode_png: chunk CRC mismatch");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw DataError("decode_png: bad IHDR length");
      img.w = int(get_u32_be(data));
      img.h = int(get_u32_be(data + 4));
      const int depth = data[8], color = data[9];
      const int comp = data[10], filter = data[11], interlace = data[12];
      if (img.w < 1 || img.h < 1)
        throw DataError("decode_png: bad dimensions");
      if (depth != 8)
        throw DataError("decode_png: only bit depth 8 is supported");
      if (color == 0)
        img.channels = 1;
      else if (color == 2)
        img.channels = 3;
      else
        throw DataError("decode_png: only grayscale and RGB are supported");
      if (comp != 0 || filter != 0)
        throw DataError("decode_png: bad compression/filter method");
      if (interlace != 0)
        throw DataError("decode_png: interlaced images are not supported");
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      if (!saw_ihdr) throw DataError("decode_png: IDAT before IHDR");
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
    }
    // ancillary chunks are skipped
    pos += 12 + len;
  }
  if (!saw_ihdr || !saw_iend)
    throw DataError("decode_png: missing IHDR or IEND");

  const size_t row = size_t(img.w) * img.channels;
  const size_t raw_size = (row + 1) * size_t(img.h);
  std::vector<uint8_t> raw(raw_size);
  uLongf got = uLongf(raw_size);
  const int zrc = uncompress(raw.data(), &got, idat.data(), uLong(idat.size()));
  if (zrc != Z_OK || got != raw_size)
    throw DataError("decode_png: inflate failed");

  img.pixels.assign(img.size(), 0);
  const int bpp = img.channels;  // bytes per pixel at depth 8
  std::vector<uint8_t> prev(row, 0);
  for (int y = 0; y < img.h; ++y) {
    const uint8_t* src = raw.data() + size_t(y) * (row + 1);
    uint8_t* dst = img.pixels.data() + size_t(y) * row;
    const int f = src[0];
    const uint8_t* line = src + 1;
    for (size_t i = 0; i < row; ++i) {
      const int a = i >= size_t(bpp) ? dst[i - bpp] : 0;
      const int b = prev[i];
      const int c = i >= size_t(bpp) ? prev[i - bpp] : 0;
      int v;
      switch (f) {
        case 0: v = line[i]; break;
        case 1: v = line[i] + a; break;
        case 2: v = line[i] + b; break;
        case 3: v = line[i] + (a + b) / 2; break;
        case 4: v = line[i] + paeth(a, b, c); break;
        default: throw DataError("decode_png: unknown filter type");
      }
      dst[i] = uint8_t(v);
    }
    std::copy(dst, dst + row, prev.begin());
  }
  return img;
}

ImageU8 read_png(const std::string& path) { return decode_png(read_file(path)); }

void write_png(const std::string& path, const ImageU8& img) {
  const std::vector<uint8_t> bytes = encode_png(img);
  write_file(path, bytes.data(), bytes.size());
}

ImageU8 read_pgm(const std::string& path) {
  std::vector<uint8_t> bytes = read_file(path);
  size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos]))
      t.push_back(char(bytes[pos++]));
    return t;
  };
  if (token() != "P5") throw DataError(path + ": not a binary PGM");
  ImageU8 img;
  try {
    img.w = std::stoi(token());
    img.h = std::stoi(token());
    const int maxval = std::stoi(token());
    if (maxval != 255) throw DataError(path + ": PGM maxval must be 255");
  } catch (const std::logic_error&) {
    throw DataError(path + ": malformed PGM header");
  }
  if (img.w < 1 || img.h < 1) throw DataError(path + ": bad PGM dimensions");
  img.channels = 1;
  ++pos;  // single whitespace after maxval
  if (bytes.size() - pos < img.size())
    throw DataError(path + ": truncated PGM payload");
  img.pixels.assign(bytes.begin() + std::ptrdiff_t(pos),
                    bytes.begin() + std::ptrdiff_t(pos + img.size()));
  return img;
}

void write_pgm(const std::string& path, const ImageU8& img) {
  validate_image(img, "write_pgm");
  if (img.channels != 1)
    throw DataError("write_pgm: PGM is single channel");
  char header[64];
  const int n =
      std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", img.w, img.h);
  std::vector<uint8_t> bytes(header, header + n);
  bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
  write_file(path, bytes.data(), bytes.size());
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ImageU8 read_image(const std::string& path) {
  if (ends_with(path, ".png")) return read_png(path);
  if (ends_with(path, ".pgm")) return read_pgm(path);
  throw DataError(path + ": unsupported image extension");
}

void write_image(const std::string& path, const ImageU8& img) {
  if (ends_with(path, ".png")) return write_png(path, img);
  if (ends_with(path, ".pgm")) return write_pgm(path, img);
  throw DataError(path + ": unsupported image extension");
}

Tensor4<float> image_to_tensor(const ImageU8& img) {
  validate_image(img, "image_to_tensor");
  Tensor4<float> t(1, img.channels, img.h, img.w);
  for (int c = 0; c < img.channels; ++c) {
    float* p = t.plane(0, c);
    for (int y = 0; y < img.h; ++y)
      for (int x = 0; x < img.w; ++x)
        p[size_t(y) * img.w + x] = float(img.at(y, x, c)) / 255.0f;
  }
  return t;
}

ImageU8 tensor_to_image(const Tensor4<float>& t) {
  if (t.n() != 1 || (t.c() != 1 && t.c() != 3))
    throw DataError("tensor_to_image: need (1,1,H,W) or (1,3,H,W), got " +
                    t.shape_str());
  ImageU8 img;
  img.h = t.h();
  img.w = t.w();
  img.channels = t.c();
  img.pixels.assign(img.size(), 0);
  for (int c = 0; c < img.channels; ++c) {
    const float* p = t.plane(0, c);
    for (int y = 0; y < img.h; ++y)
      for (int x = 0; x < img.w; ++x) {
        const float v = std::min(1.0f, std::max(0.0f, p[size_t(y) * img.w + x]));
        img.at(y, x, c) = uint8_t(std::lround(v * 255.0f));
      }
  }
  return img;
}

Tensor4<int> mask_to_labels(const ImageU8& img) {
  if (img.channels != 1)
    throw DataError("mask_to_labels: masks must be single channel");
  Tensor4<int> t(1, 1, img.h, img.w);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) t.at(0, 0, y, x) = img.at(y, x, 0);
  return t;
}

ImageU8 labels_to_mask(const Tensor4<int>& labels) {
  if (labels.n() != 1 || labels.c() != 1)
    throw DataError("labels_to_mask: need (1,1,H,W), got " +
                    labels.shape_str());
  ImageU8 img;
  img.h = labels.h();
  img.w = labels.w();
  img.channels = 1;
  img.pixels.assign(img.size(), 0);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      const int v = labels.at(0, 0, y, x);
      if (v < 0 || v > 255)
        throw DataError("labels_to_mask: label " + std::to_string(v) +
                        " does not fit 8 bits");
      img.at(y, x, 0) = uint8_t(v);
    }
  return img;
}

}  // namespace liconv
