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
#ifndef LICONV_TENSOR_IO_HPP_
#define LICONV_TENSOR_IO_HPP_

// LIT4 container: "LIT4" magic, u32 version, four u64 dims (N,C,H,W),
// u32 dtype tag (1 = float32, 2 = float64), then the payload scalars.
// All fields little-endian. No silent dtype casts on load.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "liconv/errors.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

inline constexpr uint32_t kLit4Version = 1;
template <typename T> struct Lit4Tag;
template <> struct Lit4Tag<float> { static constexpr uint32_t value = 1; };
template <> struct Lit4Tag<double> { static constexpr uint32_t value = 2; };

namespace detail {

inline void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::string& s, uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline uint32_t get_u32(const unsigned char* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}
inline uint64_t get_u64(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline bool host_little_endian() {
  const uint32_t probe = 1;
  unsigned char b;
  std::memcpy(&b, &probe, 1);
  return b == 1;
}

}  // namespace detail

template <typename T>
std::string lit4_encode(const Tensor4<T>& t) {
  std::string out;
  out.reserve(44 + t.size() * sizeof(T));
  out += "LIT4";
  detail::put_u32(out, kLit4Version);
  detail::put_u64(out, uint64_t(t.n()));
  detail::put_u64(out, uint64_t(t.c()));
  detail::put_u64(out, uint64_t(t.h()));
  detail::put_u64(out, uint64_t(t.w()));
  detail::put_u32(out, Lit4Tag<T>::value);
  if (detail::host_little_endian()) {
    out.append(reinterpret_cast<const char*>(t.data()), t.size() * sizeof(T));
  } else {
    for (size_t i = 0; i < t.size(); ++i) {
      unsigned char b[sizeof(T)];
      std::memcpy(b, &t.data()[i], sizeof(T));
      for (size_t j = 0; j < sizeof(T); ++j)
        out.push_back(char(b[sizeof(T) - 1 - j]));
    }
  }
  return out;
}

template <typename T>
Tensor4<T> lit4_decode(const std::string& bytes, const std::string& origin) {
  const size_t header = 4 + 4 + 4 * 8 + 4;
  if (bytes.size() < header)
    throw DataError(origin + ": truncated LIT4 header (" +
                    std::to_string(bytes.size()) + " bytes)");
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, "LIT4", 4) != 0)
    throw DataError(origin + ": bad magic, expected LIT4, got '" +
                    bytes.substr(0, 4) + "'");
  uint32_t version = detail::get_u32(p + 4);
  if (version != kLit4Version)
    throw DataError(origin + ": unsupported LIT4 version " +
                    std::to_string(version));
  uint64_t n = detail::get_u64(p + 8), c = detail::get_u64(p + 16);
  uint64_t h = detail::get_u64(p + 24), w = detail::get_u64(p + 32);
  uint32_t tag = detail::get_u32(p + 40);
  if (tag != Lit4Tag<T>::value)
    throw DataError(origin + ": dtype tag " + std::to_string(tag) +
                    " does not match requested scalar (no silent cast)");
  if (n > 1u << 30 || c > 1u << 30 || h > 1u << 30 || w > 1u << 30)
    throw DataError(origin + ": implausible dims");
  Tensor4<T> t{int(n), int(c), int(h), int(w)};
  size_t payload = t.size() * sizeof(T);
  if (bytes.size() != header + payload)
    throw DataError(origin + ": payload size mismatch, expected " +
                    std::to_string(header + payload) + " bytes, file has " +
                    std::to_string(bytes.size()));
  if (detail::host_little_endian()) {
    std::memcpy(t.data(), bytes.data() + header, payload);
  } else {
    for (size_t i = 0; i < t.size(); ++i) {
      unsigned char b[sizeof(T)];
      for (size_t j = 0; j < sizeof(T); ++j)
        b[j] = (unsigned char)bytes[header + i * sizeof(T) + sizeof(T) - 1 - j];
      std::memcpy(&t.data()[i], b, sizeof(T));
    }
  }
  return t;
}

template <typename T>
void lit4_save(const Tensor4<T>& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for write: " + path);
  std::string bytes = lit4_encode(t);
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw DataError("short write: " + path);
}

template <typename T>
Tensor4<T> lit4_load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return lit4_decode<T>(bytes, path);
}

}  // namespace liconv

#endif  // LICONV_TENSOR_IO_HPP_
