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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "liconv/rng.hpp"
#include "liconv/tensor.hpp"
#include "liconv/tensor_io.hpp"

using namespace liconv;

TEST_CASE("tensor basics") {
  Tensor4f t(2, 3, 4, 5);
  CHECK(t.size() == 120);
  t.at(1, 2, 3, 4) = 7.0f;
  CHECK(t.data()[119] == 7.0f);  // W fastest, row-major
  t.at(0, 0, 0, 1) = 1.0f;
  CHECK(t.data()[1] == 1.0f);
  CHECK(t.all_finite());
  t.at(0, 1, 0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK(!t.all_finite());
  CHECK_THROWS_AS(Tensor4f(-1, 1, 1, 1), DimensionError);
}

TEST_CASE("lit4 roundtrip is bitwise for float and double") {
  Rng rng(77);
  Tensor4f a(2, 3, 5, 7);
  for (size_t i = 0; i < a.size(); ++i) a.data()[i] = float(rng.uniform(-4, 4));
  std::string path = "lit4_rt_f32.lit4";
  lit4_save(a, path);
  Tensor4f b = lit4_load<float>(path);
  REQUIRE(b.same_shape(a));
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);

  Tensor4d c(1, 1, 3, 3);
  for (size_t i = 0; i < c.size(); ++i) c.data()[i] = rng.normal();
  lit4_save(c, "lit4_rt_f64.lit4");
  Tensor4d d = lit4_load<double>("lit4_rt_f64.lit4");
  CHECK(std::memcmp(c.data(), d.data(), c.size() * sizeof(double)) == 0);
}

TEST_CASE("lit4 header layout golden bytes") {
  Tensor4f t(1, 2, 1, 3);
  float vals[6] = {0.f, 1.f, -2.f, 0.5f, 4.f, 8.f};
  std::copy(vals, vals + 6, t.data());
  std::string b = lit4_encode(t);
  REQUIRE(b.size() == 44 + 6 * 4);
  CHECK(b.substr(0, 4) == "LIT4");
  const unsigned char* p = reinterpret_cast<const unsigned char*>(b.data());
  CHECK(p[4] == 1);  // version 1, little-endian u32
  CHECK(p[5] == 0);
  // dims as u64 LE: n=1, c=2, h=1, w=3
  CHECK(p[8] == 1);
  CHECK(p[16] == 2);
  CHECK(p[24] == 1);
  CHECK(p[32] == 3);
  CHECK(p[40] == 1);  // dtype tag float32
  // payload starts with 0.0f then 1.0f (0x3f800000 LE)
  CHECK(p[44] == 0);
  CHECK(p[48 + 3] == 0x3f);

  std::string d = lit4_encode(Tensor4d(1, 1, 1, 1));
  CHECK(reinterpret_cast<const unsigned char*>(d.data())[40] == 2);
}

TEST_CASE("lit4 refuses bad input") {
  Tensor4d t(1, 1, 2, 2, 1.5);
  lit4_save(t, "lit4_err.lit4");
  // dtype mismatch: no silent cast
  CHECK_THROWS_AS(lit4_load<float>("lit4_err.lit4"), DataError);

  std::string good = lit4_encode(t);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(lit4_decode<double>(bad_magic, "mem"), DataError);
  std::string truncated = good.substr(0, good.size() - 3);
  CHECK_THROWS_AS(lit4_decode<double>(truncated, "mem"), DataError);
  std::string short_header = good.substr(0, 10);
  CHECK_THROWS_AS(lit4_decode<double>(short_header, "mem"), DataError);
  CHECK_THROWS_AS(lit4_load<double>("does_not_exist.lit4"), DataError);
}
