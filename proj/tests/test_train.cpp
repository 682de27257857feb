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
#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "liconv/checkpoint.hpp"
#include "liconv/data.hpp"
#include "liconv/errors.hpp"
#include "liconv/model.hpp"
#include "liconv/rng.hpp"
#include "liconv/train.hpp"

using namespace liconv;

namespace {

// Small enough that a full two-phase run takes well under a second.
SegmenterConfig tiny_cfg(int num_classes = 3, bool li = true) {
  SegmenterConfig cfg;
  cfg.in_channels = 3;
  cfg.stem_channels = 8;
  cfg.num_classes = num_classes;
  cfg.output_stride = 4;

  LIBottleneckConfig b1;
  b1.in_channels = 8;
  b1.out_channels = 8;
  b1.expansion = 2;
  b1.stride = 2;
  b1.dilation = 1;
  LIBottleneckConfig b2;
  b2.in_channels = 8;
  b2.out_channels = 12;
  b2.expansion = 2;
  b2.stride = 1;
  b2.dilation = 2;
  b2.li_enabled = li;
  cfg.blocks = {b1, b2};

  cfg.head.in_channels = 12;
  cfg.head.branch_channels = 8;
  cfg.head.projection_channels = 8;
  cfg.head.rates = {2, 3, 4};
  cfg.head.li_enabled = li;
  return cfg;
}

ParamStore<float> init_store(const SegmenterConfig& cfg, uint64_t seed) {
  ParamStore<float> store;
  Rng rng(seed);
  init_segmenter_params(cfg, store, rng);
  return store;
}

std::vector<SegSample> tiny_data(uint64_t seed, int n) {
  SynthSpec spec;
  spec.num_classes = 3;
  spec.size = 17;
  spec.min_shapes = 1;
  spec.max_shapes = 3;
  return gen_synthetic_contours(seed, n, spec);
}

bool stores_bitwise_equal(const ParamStore<float>& a,
                          const ParamStore<float>& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const auto& pa = ia->second;
    const auto& pb = ib->second;
    if (pa.value.size() != pb.value.size()) return false;
    if (std::memcmp(pa.value.data(), pb.value.data(),
                    pa.value.size() * sizeof(float)) != 0)
      return false;
  }
  return true;
}

TrainSchedule fast_sched(int main_epochs, int finetune_epochs) {
  TrainSchedule s;
  s.main_epochs = main_epochs;
  s.li_finetune_epochs = finetune_epochs;
  s.batch_size = 4;
  s.seed = 11;
  s.aug_lo = 0.8;
  s.aug_hi = 1.2;
  return s;
}

}  // namespace

TEST_CASE("two identical runs produce bitwise identical curves and weights") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(100, 8);
  const auto val = tiny_data(101, 4);
  const TrainSchedule sched = fast_sched(2, 1);

  ParamStore<float> s1 = init_store(cfg, 7);
  ParamStore<float> s2 = init_store(cfg, 7);
  REQUIRE(stores_bitwise_equal(s1, s2));

  const TrainResult r1 = train_two_phase(cfg, s1, train, val, sched);
  const TrainResult r2 = train_two_phase(cfg, s2, train, val, sched);

  REQUIRE(r1.rows.size() == 3);
  REQUIRE(r2.rows.size() == 3);
  for (size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].loss == r2.rows[i].loss);
    CHECK(((std::isnan(r1.rows[i].val_miou) &&
            std::isnan(r2.rows[i].val_miou)) ||
           r1.rows[i].val_miou == r2.rows[i].val_miou));
  }
  CHECK(r1.final_val_miou == r2.final_val_miou);
  CHECK(stores_bitwise_equal(s1, s2));
}

TEST_CASE("epoch rows carry continuous numbering and phase labels") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(102, 6);
  const auto val = tiny_data(103, 4);

  ParamStore<float> store = init_store(cfg, 3);
  const TrainResult r = train_two_phase(cfg, store, train, val, fast_sched(2, 2));

  REQUIRE(r.rows.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(r.rows[size_t(i)].epoch == i + 1);
    CHECK(r.rows[size_t(i)].phase == (i < 2 ? 1 : 2));
    CHECK(std::isfinite(r.rows[size_t(i)].loss));
    CHECK(r.rows[size_t(i)].lr == doctest::Approx(3e-4));
  }
  CHECK(r.phase1_val_miou == r.rows[1].val_miou);
  CHECK(r.final_val_miou == r.rows[3].val_miou);
  CHECK(r.phase1_val_miou >= 0.0);
  CHECK(r.phase1_val_miou <= 1.0);
}

TEST_CASE("fine-tune phase only moves the li_weights group") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(104, 8);
  const std::vector<SegSample> no_val;

  // Run A stops at the phase boundary; run B continues into phase 2 from the
  // same start and the same draw stream, so its phase 1 is A's whole run.
  ParamStore<float> a = init_store(cfg, 5);
  ParamStore<float> b = init_store(cfg, 5);
  train_two_phase(cfg, a, train, no_val, fast_sched(2, 0));
  train_two_phase(cfg, b, train, no_val, fast_sched(2, 2));

  bool li_moved = false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    REQUIRE(ia->first == ib->first);
    const auto& pa = ia->second;
    const auto& pb = ib->second;
    const bool same = std::memcmp(pa.value.data(), pb.value.data(),
                                  pa.value.size() * sizeof(float)) == 0;
    if (pb.group == ParamGroup::LiWeights) {
      if (!same) li_moved = true;
      CHECK(!pb.frozen);  // phase 2 leaves li unfrozen
      for (size_t i = 0; i < pb.value.size(); ++i) {
        CHECK(pb.value.data()[i] >= 0.0f);
        CHECK(pb.value.data()[i] <= 1.0f);
      }
    } else {
      CHECK(same);
      CHECK(pb.frozen);
    }
  }
  CHECK(li_moved);

  // A never entered phase 2, so nothing in it is frozen.
  for (const auto& [name, p] : a) CHECK(!p.frozen);
}

TEST_CASE("single phase run equals a zero-finetune schedule") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(105, 6);
  const auto val = tiny_data(106, 4);

  ParamStore<float> store = init_store(cfg, 9);
  const TrainResult r = train_two_phase(cfg, store, train, val, fast_sched(3, 0));

  REQUIRE(r.rows.size() == 3);
  for (const EpochRow& row : r.rows) CHECK(row.phase == 1);
  CHECK(r.phase1_val_miou == r.final_val_miou);
  for (const auto& [name, p] : store) CHECK(!p.frozen);
}

TEST_CASE("zero-length main phase scores the initial weights as phase 1") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(107, 6);
  const auto val = tiny_data(108, 4);

  ParamStore<float> store = init_store(cfg, 21);
  ParamStore<float> snapshot = init_store(cfg, 21);
  const double initial = evaluate_miou(cfg, snapshot, val, 4);

  const TrainResult r = train_two_phase(cfg, store, train, val, fast_sched(0, 2));
  CHECK(r.phase1_val_miou == initial);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].phase == 2);
  CHECK(r.rows[1].phase == 2);

  // Everything outside li_weights was frozen from the first step.
  auto is = store.begin();
  auto js = snapshot.begin();
  for (; is != store.end(); ++is, ++js)
    if (is->second.group != ParamGroup::LiWeights)
      CHECK(std::memcmp(is->second.value.data(), js->second.value.data(),
                        is->second.value.size() * sizeof(float)) == 0);
}

TEST_CASE("empty schedule reports the boundary score without training") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(109, 4);
  const auto val = tiny_data(110, 4);

  ParamStore<float> store = init_store(cfg, 2);
  const TrainResult r = train_two_phase(cfg, store, train, val, fast_sched(0, 0));
  CHECK(r.rows.empty());
  CHECK(!std::isnan(r.phase1_val_miou));
  CHECK(r.final_val_miou == r.phase1_val_miou);
}

TEST_CASE("validation cadence controls which rows carry a score") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(111, 6);
  const auto val = tiny_data(112, 4);

  TrainSchedule sched = fast_sched(3, 1);
  sched.eval_every = 0;  // boundaries only
  ParamStore<float> store = init_store(cfg, 4);
  const TrainResult r = train_two_phase(cfg, store, train, val, sched);

  REQUIRE(r.rows.size() == 4);
  CHECK(std::isnan(r.rows[0].val_miou));
  CHECK(std::isnan(r.rows[1].val_miou));
  CHECK(!std::isnan(r.rows[2].val_miou));  // phase 1 end
  CHECK(!std::isnan(r.rows[3].val_miou));  // phase 2 end

  sched.eval_every = 2;
  ParamStore<float> store2 = init_store(cfg, 4);
  const TrainResult r2 = train_two_phase(cfg, store2, train, val, sched);
  CHECK(std::isnan(r2.rows[0].val_miou));
  CHECK(!std::isnan(r2.rows[1].val_miou));
  CHECK(!std::isnan(r2.rows[2].val_miou));  // boundary wins over cadence
  CHECK(!std::isnan(r2.rows[3].val_miou));

  // Without a validation set nothing is scored anywhere.
  ParamStore<float> store3 = init_store(cfg, 4);
  const TrainResult r3 =
      train_two_phase(cfg, store3, train, {}, fast_sched(1, 1));
  CHECK(std::isnan(r3.rows[0].val_miou));
  CHECK(std::isnan(r3.phase1_val_miou));
  CHECK(std::isnan(r3.final_val_miou));
}

TEST_CASE("csv layout: header, one line per epoch, empty cell when unscored") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(113, 4);
  const auto val = tiny_data(114, 4);

  TrainSchedule sched = fast_sched(2, 1);
  sched.eval_every = 0;
  ParamStore<float> store = init_store(cfg, 6);
  const TrainResult r = train_two_phase(cfg, store, train, val, sched);
  const std::string csv = r.csv();

  CHECK(csv.rfind("epoch,phase,loss,lr,miou\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  // First epoch is unscored: its line has an empty trailing cell.
  const size_t line1 = csv.find('\n') + 1;
  const size_t line2 = csv.find('\n', line1);
  const std::string row1 = csv.substr(line1, line2 - line1);
  CHECK(row1.back() == ',');
  CHECK(row1.rfind("1,1,", 0) == 0);
  CHECK(std::count(row1.begin(), row1.end(), ',') == 4);

  // Boundary epochs are scored: a miou cell follows the last comma.
  const std::string last = csv.substr(csv.rfind(',') + 1);
  CHECK(last.size() > 1);
}

TEST_CASE("loss decreases from first to last epoch on most seeds") {
  const SegmenterConfig cfg = tiny_cfg();
  TrainSchedule sched = fast_sched(6, 0);
  sched.augment = false;
  sched.lr = 1e-3;

  int improved = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const auto train = tiny_data(200 + seed, 16);
    ParamStore<float> store = init_store(cfg, seed);
    sched.seed = seed;
    const TrainResult r = train_two_phase(cfg, store, train, {}, sched);
    if (r.rows.back().loss < r.rows.front().loss) ++improved;
  }
  CHECK(improved >= 4);
}

TEST_CASE("schedule and data validation errors") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(115, 4);
  ParamStore<float> store = init_store(cfg, 1);

  CHECK_THROWS_AS(train_two_phase(cfg, store, {}, {}, fast_sched(1, 0)),
                  ConfigError);

  TrainSchedule bad = fast_sched(1, 0);
  bad.batch_size = 0;
  CHECK_THROWS_AS(train_two_phase(cfg, store, train, {}, bad), ConfigError);

  bad = fast_sched(-1, 0);
  CHECK_THROWS_AS(train_two_phase(cfg, store, train, {}, bad), ConfigError);

  bad = fast_sched(1, 0);
  bad.lr = 0.0;
  CHECK_THROWS_AS(train_two_phase(cfg, store, train, {}, bad), ConfigError);

  // A stray sample of the wrong size is rejected up front.
  auto mixed = train;
  mixed.push_back(tiny_data(116, 1).front());
  mixed.back().image = Tensor4<float>(1, 3, 33, 33);
  mixed.back().labels = Tensor4<int>(1, 1, 33, 33);
  CHECK_THROWS_AS(train_two_phase(cfg, store, mixed, {}, fast_sched(1, 0)),
                  DimensionError);

  // Input sizes the stride chain cannot digest are config errors.
  SynthSpec spec;
  spec.num_classes = 3;
  spec.size = 18;
  const auto off_grid = gen_synthetic_contours(117, 2, spec);
  CHECK_THROWS_AS(train_two_phase(cfg, store, off_grid, {}, fast_sched(1, 0)),
                  ConfigError);
}

TEST_CASE("a poisoned parameter raises a numeric error stamped with the epoch") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto train = tiny_data(118, 4);
  ParamStore<float> store = init_store(cfg, 1);
  store.at("stem.w").value.data()[0] = std::nanf("");

  try {
    train_two_phase(cfg, store, train, {}, fast_sched(1, 0));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}

TEST_CASE("evaluate_miou is deterministic and bounded") {
  const SegmenterConfig cfg = tiny_cfg();
  const auto val = tiny_data(119, 6);
  ParamStore<float> store = init_store(cfg, 13);

  const double m1 = evaluate_miou(cfg, store, val, 4);
  const double m2 = evaluate_miou(cfg, store, val, 4);
  CHECK(m1 == m2);
  CHECK(m1 >= 0.0);
  CHECK(m1 <= 1.0);

  // Batch partitioning must not change the pooled counts.
  const double m3 = evaluate_miou(cfg, store, val, 1);
  CHECK(m3 == doctest::Approx(m1).epsilon(1e-12));

  CHECK_THROWS_AS(evaluate_miou(cfg, store, {}, 4), ConfigError);
}

TEST_CASE("checkpoint roundtrip preserves values, groups, and frozen flags") {
  namespace fs = std::filesystem;
  const SegmenterConfig cfg = tiny_cfg();
  ParamStore<float> store = init_store(cfg, 17);
  store.freeze_all_except(ParamGroup::LiWeights);

  const std::string dir =
      (fs::temp_directory_path() / "liconv_ckpt_test").string();
  fs::remove_all(dir);
  save_checkpoint(dir, store);

  ParamStore<float> loaded = load_checkpoint(dir);
  REQUIRE(loaded.size() == store.size());
  auto it = store.begin();
  auto jt = loaded.begin();
  for (; it != store.end(); ++it, ++jt) {
    CHECK(it->first == jt->first);
    CHECK(it->second.group == jt->second.group);
    CHECK(it->second.frozen == jt->second.frozen);
    REQUIRE(it->second.value.size() == jt->second.value.size());
    CHECK(std::memcmp(it->second.value.data(), jt->second.value.data(),
                      it->second.value.size() * sizeof(float)) == 0);
  }
  CHECK_NOTHROW(validate_params_match(cfg, loaded));

  // Training resumes identically from a reloaded store.
  const auto train = tiny_data(120, 4);
  store.unfreeze_all();
  loaded.unfreeze_all();
  const TrainResult ra =
      train_two_phase(cfg, store, train, {}, fast_sched(1, 1));
  const TrainResult rb =
      train_two_phase(cfg, loaded, train, {}, fast_sched(1, 1));
  CHECK(ra.rows[0].loss == rb.rows[0].loss);
  CHECK(ra.rows[1].loss == rb.rows[1].loss);
  CHECK(stores_bitwise_equal(store, loaded));

  fs::remove_all(dir);
  CHECK_THROWS_AS(load_checkpoint(dir), DataError);
}

TEST_CASE("checkpoint loader rejects tampered directories") {
  namespace fs = std::filesystem;
  const SegmenterConfig cfg = tiny_cfg();
  ParamStore<float> store = init_store(cfg, 19);
  const std::string dir =
      (fs::temp_directory_path() / "liconv_ckpt_bad").string();

  fs::remove_all(dir);
  save_checkpoint(dir, store);
  fs::remove(fs::path(dir) / "params" / "stem.w.lit4");
  CHECK_THROWS_AS(load_checkpoint(dir), DataError);

  fs::remove_all(dir);
  save_checkpoint(dir, store);
  {
    std::FILE* f =
        std::fopen((fs::path(dir) / "manifest.txt").string().c_str(), "a");
    REQUIRE(f != nullptr);
    std::fputs("broken line without fields\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_checkpoint(dir), DataError);
  fs::remove_all(dir);
}

TEST_CASE("validate_params_match flags missing, extra, and reshaped params") {
  const SegmenterConfig cfg = tiny_cfg();
  ParamStore<float> store = init_store(cfg, 23);
  CHECK_NOTHROW(validate_params_match(cfg, store));

  ParamStore<float> extra = init_store(cfg, 23);
  extra.add("orphan", Tensor4<float>(1, 1, 1, 1), ParamGroup::Other);
  CHECK_THROWS_AS(validate_params_match(cfg, extra), ConfigError);

  // A store built for a different config is rejected both ways.
  const SegmenterConfig other = tiny_cfg(3, false);
  ParamStore<float> small = init_store(other, 23);
  CHECK_THROWS_AS(validate_params_match(cfg, small), ConfigError);
  CHECK_THROWS_AS(validate_params_match(other, store), ConfigError);
}
