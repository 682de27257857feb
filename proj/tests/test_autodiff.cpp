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
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "liconv/autodiff.hpp"
#include "liconv/gradcheck.hpp"
#include "liconv/loss.hpp"
#include "liconv/optim.hpp"
#include "liconv/param.hpp"
#include "liconv/rng.hpp"

using namespace liconv;

namespace {

template <typename T>
Tensor4<T> random_tensor(Rng& rng, int n, int c, int h, int w, double lo = -1,
                         double hi = 1) {
  Tensor4<T> t(n, c, h, w);
  for (size_t i = 0; i < t.size(); ++i) t.data()[i] = T(rng.uniform(lo, hi));
  return t;
}

}  // namespace

TEST_CASE("param store basics") {
  ParamStored store;
  store.add("a", Tensor4d(1, 1, 2, 2, 1.0), ParamGroup::ConvWeights);
  store.add("b", Tensor4d(1, 3, 1, 1, 0.5), ParamGroup::Other);
  store.add("wl", Tensor4d(4, 1, 1, 1, 0.0), ParamGroup::LiWeights);
  CHECK(store.size() == 3);
  CHECK(store.scalar_count() == 4 + 3 + 4);
  CHECK(store.scalar_count(ParamGroup::LiWeights) == 4);
  CHECK_THROWS_AS(store.add("a", Tensor4d(1, 1, 1, 1), ParamGroup::Other),
                  ParameterError);
  CHECK_THROWS_AS(store.at("missing"), ParameterError);

  store.at("a").grad.fill(2.0);
  store.zero_grad();
  CHECK(store.at("a").grad.at(0, 0, 1, 1) == 0.0);

  store.freeze_all_except(ParamGroup::LiWeights);
  CHECK(store.at("a").frozen);
  CHECK(store.at("b").frozen);
  CHECK_FALSE(store.at("wl").frozen);
  store.unfreeze_all();
  CHECK_FALSE(store.at("a").frozen);

  CHECK(param_group_from_name("li_weights") == ParamGroup::LiWeights);
  CHECK(param_group_from_name(param_group_name(ParamGroup::ConvWeights)) ==
        ParamGroup::ConvWeights);
  CHECK_THROWS_AS(param_group_from_name("nope"), ParameterError);
}

TEST_CASE("cross entropy: uniform logits give ln(C)") {
  for (int C : {2, 4, 7}) {
    Tensor4d logits(2, C, 3, 3, 0.37);  // any constant is uniform after softmax
    Tensor4<int> labels(2, 1, 3, 3, 1);
    auto r = cross_entropy_loss(logits, labels);
    CHECK(r.ce == doctest::Approx(std::log(double(C))).epsilon(1e-12));
    CHECK(r.loss == r.ce);
    CHECK(r.scored == 2 * 3 * 3);
  }
}

TEST_CASE("cross entropy: confident correct logits leave only the margin") {
  Tensor4d logits(1, 3, 2, 2, 0.0);
  Tensor4<int> labels(1, 1, 2, 2);
  labels.at(0, 0, 0, 0) = 0;
  labels.at(0, 0, 0, 1) = 1;
  labels.at(0, 0, 1, 0) = 2;
  labels.at(0, 0, 1, 1) = 0;
  for (int h = 0; h < 2; ++h)
    for (int w = 0; w < 2; ++w)
      logits.at(0, labels.at(0, 0, h, w), h, w) = 20.0;
  auto r = cross_entropy_loss(logits, labels);
  CHECK(r.ce <= 1e-3);
  CHECK(r.ce >= 0.0);
}

TEST_CASE("cross entropy: random 2-class instance against scalar arithmetic") {
  Rng rng(77);
  Tensor4d logits = random_tensor<double>(rng, 1, 2, 2, 2, -2, 2);
  Tensor4<int> labels(1, 1, 2, 2);
  labels.at(0, 0, 0, 0) = 0;
  labels.at(0, 0, 0, 1) = 1;
  labels.at(0, 0, 1, 0) = 1;
  labels.at(0, 0, 1, 1) = 255;  // ignored
  auto r = cross_entropy_loss(logits, labels);

  double want = 0.0;
  for (auto [h, w, l] : {std::tuple{0, 0, 0}, {0, 1, 1}, {1, 0, 1}}) {
    const double a = logits.at(0, 0, h, w), b = logits.at(0, 1, h, w);
    const double z = std::log(std::exp(a) + std::exp(b));
    want += z - (l == 0 ? a : b);
  }
  want /= 3.0;
  CHECK(r.scored == 3);
  CHECK(r.ce == doctest::Approx(want).epsilon(1e-12));
  // ignored pixel contributes no gradient
  CHECK(r.dlogits.at(0, 0, 1, 1) == 0.0);
  CHECK(r.dlogits.at(0, 1, 1, 1) == 0.0);
}

TEST_CASE("cross entropy: dlogits matches finite differences") {
  Rng rng(78);
  Tensor4d logits = random_tensor<double>(rng, 2, 3, 2, 2, -1, 1);
  Tensor4<int> labels(2, 1, 2, 2);
  for (int n = 0; n < 2; ++n)
    for (int h = 0; h < 2; ++h)
      for (int w = 0; w < 2; ++w)
        labels.at(n, 0, h, w) = rng.uniform_int(4) == 0 ? 255
                                                        : rng.uniform_int(3);
  labels.at(0, 0, 0, 0) = 1;  // at least one scored pixel
  auto r = cross_entropy_loss(logits, labels);
  const double h = 1e-6;
  for (size_t i = 0; i < logits.size(); i += 3) {
    const double saved = logits.data()[i];
    logits.data()[i] = saved + h;
    const double fp = cross_entropy_loss(logits, labels).ce;
    logits.data()[i] = saved - h;
    const double fm = cross_entropy_loss(logits, labels).ce;
    logits.data()[i] = saved;
    CHECK(double(r.dlogits.data()[i]) ==
          doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("cross entropy: errors") {
  Tensor4d logits(1, 2, 2, 2, 0.0);
  Tensor4<int> all_ignored(1, 1, 2, 2, 255);
  CHECK_THROWS_AS(cross_entropy_loss(logits, all_ignored), NumericError);
  Tensor4<int> bad(1, 1, 2, 2, 7);
  CHECK_THROWS_AS(cross_entropy_loss(logits, bad), DataError);
  Tensor4<int> wrong_shape(1, 1, 3, 2, 0);
  CHECK_THROWS_AS(cross_entropy_loss(logits, wrong_shape), DimensionError);
}

TEST_CASE("l2 penalty covers non-frozen conv weights only") {
  ParamStored store;
  store.add("conv", Tensor4d(1, 1, 2, 2, 2.0), ParamGroup::ConvWeights);
  store.add("bias", Tensor4d(1, 4, 1, 1, 3.0), ParamGroup::Other);
  store.add("wl", Tensor4d(4, 1, 1, 1, 1.0), ParamGroup::LiWeights);
  const double lambda = 4e-5;
  CHECK(l2_penalty(store, lambda) ==
        doctest::Approx(lambda * 4 * 4.0).epsilon(1e-12));

  add_l2_grads(store, lambda);
  CHECK(store.at("conv").grad.at(0, 0, 0, 0) ==
        doctest::Approx(2 * lambda * 2.0).epsilon(1e-12));
  CHECK(store.at("bias").grad.at(0, 0, 0, 0) == 0.0);
  CHECK(store.at("wl").grad.at(0, 0, 0, 0) == 0.0);

  store.at("conv").frozen = true;
  CHECK(l2_penalty(store, lambda) == 0.0);

  // the loss entry point folds the same term in
  store.at("conv").frozen = false;
  Tensor4d logits(1, 2, 1, 1, 0.0);
  Tensor4<int> labels(1, 1, 1, 1, 0);
  auto r = cross_entropy_loss(logits, labels, 255, lambda, &store);
  CHECK(r.l2 == doctest::Approx(lambda * 16.0).epsilon(1e-12));
  CHECK(r.loss == doctest::Approx(std::log(2.0) + r.l2).epsilon(1e-12));
}

TEST_CASE("tape: gradient of sum over a parameter is all ones") {
  ParamStored store;
  store.add("x", Tensor4d(1, 2, 3, 3, 0.5), ParamGroup::Other);
  Tape<double> tape(&store);
  const int x = tape.param_leaf("x");
  // objective sum(x): seed with ones
  tape.backward(x, Tensor4d(1, 2, 3, 3, 1.0));
  const auto& g = store.at("x").grad;
  for (size_t i = 0; i < g.size(); ++i) REQUIRE(g.data()[i] == 1.0);
}

TEST_CASE("tape: frozen parameters get no gradient and prune the sweep") {
  Rng rng(5);
  ParamStored store;
  store.add("w", random_tensor<double>(rng, 4, 3, 3, 3),
            ParamGroup::ConvWeights);
  store.add("b", Tensor4d(1, 4, 1, 1, 0.1), ParamGroup::Other);
  Tensor4d x = random_tensor<double>(rng, 1, 3, 5, 5);

  store.freeze_all_except(ParamGroup::LiWeights);  // freezes everything here
  Tape<double> tape(&store);
  const int y = tape.conv2d(tape.input(x), "w", "b", ConvSpec{});
  CHECK_FALSE(tape.needs_grad(y));
  tape.backward(y, Tensor4d(1, 4, 5, 5, 1.0));
  for (const auto& [name, p] : store)
    for (size_t i = 0; i < p.grad.size(); ++i) REQUIRE(p.grad.data()[i] == 0.0);

  store.unfreeze_all();
  Tape<double> tape2(&store);
  const int y2 = tape2.conv2d(tape2.input(x), "w", "b", ConvSpec{});
  CHECK(tape2.needs_grad(y2));
  tape2.backward(y2, Tensor4d(1, 4, 5, 5, 1.0));
  double sum = 0;
  for (size_t i = 0; i < store.at("w").grad.size(); ++i)
    sum += std::abs(store.at("w").grad.data()[i]);
  CHECK(sum > 0.0);
  // bias gradient of a sum objective counts output pixels
  CHECK(store.at("b").grad.at(0, 0, 0, 0) == doctest::Approx(25.0));
}

TEST_CASE("tape: shared node accumulates gradient from both consumers") {
  ParamStored store;
  store.add("x", Tensor4d(1, 1, 2, 2, 0.7), ParamGroup::Other);
  Tape<double> tape(&store);
  const int x = tape.param_leaf("x");
  const int y = tape.add(x, x);  // y = 2x
  tape.backward(y, Tensor4d(1, 1, 2, 2, 1.0));
  const auto& g = store.at("x").grad;
  for (size_t i = 0; i < g.size(); ++i) REQUIRE(g.data()[i] == 2.0);
}

TEST_CASE("tape: composite net matches finite differences") {
  // conv -> li -> relu -> depthwise -> pointwise, with a pooled branch and a
  // residual add, then softmax CE. Exercises every op closure on the tape.
  Rng rng(42);
  ParamStored store;
  const int cin = 3, cmid = 4, classes = 3, hs = 6;
  store.add("c1.w", random_tensor<double>(rng, cmid, cin, 3, 3, -0.5, 0.5),
            ParamGroup::ConvWeights);
  store.add("c1.b", random_tensor<double>(rng, 1, cmid, 1, 1, -0.1, 0.1),
            ParamGroup::Other);
  store.add("li.wl", random_tensor<double>(rng, cmid, 1, 1, 1, 0.2, 0.9),
            ParamGroup::LiWeights);
  store.add("dw.w", random_tensor<double>(rng, cmid, 1, 3, 3, -0.5, 0.5),
            ParamGroup::ConvWeights);
  store.add("pw.w", random_tensor<double>(rng, cmid, cmid, 1, 1, -0.5, 0.5),
            ParamGroup::ConvWeights);
  store.add("pool.w", random_tensor<double>(rng, cmid, cmid, 1, 1, -0.5, 0.5),
            ParamGroup::ConvWeights);
  store.add("cls.w",
            random_tensor<double>(rng, classes, 2 * cmid, 1, 1, -0.5, 0.5),
            ParamGroup::ConvWeights);
  store.add("cls.b", Tensor4d(1, classes, 1, 1, 0.0), ParamGroup::Other);

  Tensor4d image = random_tensor<double>(rng, 1, cin, hs, hs, -1, 1);
  Tensor4<int> labels(1, 1, hs, hs);
  for (int h = 0; h < hs; ++h)
    for (int w = 0; w < hs; ++w)
      labels.at(0, 0, h, w) = rng.uniform_int(classes);
  labels.at(0, 0, 0, 0) = 255;

  LIKernelSpec li;
  li.zone_half = 1;
  li.zone_rate = 1;
  li.sigma = 1.0;

  // run(true) also backpropagates; run(false) only returns the loss value
  auto run = [&](bool backprop) -> double {
    Tape<double> tape(&store);
    const int x = tape.input(image);
    const int h1 = tape.conv2d(x, "c1.w", "c1.b", ConvSpec{});
    const int r1 = tape.relu(h1);
    const int inh = tape.li_layer(r1, "li.wl", li);
    const int r2 = tape.relu(inh);
    ConvSpec dw;
    dw.dilation = 2;
    const int d1 = tape.depthwise_conv2d(r2, "dw.w", "", dw);
    ConvSpec pw;
    pw.kernel_half = 0;
    const int p1 = tape.conv2d(d1, "pw.w", "", pw);
    const int res = tape.add(h1, p1);
    const int gap = tape.global_avg_pool(res);
    const int pc = tape.conv2d(gap, "pool.w", "", pw);
    const int up = tape.bilinear(pc, hs, hs);
    const int cat = tape.concat({res, up});
    const int logits = tape.conv2d(cat, "cls.w", "cls.b", pw);
    auto r = cross_entropy_loss(tape.value(logits), labels);
    if (backprop) tape.backward(logits, r.dlogits);
    return r.loss;
  };

  store.zero_grad();
  run(true);
  auto f = [&]() { return run(false); };
  Rng pick(7);
  auto rep = finite_diff_gradcheck(store, f, 1e-6, 64, pick);
  INFO(rep.to_text());
  CHECK(rep.coords > 100);
  CHECK(rep.pass(1e-4));
}

TEST_CASE("tape: li weight gradient alone matches finite differences") {
  Rng rng(43);
  ParamStored store;
  store.add("wl", random_tensor<double>(rng, 3, 1, 1, 1, 0.1, 0.9),
            ParamGroup::LiWeights);
  Tensor4d x = random_tensor<double>(rng, 2, 3, 7, 7, 0, 1);
  Tensor4d proj = random_tensor<double>(rng, 2, 3, 7, 7);
  LIKernelSpec li;
  li.zone_half = 2;
  li.zone_rate = 2;
  li.sigma = 1.3;

  auto run = [&](bool keep) -> double {
    Tape<double> tape(&store);
    const int y = tape.li_layer(tape.input(x), "wl", li);
    double loss = 0;
    const auto& v = tape.value(y);
    for (size_t i = 0; i < v.size(); ++i)
      loss += double(v.data()[i]) * double(proj.data()[i]);
    if (keep) tape.backward(y, proj);
    return loss;
  };
  store.zero_grad();
  run(true);
  auto f = [&]() { return run(false); };
  Rng pick(9);
  auto rep = finite_diff_gradcheck(store, f, 1e-6, 64, pick);
  INFO(rep.to_text());
  CHECK(rep.pass(1e-6));
}

TEST_CASE("tape: argument validation") {
  ParamStored store;
  store.add("x", Tensor4d(1, 1, 2, 2, 1.0), ParamGroup::Other);
  store.add("wl", Tensor4d(3, 1, 1, 1, 0.0), ParamGroup::LiWeights);
  Tape<double> tape(&store);
  const int x = tape.param_leaf("x");
  CHECK_THROWS_AS(tape.li_layer(x, "wl", LIKernelSpec{}), DimensionError);
  CHECK_THROWS_AS(tape.add(x, tape.input(Tensor4d(1, 1, 3, 2))),
                  DimensionError);
  CHECK_THROWS_AS(tape.concat({}), DimensionError);
  CHECK_THROWS_AS(tape.backward(99, Tensor4d(1, 1, 1, 1)), ParameterError);
  CHECK_THROWS_AS(tape.backward(x, Tensor4d(1, 1, 1, 1)), DimensionError);
  CHECK_THROWS_AS(tape.conv2d(x, "missing", "", ConvSpec{}), ParameterError);
}

TEST_CASE("adam: zero gradient leaves parameters untouched") {
  ParamStored store;
  store.add("w", Tensor4d(2, 2, 1, 1, 0.3), ParamGroup::ConvWeights);
  AdamState<double> st;
  adam_step(store, st);
  CHECK(st.step == 1);
  for (size_t i = 0; i < store.at("w").value.size(); ++i)
    CHECK(store.at("w").value.data()[i] == 0.3);
}

TEST_CASE("adam: first step with unit gradient") {
  // m_hat = v_hat = 1 after bias correction, so the step is lr/(1+eps).
  ParamStored store;
  store.add("w", Tensor4d(1, 1, 1, 1, 0.0), ParamGroup::ConvWeights);
  store.at("w").grad.fill(1.0);
  AdamState<double> st;
  adam_step(store, st);
  const double got = store.at("w").value.at(0, 0, 0, 0);
  CHECK(got == doctest::Approx(-0.0003 / 1.01).epsilon(1e-12));
  CHECK(got == doctest::Approx(-2.9703e-4).epsilon(1e-4));
}

TEST_CASE("adam: li weights are clamped into [0,1] after the step") {
  ParamStored store;
  store.add("wl", Tensor4d(2, 1, 1, 1, 0.0), ParamGroup::LiWeights);
  store.at("wl").value.at(0, 0, 0, 0) = 0.00001;
  store.at("wl").value.at(1, 0, 0, 0) = 0.99999;
  store.at("wl").grad.at(0, 0, 0, 0) = 1.0;   // pushes below 0
  store.at("wl").grad.at(1, 0, 0, 0) = -1.0;  // pushes above 1
  AdamState<double> st;
  st.lr = 0.1;
  adam_step(store, st);
  CHECK(store.at("wl").value.at(0, 0, 0, 0) == 0.0);
  CHECK(store.at("wl").value.at(1, 0, 0, 0) == 1.0);
}

TEST_CASE("adam: frozen parameters keep value and moments") {
  ParamStored store;
  store.add("a", Tensor4d(1, 1, 1, 1, 0.5), ParamGroup::ConvWeights);
  store.add("z", Tensor4d(1, 1, 1, 1, 0.5), ParamGroup::ConvWeights);
  store.at("a").frozen = true;
  store.at("a").grad.fill(1.0);
  store.at("z").grad.fill(1.0);
  AdamState<double> st;
  adam_step(store, st);
  CHECK(store.at("a").value.at(0, 0, 0, 0) == 0.5);
  CHECK(st.m.count("a") == 0);
  CHECK(st.m.count("z") == 1);
  CHECK(store.at("z").value.at(0, 0, 0, 0) != 0.5);
}

TEST_CASE("adam: trajectory is deterministic and reset clears state") {
  auto run = [](int steps) {
    ParamStored store;
    store.add("w", Tensor4d(2, 3, 1, 1, 0.2), ParamGroup::ConvWeights);
    AdamState<double> st;
    Rng rng(11);
    for (int s = 0; s < steps; ++s) {
      for (size_t i = 0; i < store.at("w").grad.size(); ++i)
        store.at("w").grad.data()[i] = rng.uniform(-1, 1);
      adam_step(store, st);
    }
    return store.at("w").value;
  };
  Tensor4d a = run(10), b = run(10);
  REQUIRE(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);

  AdamState<double> st;
  ParamStored store;
  store.add("w", Tensor4d(1, 1, 1, 1, 0.0), ParamGroup::ConvWeights);
  store.at("w").grad.fill(1.0);
  adam_step(store, st);
  st.reset();
  CHECK(st.step == 0);
  CHECK(st.m.empty());
  store.at("w").value.fill(0.0);
  store.at("w").grad.fill(1.0);
  adam_step(store, st);
  CHECK(store.at("w").value.at(0, 0, 0, 0) ==
        doctest::Approx(-0.0003 / 1.01).epsilon(1e-12));
}

TEST_CASE("adam: bad hyper-parameters are rejected") {
  ParamStored store;
  store.add("w", Tensor4d(1, 1, 1, 1, 0.0), ParamGroup::ConvWeights);
  AdamState<double> st;
  st.lr = 0.0;
  CHECK_THROWS_AS(adam_step(store, st), ParameterError);
  st.lr = 1e-3;
  st.beta1 = 1.0;
  CHECK_THROWS_AS(adam_step(store, st), ParameterError);
}

TEST_CASE("gradcheck: quadratic derivative is recovered") {
  ParamStored store;
  store.add("theta", Tensor4d(1, 1, 1, 1, 3.0), ParamGroup::Other);
  store.at("theta").grad.fill(6.0);  // analytic d(theta^2) at theta=3
  auto f = [&]() {
    const double t = store.at("theta").value.at(0, 0, 0, 0);
    return t * t;
  };
  Rng rng(1);
  auto rep = finite_diff_gradcheck(store, f, 1e-6, 64, rng);
  CHECK(rep.coords == 1);
  CHECK(rep.max_abs_err <= 1e-8);
}

TEST_CASE("gradcheck: subsampling caps coordinates per parameter") {
  ParamStored store;
  store.add("big", Tensor4d(1, 1, 10, 100, 1.0), ParamGroup::Other);
  store.add("frozen", Tensor4d(1, 1, 10, 10, 1.0), ParamGroup::Other);
  store.at("frozen").frozen = true;
  auto f = [&]() { return 0.0; };
  Rng rng(2);
  auto rep = finite_diff_gradcheck(store, f, 1e-6, 64, rng);
  CHECK(rep.coords == 64);
  CHECK_THROWS_AS(finite_diff_gradcheck(store, f, 0.0, 64, rng),
                  ParameterError);
}
