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
#ifndef LICONV_OPTIM_HPP_
#define LICONV_OPTIM_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "liconv/errors.hpp"
#include "liconv/param.hpp"

namespace liconv {

// Adam with the epsilon added outside the square root:
//   p -= lr * m_hat / (sqrt(v_hat) + eps)
// lr and eps defaults follow the training recipe (0.0003 / 0.01); the betas
// are the usual defaults. Moments are kept in double regardless of T.
template <typename T>
struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-2;
  long long step = 0;
  std::map<std::string, std::vector<double>> m, v;

  void reset() {
    step = 0;
    m.clear();
    v.clear();
  }
};

// One Adam update from the gradients currently in the store. Frozen
// parameters are skipped entirely (values, moments, everything). After the
// update every li_weights-group parameter is clamped back into [0,1].
template <typename T>
void adam_step(ParamStore<T>& store, AdamState<T>& st) {
  if (!(st.lr > 0) || !(st.epsilon >= 0) || st.beta1 < 0 || st.beta1 >= 1 ||
      st.beta2 < 0 || st.beta2 >= 1)
    throw ParameterError("adam_step: bad hyper-parameters");
  st.step += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, double(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, double(st.step));
  for (auto& [name, p] : store) {
    if (p.frozen) continue;
    const size_t n = p.value.size();
    auto& m = st.m[name];
    auto& v = st.v[name];
    if (m.empty()) m.assign(n, 0.0);
    if (v.empty()) v.assign(n, 0.0);
    if (m.size() != n || v.size() != n)
      throw ParameterError("adam_step: moment size mismatch for " + name);
    T* val = p.value.data();
    const T* g = p.grad.data();
    for (size_t i = 0; i < n; ++i) {
      const double gi = double(g[i]);
      m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * gi;
      v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * gi * gi;
      const double mh = m[i] / bc1;
      const double vh = v[i] / bc2;
      val[i] = T(double(val[i]) - st.lr * mh / (std::sqrt(vh) + st.epsilon));
    }
    if (p.group == ParamGroup::LiWeights)
      for (size_t i = 0; i < n; ++i)
        val[i] = std::min(T(1), std::max(T(0), val[i]));
  }
}

}  // namespace liconv

#endif  // LICONV_OPTIM_HPP_
