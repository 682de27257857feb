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
#ifndef LICONV_PARAM_HPP_
#define LICONV_PARAM_HPP_

#include <map>
#include <string>

#include "liconv/errors.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

// Parameter groups drive the optimizer policy: lateral-inhibition weights are
// clamped to [0,1] and exempt from L2, plain conv weights carry the L2 term,
// and everything else (biases) gets neither.
enum class ParamGroup { LiWeights, ConvWeights, Other };

inline const char* param_group_name(ParamGroup g) {
  switch (g) {
    case ParamGroup::LiWeights: return "li_weights";
    case ParamGroup::ConvWeights: return "conv_weights";
    default: return "other";
  }
}

inline ParamGroup param_group_from_name(const std::string& s) {
  if (s == "li_weights") return ParamGroup::LiWeights;
  if (s == "conv_weights") return ParamGroup::ConvWeights;
  if (s == "other") return ParamGroup::Other;
  throw ParameterError("unknown parameter group: " + s);
}

template <typename T>
struct Param {
  Tensor4<T> value;
  Tensor4<T> grad;
  ParamGroup group = ParamGroup::Other;
  bool frozen = false;
};

// Named trainable parameters. std::map keeps iteration order stable so that
// optimizer sweeps and checkpoint files are deterministic.
template <typename T>
class ParamStore {
 public:
  Param<T>& add(const std::string& name, Tensor4<T> init, ParamGroup group) {
    if (params_.count(name))
      throw ParameterError("duplicate parameter name: " + name);
    Param<T> p;
    p.grad = Tensor4<T>(init.n(), init.c(), init.h(), init.w());
    p.value = std::move(init);
    p.group = group;
    auto [it, ok] = params_.emplace(name, std::move(p));
    (void)ok;
    return it->second;
  }

  bool has(const std::string& name) const { return params_.count(name) != 0; }

  Param<T>& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ParameterError("no such parameter: " + name);
    return it->second;
  }
  const Param<T>& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ParameterError("no such parameter: " + name);
    return it->second;
  }

  void zero_grad() {
    for (auto& [name, p] : params_) p.grad.fill(T(0));
  }

  void unfreeze_all() {
    for (auto& [name, p] : params_) p.frozen = false;
  }

  // Phase-2 schedule: everything outside `keep` stops moving.
  void freeze_all_except(ParamGroup keep) {
    for (auto& [name, p] : params_) p.frozen = (p.group != keep);
  }

  size_t size() const { return params_.size(); }

  size_t scalar_count() const {
    size_t n = 0;
    for (const auto& [name, p] : params_) n += p.value.size();
    return n;
  }
  size_t scalar_count(ParamGroup g) const {
    size_t n = 0;
    for (const auto& [name, p] : params_)
      if (p.group == g) n += p.value.size();
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Param<T>> params_;
};

using ParamStoref = ParamStore<float>;
using ParamStored = ParamStore<double>;

}  // namespace liconv

#endif  // LICONV_PARAM_HPP_
