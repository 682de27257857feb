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
#ifndef LICONV_AUTODIFF_HPP_
#define LICONV_AUTODIFF_HPP_

#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "liconv/conv.hpp"
#include "liconv/errors.hpp"
#include "liconv/li.hpp"
#include "liconv/ops.hpp"
#include "liconv/param.hpp"
#include "liconv/tensor.hpp"

namespace liconv {

// Reverse-mode tape over the op set the models use. Values are computed
// eagerly at record time; backward() walks the nodes once in reverse and
// accumulates parameter gradients straight into the ParamStore. A node only
// receives a gradient buffer if something trainable sits beneath it, so a
// fully frozen prefix of the network costs nothing in the backward pass.
// Tapes are single-use: build, forward, backward, discard.
template <typename T>
class Tape {
 public:
  explicit Tape(ParamStore<T>* store) : store_(store) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  int input(Tensor4<T> v) {
    return push(std::move(v), false, nullptr);
  }

  // A parameter as a first-class node; its gradient lands in the store.
  int param_leaf(const std::string& name) {
    Param<T>& p = store_->at(name);
    const int id = push(p.value, !p.frozen, nullptr);
    node(id).back = [this, id, name]() {
      Param<T>& p = store_->at(name);
      if (!p.frozen) add_inplace(p.grad, node(id).grad);
    };
    return id;
  }

  int conv2d(int x, const std::string& w_name, const std::string& b_name,
             const ConvSpec& sp) {
    Param<T>& w = store_->at(w_name);
    const Tensor4<T>* bias = &empty_;
    bool b_live = false;
    if (!b_name.empty()) {
      Param<T>& b = store_->at(b_name);
      bias = &b.value;
      b_live = !b.frozen;
    }
    Tensor4<T> y = conv2d_dilated(node(x).value, w.value, *bias, sp);
    const bool needs = node(x).needs_grad || !w.frozen || b_live;
    const int id = push(std::move(y), needs, nullptr);
    node(id).back = [this, id, x, w_name, b_name, sp]() {
      Param<T>& w = store_->at(w_name);
      Tensor4<T>* gb = nullptr;
      if (!b_name.empty()) {
        Param<T>& b = store_->at(b_name);
        if (!b.frozen) gb = &b.grad;
      }
      conv2d_dilated_backward(node(x).value, w.value, sp, node(id).grad,
                              node(x).needs_grad ? &grad_of(x) : nullptr,
                              w.frozen ? nullptr : &w.grad, gb);
    };
    return id;
  }

  int depthwise_conv2d(int x, const std::string& w_name,
                       const std::string& b_name, const ConvSpec& sp) {
    Param<T>& w = store_->at(w_name);
    const Tensor4<T>* bias = &empty_;
    bool b_live = false;
    if (!b_name.empty()) {
      Param<T>& b = store_->at(b_name);
      bias = &b.value;
      b_live = !b.frozen;
    }
    Tensor4<T> y = liconv::depthwise_conv2d(node(x).value, w.value, *bias, sp);
    const bool needs = node(x).needs_grad || !w.frozen || b_live;
    const int id = push(std::move(y), needs, nullptr);
    node(id).back = [this, id, x, w_name, b_name, sp]() {
      Param<T>& w = store_->at(w_name);
      Tensor4<T>* gb = nullptr;
      if (!b_name.empty()) {
        Param<T>& b = store_->at(b_name);
        if (!b.frozen) gb = &b.grad;
      }
      depthwise_conv2d_backward(node(x).value, w.value, sp, node(id).grad,
                                node(x).needs_grad ? &grad_of(x) : nullptr,
                                w.frozen ? nullptr : &w.grad, gb);
    };
    return id;
  }

  int li_layer(int x, const std::string& wl_name, const LIKernelSpec& sp) {
    Param<T>& wl = store_->at(wl_name);
    if (wl.value.size() != size_t(node(x).value.c()))
      throw DimensionError("li_layer: w_l has " +
                           std::to_string(wl.value.size()) + " entries for " +
                           std::to_string(node(x).value.c()) + " channels");
    std::vector<T> w(wl.value.data(), wl.value.data() + wl.value.size());
    Tensor4<T> y = li_layer_forward(node(x).value, w, sp);
    const bool needs = node(x).needs_grad || !wl.frozen;
    const int id = push(std::move(y), needs, nullptr);
    node(id).back = [this, id, x, wl_name, sp]() {
      Param<T>& wl = store_->at(wl_name);
      std::vector<T> w(wl.value.data(), wl.value.data() + wl.value.size());
      std::vector<T> gw(w.size(), T(0));
      li_layer_backward(node(x).value, w, sp, node(id).grad,
                        node(x).needs_grad ? &grad_of(x) : nullptr,
                        wl.frozen ? nullptr : &gw);
      if (!wl.frozen)
        for (size_t i = 0; i < gw.size(); ++i) wl.grad.data()[i] += gw[i];
    };
    return id;
  }

  int relu(int x) {
    Tensor4<T> y = liconv::relu(node(x).value);
    const int id = push(std::move(y), node(x).needs_grad, nullptr);
    node(id).back = [this, id, x]() {
      if (node(x).needs_grad)
        relu_backward(node(x).value, node(id).grad, &grad_of(x));
    };
    return id;
  }

  int add(int a, int b) {
    if (!node(a).value.same_shape(node(b).value))
      throw DimensionError("add: shape mismatch " + node(a).value.shape_str() +
                           " vs " + node(b).value.shape_str());
    Tensor4<T> y = node(a).value;
    add_inplace(y, node(b).value);
    const bool needs = node(a).needs_grad || node(b).needs_grad;
    const int id = push(std::move(y), needs, nullptr);
    node(id).back = [this, id, a, b]() {
      if (node(a).needs_grad) add_inplace(grad_of(a), node(id).grad);
      if (node(b).needs_grad) add_inplace(grad_of(b), node(id).grad);
    };
    return id;
  }

  int global_avg_pool(int x) {
    Tensor4<T> y = liconv::global_avg_pool(node(x).value);
    const int id = push(std::move(y), node(x).needs_grad, nullptr);
    node(id).back = [this, id, x]() {
      if (node(x).needs_grad)
        global_avg_pool_backward(node(x).value, node(id).grad, &grad_of(x));
    };
    return id;
  }

  int bilinear(int x, int out_h, int out_w) {
    Tensor4<T> y = bilinear_resize(node(x).value, out_h, out_w);
    const int id = push(std::move(y), node(x).needs_grad, nullptr);
    node(id).back = [this, id, x]() {
      if (node(x).needs_grad)
        bilinear_resize_backward(node(x).value, node(id).grad, &grad_of(x));
    };
    return id;
  }

  int concat(const std::vector<int>& xs) {
    if (xs.empty()) throw DimensionError("concat: no inputs");
    std::vector<const Tensor4<T>*> vs;
    bool needs = false;
    for (int x : xs) {
      vs.push_back(&node(x).value);
      needs = needs || node(x).needs_grad;
    }
    Tensor4<T> y = concat_channels(vs);
    const int id = push(std::move(y), needs, nullptr);
    node(id).back = [this, id, xs]() {
      const Tensor4<T>& g = node(id).grad;
      const size_t hw = size_t(g.h()) * g.w();
      int co = 0;
      for (int x : xs) {
        const int cc = node(x).value.c();
        if (node(x).needs_grad) {
          Tensor4<T>& gx = grad_of(x);
          for (int n = 0; n < g.n(); ++n)
            for (int c = 0; c < cc; ++c) {
              const T* src = g.plane(n, co + c);
              T* dst = gx.plane(n, c);
              for (size_t i = 0; i < hw; ++i) dst[i] += src[i];
            }
        }
        co += cc;
      }
    };
    return id;
  }

  const Tensor4<T>& value(int id) const { return nodes_[size_t(id)].value; }
  bool needs_grad(int id) const { return nodes_[size_t(id)].needs_grad; }
  size_t node_count() const { return nodes_.size(); }

  // Seeds d(objective)/d(node `seed`) and sweeps the tape once in reverse.
  // Parameter gradients accumulate into the store; call store->zero_grad()
  // between optimizer steps, not between tapes, to sum over micro-batches.
  void backward(int seed, const Tensor4<T>& seed_grad) {
    if (seed < 0 || size_t(seed) >= nodes_.size())
      throw ParameterError("backward: bad node id");
    if (!seed_grad.same_shape(node(seed).value))
      throw DimensionError("backward: seed gradient shape " +
                           seed_grad.shape_str() + " does not match node " +
                           node(seed).value.shape_str());
    if (!node(seed).needs_grad) return;
    add_inplace(grad_of(seed), seed_grad);
    for (int i = seed; i >= 0; --i) {
      Node& n = nodes_[size_t(i)];
      if (n.needs_grad && !n.grad.empty() && n.back) n.back();
    }
  }

 private:
  struct Node {
    Tensor4<T> value;
    Tensor4<T> grad;
    bool needs_grad = false;
    std::function<void()> back;
  };

  Node& node(int id) { return nodes_[size_t(id)]; }
  const Node& node(int id) const { return nodes_[size_t(id)]; }

  Tensor4<T>& grad_of(int id) {
    Node& n = node(id);
    if (n.grad.empty())
      n.grad = Tensor4<T>(n.value.n(), n.value.c(), n.value.h(), n.value.w());
    return n.grad;
  }

  int push(Tensor4<T> value, bool needs, std::function<void()> back) {
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
  }

  std::deque<Node> nodes_;
  ParamStore<T>* store_;
  Tensor4<T> empty_;
};

}  // namespace liconv

#endif  // LICONV_AUTODIFF_HPP_
