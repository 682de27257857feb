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
#ifndef LICONV_GRADCHECK_HPP_
#define LICONV_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "liconv/errors.hpp"
#include "liconv/param.hpp"
#include "liconv/rng.hpp"

namespace liconv {

struct GradCheckReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  long long coords = 0;
  std::string worst;

  bool pass(double rel_tol) const { return max_rel_err <= rel_tol; }

  std::string to_text() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "gradcheck: coords=%lld max_abs=%.3e max_rel=%.3e worst=%s",
                  coords, max_abs_err, max_rel_err,
                  worst.empty() ? "-" : worst.c_str());
    return buf;
  }
};

// Central-difference check of the analytic gradients already sitting in the
// store. `f` re-evaluates the scalar objective from the store's current
// values; each sampled coordinate is nudged by +/-step. The relative error
// denominator is floored at 1e-3 so coordinates with near-zero gradients are
// judged absolutely instead of dividing by noise. At most
// max_coords_per_param coordinates are sampled per parameter (without
// replacement); frozen parameters are skipped.
template <typename T, typename F>
GradCheckReport finite_diff_gradcheck(ParamStore<T>& store, F&& f, double step,
                                      int max_coords_per_param, Rng& rng) {
  if (!(step > 0)) throw ParameterError("gradcheck: step must be positive");
  GradCheckReport rep;
  for (auto& [name, p] : store) {
    if (p.frozen) continue;
    const size_t n = p.value.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t(0));
    if (n > size_t(max_coords_per_param)) {
      rng.shuffle(idx.begin(), idx.end());
      idx.resize(size_t(max_coords_per_param));
      std::sort(idx.begin(), idx.end());
    }
    for (size_t i : idx) {
      T* val = p.value.data() + i;
      const T saved = *val;
      *val = T(double(saved) + step);
      const double fp = f();
      *val = T(double(saved) - step);
      const double fm = f();
      *val = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericError("gradcheck: non-finite objective at " + name);
      const double numeric = (fp - fm) / (2.0 * step);
      const double analytic = double(p.grad.data()[i]);
      const double abs_err = std::abs(analytic - numeric);
      const double rel_err =
          abs_err / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
      ++rep.coords;
      if (abs_err > rep.max_abs_err) rep.max_abs_err = abs_err;
      if (rel_err > rep.max_rel_err) {
        rep.max_rel_err = rel_err;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s[%zu] analytic=%.6e numeric=%.6e",
                      name.c_str(), i, analytic, numeric);
        rep.worst = buf;
      }
    }
  }
  return rep;
}

}  // namespace liconv

#endif  // LICONV_GRADCHECK_HPP_
