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
// Checkpoint directory: params/<name>.lit4 per parameter plus manifest.txt
// with one "<name> <n> <c> <h> <w> <group> <frozen>" line per parameter in
// store order.
#ifndef LICONV_CHECKPOINT_HPP_
#define LICONV_CHECKPOINT_HPP_

#include <string>

#include "liconv/model.hpp"
#include "liconv/param.hpp"

namespace liconv {

void save_checkpoint(const std::string& dir, const ParamStore<float>& store);

// Rebuilds a store (names, shapes, groups, frozen flags, values) from a
// checkpoint directory. Missing tensors or manifest/tensor shape disagreement
// are data errors.
ParamStore<float> load_checkpoint(const std::string& dir);

// Checks that the store holds exactly the parameters the config enumerates,
// with matching shapes. ConfigError on any mismatch; used to pair loaded
// checkpoints with model configs.
void validate_params_match(const SegmenterConfig& cfg,
                           const ParamStore<float>& store);

}  // namespace liconv

#endif  // LICONV_CHECKPOINT_HPP_
