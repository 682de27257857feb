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
#include "liconv/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "liconv/errors.hpp"
#include "liconv/tensor_io.hpp"

namespace liconv {

void save_checkpoint(const std::string& dir, const ParamStore<float>& store) {
  namespace fs = std::filesystem;
  fs::create_directories(dir + "/params");
  std::ofstream manifest(dir + "/manifest.txt", std::ios::trunc);
  if (!manifest)
    throw DataError("save_checkpoint: cannot write manifest in " + dir);
  for (const auto& [name, param] : store) {
    lit4_save(param.value, dir + "/params/" + name + ".lit4");
    const Tensor4<float>& v = param.value;
    manifest << name << " " << v.n() << " " << v.c() << " " << v.h() << " "
             << v.w() << " " << param_group_name(param.group) << " "
             << (param.frozen ? 1 : 0) << "\n";
  }
}

ParamStore<float> load_checkpoint(const std::string& dir) {
  std::ifstream manifest(dir + "/manifest.txt");
  if (!manifest)
    throw DataError("load_checkpoint: cannot open " + dir + "/manifest.txt");
  ParamStore<float> store;
  std::string line;
  int lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string name, group;
    int n, c, h, w, frozen;
    if (!(is >> name >> n >> c >> h >> w >> group >> frozen))
      throw DataError("load_checkpoint: bad manifest line " +
                      std::to_string(lineno) + ": " + line);
    Tensor4<float> value =
        lit4_load<float>(dir + "/params/" + name + ".lit4");
    if (value.n() != n || value.c() != c || value.h() != h || value.w() != w)
      throw DataError("load_checkpoint: " + name + " tensor is " +
                      value.shape_str() + ", manifest says (" +
                      std::to_string(n) + "," + std::to_string(c) + "," +
                      std::to_string(h) + "," + std::to_string(w) + ")");
    store.add(name, std::move(value), param_group_from_name(group));
    store.at(name).frozen = frozen != 0;
  }
  if (store.size() == 0)
    throw DataError("load_checkpoint: empty manifest in " + dir);
  return store;
}

void validate_params_match(const SegmenterConfig& cfg,
                           const ParamStore<float>& store) {
  size_t described = 0;
  enumerate_params(cfg, [&](const ParamDesc& d) {
    ++described;
    if (!store.has(d.name))
      throw ConfigError("checkpoint is missing parameter " + d.name);
    const Param<float>& p = store.at(d.name);
    const Tensor4<float>& v = p.value;
    if (v.n() != d.n || v.c() != d.c || v.h() != d.h || v.w() != d.w)
      throw ConfigError("checkpoint parameter " + d.name + " has shape " +
                        v.shape_str() + ", config wants (" +
                        std::to_string(d.n) + "," + std::to_string(d.c) + "," +
                        std::to_string(d.h) + "," + std::to_string(d.w) + ")");
    if (p.group != d.group)
      throw ConfigError("checkpoint parameter " + d.name +
                        " is in the wrong group");
  });
  if (described != store.size())
    throw ConfigError("checkpoint holds " + std::to_string(store.size()) +
                      " parameters, config describes " +
                      std::to_string(described));
}

}  // namespace liconv
