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
// Line-oriented key=value run configuration with [section] grouping. Keys are
// stored flat as "section.key"; values stay strings until a typed getter
// parses them. Later assignments win, which is how flag overrides layer on
// top of file values.
#ifndef LICONV_CONFIG_HPP_
#define LICONV_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace liconv {

class KVConfig {
 public:
  KVConfig() = default;

  // ConfigError on unreadable files or malformed lines (missing '=',
  // unterminated section header); messages carry the line number.
  static KVConfig from_file(const std::string& path);
  static KVConfig from_string(const std::string& text,
                              const std::string& origin = "<string>");

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  // Typed getters. The fallback forms return it when the key is absent; the
  // required form throws ConfigError. Unparseable values always throw
  // ConfigError naming the key.
  std::string get_str(const std::string& key,
                      const std::string& fallback) const;
  std::string get_str_required(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list, e.g. "0.75,1.0,1.25".
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  size_t size() const { return kv_.size(); }

  // Round-trippable echo: bare keys first, then one [section] block per
  // prefix, keys sorted within each.
  std::string to_text() const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace liconv

#endif  // LICONV_CONFIG_HPP_
