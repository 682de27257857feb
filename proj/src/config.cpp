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
#include "liconv/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "liconv/errors.hpp"

namespace liconv {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key_part(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' &&
        ch != '-')
      return false;
  return true;
}

}  // namespace

KVConfig KVConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

KVConfig KVConfig::from_string(const std::string& text,
                               const std::string& origin) {
  KVConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where =
        origin + ":" + std::to_string(lineno);
    if (t[0] == '[') {
      if (t.back() != ']')
        throw ConfigError("config: unterminated section at " + where);
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_key_part(section))
        throw ConfigError("config: bad section name at " + where);
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value at " + where);
    const std::string key = trim(t.substr(0, eq));
    if (!valid_key_part(key))
      throw ConfigError("config: bad key at " + where);
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.kv_[full] = trim(t.substr(eq + 1));
  }
  return cfg;
}

void KVConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

std::string KVConfig::get_str(const std::string& key,
                              const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string KVConfig::get_str_required(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("config: missing required " + key);
  return it->second;
}

long long KVConfig::get_int(const std::string& key, long long fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " wants an integer, got '" +
                      it->second + "'");
  }
}

double KVConfig::get_double(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " wants a number, got '" +
                      it->second + "'");
  }
}

bool KVConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("config: " + key + " wants a boolean, got '" + v + "'");
}

std::vector<double> KVConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("config: " + key + " wants numbers, got '" + item +
                        "'");
    }
  }
  if (out.empty())
    throw ConfigError("config: " + key + " is an empty list");
  return out;
}

std::string KVConfig::to_text() const {
  std::string out;
  // Bare keys come before any section; the map is already sorted, and a
  // section switch happens at most once per prefix because dots sort low.
  for (const auto& [k, v] : kv_)
    if (k.find('.') == std::string::npos) out += k + " = " + v + "\n";
  std::string section;
  for (const auto& [k, v] : kv_) {
    const size_t dot = k.find('.');
    if (dot == std::string::npos) continue;
    const std::string s = k.substr(0, dot);
    if (s != section) {
      section = s;
      out += "[" + section + "]\n";
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

}  // namespace liconv
