// Copyright 2026 The Stance Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stance {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Key-value configuration with INI-style sections. Keys are dotted:
// `[planner] particles = 16` becomes `planner.particles`. Every lookup
// records the resolved value (override or default), so after loading, the
// full effective configuration can be serialized and hashed, and file keys
// nothing ever asked for can be flagged as unknown.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path) {
    Config cfg;
    cfg.merge_file(path);
    return cfg;
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string s = trim(strip_comment(line));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          throw ConfigError(path + ":" + std::to_string(line_no) +
                            ": unterminated section header");
        }
        section = trim(s.substr(1, s.size() - 2));
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected key = value");
      }
      const std::string key = trim(s.substr(0, eq));
      const std::string value = trim(s.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
      }
      const std::string full = section.empty() ? key : section + "." + key;
      entries_[full] = value;
      file_keys_.insert(full);
    }
  }

  // Command-line override; wins over file entries.
  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  double get_double(const std::string& key, double fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      resolved_[key] = format_double(fallback);
      return fallback;
    }
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      resolved_[key] = format_double(v);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": not a number: " + it->second);
    }
  }

  int get_int(const std::string& key, int fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      resolved_[key] = std::to_string(fallback);
      return fallback;
    }
    try {
      size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      resolved_[key] = std::to_string(v);
      return static_cast<int>(v);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key +
                        ": not an integer: " + it->second);
    }
  }

  uint64_t get_u64(const std::string& key, uint64_t fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      resolved_[key] = std::to_string(fallback);
      return fallback;
    }
    try {
      size_t pos = 0;
      const unsigned long long v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      resolved_[key] = std::to_string(v);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key +
                        ": not an integer: " + it->second);
    }
  }

  bool get_bool(const std::string& key, bool fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      resolved_[key] = fallback ? "true" : "false";
      return fallback;
    }
    if (it->second == "true" || it->second == "1") {
      resolved_[key] = "true";
      return true;
    }
    if (it->second == "false" || it->second == "0") {
      resolved_[key] = "false";
      return false;
    }
    throw ConfigError("config key " + key + ": not a boolean: " + it->second);
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    const auto it = entries_.find(key);
    const std::string v = it == entries_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
  }

  // File keys that were never queried by any loader.
  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> unknown;
    for (const std::string& key : file_keys_) {
      if (resolved_.count(key) == 0) unknown.push_back(key);
    }
    return unknown;
  }

  // Effective configuration as INI text, grouped by section, sorted.
  std::string resolved_ini() const {
    std::ostringstream out;
    std::string section;
    bool first = true;
    for (const auto& [key, value] : resolved_) {
      const auto dot = key.rfind('.');
      const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
      const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
      if (sec != section || first) {
        if (!first) out << '\n';
        out << '[' << sec << "]\n";
        section = sec;
        first = false;
      }
      out << name << " = " << value << '\n';
    }
    return out.str();
  }

  // FNV-1a over the sorted resolved entries. Keys that only steer execution
  // (worker counts) are excluded so they cannot change result identity.
  std::string hash_hex() const {
    uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](const std::string& s) {
      for (const unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
      }
    };
    for (const auto& [key, value] : resolved_) {
      if (key == "planner.threads" || key == "experiment.threads") continue;
      mix(key);
      mix("=");
      mix(value);
      mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
  }

  // Shortest decimal form that parses back to the same double.
  static std::string format_double(double v) {
    char buf[32];
    if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
      std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
      return std::string(buf);
    }
    for (int precision = 1; precision <= 17; ++precision) {
      std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
      if (std::strtod(buf, nullptr) == v) break;
    }
    return std::string(buf);
  }

 private:
  static std::string strip_comment(const std::string& s) {
    const auto pos = s.find_first_of("#;");
    return pos == std::string::npos ? s : s.substr(0, pos);
  }

  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  std::map<std::string, std::string> entries_;
  std::set<std::string> file_keys_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace stance
