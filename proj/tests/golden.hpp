#pragma once

// Frozen values from the first audited run live in golden/values.txt as
// "name value" lines. A missing name fails the test unless
// KOLMO_UPDATE_GOLDEN=1, in which case it is appended.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef KOLMO_GOLDEN_DIR
#error "KOLMO_GOLDEN_DIR must be defined"
#endif

namespace golden {

inline std::string path(const std::string& file) { return std::string(KOLMO_GOLDEN_DIR) + "/" + file; }

inline std::map<std::string, std::string> load() {
  std::map<std::string, std::string> out;
  std::ifstream in(path("values.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) continue;
    out[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return out;
}

inline bool updating() {
  const char* v = std::getenv("KOLMO_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

inline void check(const std::string& name, const std::string& value) {
  const auto values = load();
  const auto it = values.find(name);
  if (it == values.end()) {
    if (updating()) {
      std::ofstream(path("values.txt"), std::ios::app) << name << ' ' << value << '\n';
      return;
    }
    FAIL("no golden value for '" << name << "' (computed " << value << ")");
    return;
  }
  INFO("golden value " << name);
  CHECK(it->second == value);
}

inline void check_u64(const std::string& name, std::uint64_t value) { check(name, std::to_string(value)); }

// Whole-file goldens (table dumps and the like).
inline void check_file(const std::string& file, const std::string& content) {
  std::ifstream in(path(file), std::ios::binary);
  if (!in) {
    if (updating()) {
      std::ofstream(path(file), std::ios::binary) << content;
      return;
    }
    FAIL("no golden file '" << file << "'");
    return;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  INFO("golden file " << file);
  CHECK(ss.str() == content);
}

}  // namespace golden
