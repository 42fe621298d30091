#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>

#include "ecta/corpus.hpp"
#include "ecta/error.hpp"

namespace ecta::config {

// Key=value sections, e.g.
//   [gateway]
//   base_url = "http://localhost:8089"
//   max_retries = 3
// Every key the toolkit consumes is declared here; anything else is rejected.

inline const std::set<std::string>& declared_keys() {
  static const std::set<std::string> keys = {
      "gateway.base_url",      "gateway.endpoint_path",  "gateway.model_id",
      "gateway.timeout_ms",    "gateway.max_retries",    "gateway.backoff_base_ms",
      "gateway.parallelism",   "gateway.mock_table_path", "gateway.temperature",
      "gateway.max_tokens",    "run.seed",               "run.template_dir",
      "run.categories_path",   "run.delimiters",
  };
  return keys;
}

struct RunConfig {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback = "") const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }

  long integer(const std::string& key, long fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      return std::stol(it->second);
    } catch (const std::exception&) {
      throw Error(errc::bad_config, "config key " + key + " is not an integer: " + it->second);
    }
  }

  double real(const std::string& key, double fallback) const {
    const auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw Error(errc::bad_config, "config key " + key + " is not a number: " + it->second);
    }
  }
};

inline RunConfig parse_config(const std::string& text, const std::string& origin = "<config>") {
  RunConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t eol = text.find('\n', start);
    std::string line = text.substr(start, (eol == std::string::npos ? text.size() : eol) - start);
    start = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    line = CategorySet::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(errc::bad_config, origin + ":" + std::to_string(line_no) + ": bad section header");
      section = CategorySet::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(errc::bad_config,
                  origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = CategorySet::trim(line.substr(0, eq));
    std::string value = CategorySet::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    const std::string full = section.empty() ? key : section + "." + key;
    if (!declared_keys().count(full))
      throw Error(errc::bad_config,
                  origin + ":" + std::to_string(line_no) + ": unknown config key \"" + full + "\"");
    cfg.values[full] = value;
  }
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::bad_config, "cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path);
}

}  // namespace ecta::config
