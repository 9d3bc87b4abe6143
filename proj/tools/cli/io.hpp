#pragma once

// Flat `key = value` files (config and manifest), CSV output and the
// resolution of command parameters: flags > config file > built-in defaults.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "qlidar/error.hpp"

namespace qlidar::cli {

using KeyValues = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_key(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

// Blank lines and lines starting with '#' are ignored. Config files fold
// '_' into '-' so keys match the long option names.
inline KeyValues parse_key_values(std::istream& in, const std::string& source, bool option_keys = false) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = option_keys ? normalize_key(trim(t.substr(0, eq))) : trim(t.substr(0, eq));
    if (key.empty()) throw InvalidParameter(source + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

inline KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  return parse_key_values(in, path.string(), true);
}

// 12 significant digits, '.' decimal separator.
inline std::string num(double v) { return fmt::format("{:.12g}", v); }

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed for " + path_.string());
  }

  void row(std::initializer_list<double> values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(num(v));
    row(cells);
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

// Parameter lookup with fixed precedence. Every key a command accepts has an
// entry in `defaults` (possibly empty, meaning "unset"); config keys outside
// that set are rejected.
class ParamSet {
 public:
  ParamSet(KeyValues flags, KeyValues config, KeyValues defaults)
      : flags_(std::move(flags)), config_(std::move(config)), defaults_(std::move(defaults)) {
    for (const auto& [k, v] : config_) {
      if (!defaults_.contains(k)) throw InvalidParameter("unknown config key '" + k + "'");
    }
  }

  std::string text(const std::string& key) const {
    if (auto it = flags_.find(key); it != flags_.end()) return it->second;
    if (auto it = config_.find(key); it != config_.end()) return it->second;
    if (auto it = defaults_.find(key); it != defaults_.end()) return it->second;
    throw InvalidParameter("no parameter named '" + key + "'");
  }

  bool is_set(const std::string& key) const { return !text(key).empty(); }

  double real(const std::string& key) const {
    const std::string v = text(key);
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
      throw InvalidParameter("invalid value for --" + key + ": '" + v + "'");
    }
    return out;
  }

  std::uint64_t u64(const std::string& key) const {
    const std::string v = text(key);
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
      throw InvalidParameter("invalid value for --" + key + ": '" + v + "' (expected a non-negative integer)");
    }
    return out;
  }

  bool flag(const std::string& key) const {
    const std::string v = text(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
    throw InvalidParameter("invalid value for --" + key + ": '" + v + "' (expected true/false)");
  }

  // Fully resolved parameter set, sorted by key.
  KeyValues resolved() const {
    KeyValues all;
    for (const auto& [k, v] : defaults_) all[k] = text(k);
    return all;
  }

 private:
  KeyValues flags_;
  KeyValues config_;
  KeyValues defaults_;
};

class RunManifest {
 public:
  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries_.emplace_back(key, value);
  }
  void set(const std::string& key, double value) { set(key, num(value)); }
  void add_output(const std::filesystem::path& p) { outputs_.push_back(p.filename().string()); }
  const std::vector<std::string>& outputs() const { return outputs_; }

  std::string render() const {
    std::ostringstream s;
    for (const auto& [k, v] : entries_) s << k << " = " << v << '\n';
    s << "outputs = ";
    for (std::size_t i = 0; i < outputs_.size(); ++i) s << (i ? "," : "") << outputs_[i];
    s << '\n';
    return s.str();
  }

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> outputs_;
};

}  // namespace qlidar::cli
