#pragma once

// Flat configuration files:
//
//   # comment
//   m = 2
//   [grid]            # prefixes following keys with "grid."
//   n_normal = 64
//   solver.cfl = 0.4  # dotted keys work anywhere
//
// Values are kept as strings and converted on access; lists are comma separated.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dnwave {

class ConfigMap {
 public:
  /// Throws ConfigError naming the offending line.
  static ConfigMap parse(std::string_view text);
  static ConfigMap load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Applies one `key=value` override.
  void apply_override(std::string_view assignment);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Keys that were set but never read; useful to flag typos.
  std::vector<std::string> unused_keys() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> read_;
};

}  // namespace dnwave
