#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aiml {

/// Flat key=value configuration with optional [section] headers.
///
/// Grammar (one entry per line):
///   # comment, blank lines ignored
///   [section]        -> subsequent keys are stored as "section.key"
///   key = value      -> value is the trimmed remainder of the line
///
/// Values are parsed on access; lists are comma-separated. Lookup of a
/// missing key without a default raises ConfigError naming the key.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  /// CLI override: "key=value" (key may carry a section prefix).
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace aiml
