#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace measure_pca {

/// Flat `key = value` configuration with `#` comments. Keys may contain dots
/// (`model.tau_b`). Every typed getter marks its key as used;
/// reject_unknown() then reports keys that nothing asked for.
///
/// All failures throw ConfigError.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& source_name);
  /// Reads a key/value file, or the "config" object of a run manifest when
  /// the path ends in ".json".
  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile from_entries(std::map<std::string, std::string> entries, const std::string& source_name);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  std::size_t get_size(const std::string& key, std::size_t fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  /// Comma-separated list of positive integers.
  std::vector<std::size_t> get_size_list(const std::string& key, const std::vector<std::size_t>& fallback);
  /// Comma-separated list of words, trimmed.
  std::vector<std::string> get_word_list(const std::string& key, const std::vector<std::string>& fallback);

  /// Throws ConfigError naming every key that no getter consumed.
  void reject_unknown() const;

  /// Every key/value pair as written, in key order.
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;

  const std::string* lookup(const std::string& key);
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

}  // namespace measure_pca
