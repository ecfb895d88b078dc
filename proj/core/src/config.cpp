#include "measure_pca/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "measure_pca/error.hpp"

namespace measure_pca {

namespace {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_integer(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source_name) {
  ConfigFile cfg;
  cfg.source_ = source_name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": expected `key = value`");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
    if (!cfg.values_.emplace(key, value).second) {
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": duplicate key `" + key + "`");
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  if (path.extension() != ".json") return parse(in, path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("config") || !doc["config"].is_object()) {
    throw ConfigError(path.string() + ": manifest has no \"config\" object");
  }
  std::map<std::string, std::string> entries;
  for (const auto& [key, value] : doc["config"].items()) {
    if (!value.is_string()) throw ConfigError(path.string() + ": config value of `" + key + "` is not a string");
    entries.emplace(key, value.get<std::string>());
  }
  return from_entries(std::move(entries), path.string());
}

ConfigFile ConfigFile::from_entries(std::map<std::string, std::string> entries, const std::string& source_name) {
  ConfigFile cfg;
  cfg.source_ = source_name;
  cfg.values_ = std::move(entries);
  return cfg;
}

const std::string* ConfigFile::lookup(const std::string& key) {
  used_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

void ConfigFile::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(source_ + ": key `" + key + "`: " + what);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) {
  const std::string* v = lookup(key);
  return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& key, double fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  double out = 0.0;
  const char* begin = v->data();
  const char* end = begin + v->size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end || begin == end) fail(key, "expected a number, got `" + *v + "`");
  return out;
}

std::size_t ConfigFile::get_size(const std::string& key, std::size_t fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  std::size_t out = 0;
  if (!parse_integer(*v, out)) fail(key, "expected a nonnegative integer, got `" + *v + "`");
  return out;
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  if (!parse_integer(*v, out)) fail(key, "expected a nonnegative integer, got `" + *v + "`");
  return out;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  std::string lower = *v;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  fail(key, "expected true or false, got `" + *v + "`");
}

std::vector<std::size_t> ConfigFile::get_size_list(const std::string& key,
                                                   const std::vector<std::size_t>& fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  std::vector<std::size_t> out;
  for (const std::string& item : split_commas(*v)) {
    std::size_t x = 0;
    if (!parse_integer(item, x) || x == 0) fail(key, "expected a list of positive integers, got `" + *v + "`");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> ConfigFile::get_word_list(const std::string& key,
                                                   const std::vector<std::string>& fallback) {
  const std::string* v = lookup(key);
  if (!v) return fallback;
  std::vector<std::string> out = split_commas(*v);
  for (const auto& item : out) {
    if (item.empty()) fail(key, "empty list entry in `" + *v + "`");
  }
  return out;
}

void ConfigFile::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (used_.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw ConfigError(source_ + ": unknown config keys: " + unknown);
}

}  // namespace measure_pca
