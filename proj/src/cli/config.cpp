// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace msbp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : std::string{}; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return ss.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_type(ValueType t, const std::string& v, const std::string& what) {
  switch (t) {
    case ValueType::Int:
      parse_int(v, what);
      break;
    case ValueType::UInt64:
      parse_uint64(v, what);
      break;
    case ValueType::Double:
      parse_double(v, what);
      break;
    case ValueType::DoubleList:
      parse_double_list(v, what);
      break;
    case ValueType::IntList:
      for (const auto& item : split_list(v)) parse_int(item, what);
      break;
    case ValueType::String:
      break;
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_uint64(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw ConfigError(what + ": expected an unsigned 64-bit integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(what + ": expected a finite real, got '" + s + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item, what));
  if (out.empty()) throw ConfigError(what + ": expected a comma-separated list");
  return out;
}

RawSections parse_ini(const std::string& text) {
  RawSections out;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where(line) + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(where(line) + "empty section name");
      out[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where(line) + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where(line) + "assignment outside a section");
    const std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    if (key.empty()) throw ConfigError(where(line) + "empty key");
    auto& sec = out[section];
    if (sec.count(key)) throw ConfigError(where(line) + "duplicate key '" + key + "'");
    sec[key] = RawValue{value, line};
  }
  return out;
}

RawSections parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("config") || !j["config"].is_object())
    throw ConfigError("manifest has no 'config' object");
  RawSections out;
  for (const auto& [section, keys] : j["config"].items()) {
    if (!keys.is_object()) throw ConfigError("manifest section '" + section + "' is not an object");
    auto& sec = out[section];
    for (const auto& [key, value] : keys.items())
      sec[key] = RawValue{value.is_string() ? value.get<std::string>() : value.dump(), 0};
  }
  return out;
}

RawSections load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_manifest(text);
  return parse_ini(text);
}

Config Config::resolve(const std::map<std::string, std::vector<KeySpec>>& schema, const RawSections& raw) {
  Config c;
  for (const auto& [section, keys] : schema)
    for (const auto& k : keys) {
      c.values_[section][k.name] = k.default_value;
      c.types_[section][k.name] = k.type;
    }
  for (const auto& [section, keys] : raw) {
    auto sit = schema.find(section);
    if (sit == schema.end()) {
      const int line = keys.empty() ? 0 : keys.begin()->second.line;
      throw ConfigError(where(line) + "unknown section [" + section + "]");
    }
    for (const auto& [key, rv] : keys) {
      auto& types = c.types_[section];
      auto tit = types.find(key);
      if (tit == types.end()) throw ConfigError(where(rv.line) + "unknown key '" + key + "' in [" + section + "]");
      check_type(tit->second, rv.value, where(rv.line) + section + "." + key);
      c.values_[section][key] = rv.value;
    }
  }
  return c;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  auto sit = types_.find(section);
  if (sit == types_.end() || !sit->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
  check_type(sit->second.at(key), value, section + "." + key);
  values_[section][key] = value;
}

const std::string& Config::text(const std::string& section, const std::string& key) const {
  auto sit = values_.find(section);
  if (sit == values_.end() || !sit->second.count(key)) throw ConfigError("missing key " + section + "." + key);
  return sit->second.at(key);
}

std::int64_t Config::integer(const std::string& section, const std::string& key) const {
  return parse_int(text(section, key), section + "." + key);
}

std::uint64_t Config::uint64(const std::string& section, const std::string& key) const {
  return parse_uint64(text(section, key), section + "." + key);
}

double Config::real(const std::string& section, const std::string& key) const {
  return parse_double(text(section, key), section + "." + key);
}

std::vector<double> Config::reals(const std::string& section, const std::string& key) const {
  return parse_double_list(text(section, key), section + "." + key);
}

std::vector<std::int64_t> Config::integers(const std::string& section, const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(text(section, key))) out.push_back(parse_int(item, section + "." + key));
  if (out.empty()) throw ConfigError(section + "." + key + ": expected a comma-separated list");
  return out;
}

std::uint64_t Config::hash(const std::vector<std::string>& exclude) const {
  std::string canon;
  for (const auto& [section, keys] : values_)
    for (const auto& [key, value] : keys) {
      const std::string full = section + "." + key;
      bool skip = false;
      for (const auto& e : exclude) skip = skip || e == full;
      if (!skip) canon += full + "=" + value + "\n";
    }
  return fnv1a64(canon);
}

std::vector<double> read_data_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path);
  std::vector<double> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
    s = trim(s);
    if (s.empty()) continue;
    try {
      out.push_back(parse_double(s, path));
    } catch (const ConfigError&) {
      throw IoError(path + ": line " + std::to_string(line) + ": malformed value '" + s + "'");
    }
  }
  if (in.bad()) throw IoError("error reading " + path);
  return out;
}

}  // namespace msbp::cli
