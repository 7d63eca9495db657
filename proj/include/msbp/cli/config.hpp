// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_CLI_CONFIG_HPP
#define MSBP_CLI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace msbp::cli {

/// Bad configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output; maps to exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One raw `key = value` assignment and where it came from.
struct RawValue {
  std::string value;
  int line = 0;  ///< 0 when not from a text config
};

using RawSections = std::map<std::string, std::map<std::string, RawValue>>;

/// `[section]` headers, `key = value` lines, `#` or `;` comments.
RawSections parse_ini(const std::string& text);
/// The "config" object of a run manifest written by this tool.
RawSections parse_manifest(const std::string& text);
/// Reads `path`, choosing the manifest parser when the file starts with '{'.
RawSections load_config_file(const std::string& path);

enum class ValueType { Int, UInt64, Double, String, DoubleList, IntList };

struct KeySpec {
  std::string name;
  ValueType type;
  std::string default_value;
};

/// Fully resolved, validated configuration of one command. Sections and keys
/// iterate in sorted order.
class Config {
 public:
  Config() = default;
  /// Applies `raw` over the defaults in `schema`; rejects unknown sections and
  /// keys and values that do not parse as their declared type.
  static Config resolve(const std::map<std::string, std::vector<KeySpec>>& schema, const RawSections& raw);

  void set(const std::string& section, const std::string& key, const std::string& value);
  const std::string& text(const std::string& section, const std::string& key) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  std::uint64_t uint64(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& values() const { return values_; }
  /// FNV-1a over "section.key=value\n" lines, skipping sections.keys in `exclude`.
  std::uint64_t hash(const std::vector<std::string>& exclude = {}) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::map<std::string, std::map<std::string, ValueType>> types_;
};

std::uint64_t fnv1a64(const std::string& bytes);

/// Parsers that throw ConfigError naming `what` on malformed input.
std::int64_t parse_int(const std::string& s, const std::string& what);
std::uint64_t parse_uint64(const std::string& s, const std::string& what);
double parse_double(const std::string& s, const std::string& what);
std::vector<double> parse_double_list(const std::string& s, const std::string& what);

/// One real per line; blank lines and `#` comments skipped.
std::vector<double> read_data_column(const std::string& path);

}  // namespace msbp::cli

#endif  // MSBP_CLI_CONFIG_HPP
