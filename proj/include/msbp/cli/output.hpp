// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_CLI_OUTPUT_HPP
#define MSBP_CLI_OUTPUT_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace msbp::cli {

struct RunHeader {
  std::string version;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  /// "# msbp <version> seed=<seed> config=<16 hex digits>"
  std::string line() const;
  nlohmann::ordered_json json() const;
};

/// %.17g, which round-trips every double.
std::string format_double(double x);
std::string hex64(std::uint64_t x);

/// Comma-separated file with the run header as its first line.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const RunHeader& header, const std::vector<std::string>& columns);
  CsvWriter& cell(double x);
  CsvWriter& cell(std::int64_t x);
  CsvWriter& cell(const std::string& s);
  void end_row();
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
/// Creates `dir` (and parents) or throws IoError.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace msbp::cli

#endif  // MSBP_CLI_OUTPUT_HPP
