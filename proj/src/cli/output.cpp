// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/cli/output.hpp"

#include <cstdio>

#include "msbp/cli/config.hpp"

namespace msbp::cli {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string RunHeader::line() const {
  return "# msbp " + version + " seed=" + std::to_string(seed) + " config=" + hex64(config_hash);
}

nlohmann::ordered_json RunHeader::json() const {
  nlohmann::ordered_json j;
  j["artifact"] = "msbp";
  j["version"] = version;
  j["seed"] = seed;
  j["config_hash"] = hex64(config_hash);
  return j;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const RunHeader& header,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw IoError("cannot write " + path.string());
  out_ << header.line() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }

CsvWriter& CsvWriter::cell(std::int64_t x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (filled_ == columns_) throw std::logic_error("too many cells in CSV row");
  out_ << (filled_ ? "," : "") << s;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("incomplete CSV row");
  out_ << '\n';
  filled_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("error writing " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  out.close();
  if (out.fail()) throw IoError("error writing " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

}  // namespace msbp::cli
