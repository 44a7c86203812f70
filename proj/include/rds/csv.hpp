#pragma once

#include <string>
#include <vector>

namespace rds {

/// Deterministic CSV writer: shortest round-trip formatting for doubles,
/// fixed row order, no timestamps. Identical inputs produce identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  /// Leading '#' comment lines (config hash, versions).
  void add_comment(const std::string& line);
  void add_row(const std::vector<double>& values);
  void add_text_row(const std::vector<std::string>& values);

  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

std::string format_double(double v);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Hex SHA-256 of a file's contents. Raises ErrorCode::Io when unreadable.
std::string sha256_file(const std::string& path);

}  // namespace rds
