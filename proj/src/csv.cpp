#include "rds/csv.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rds/errors.hpp"

namespace rds {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_comment(const std::string& line) { comments_.push_back("# " + line); }

void CsvWriter::add_row(const std::vector<double>& values) {
  std::string row;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_double(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::add_text_row(const std::vector<std::string>& values) {
  std::string row;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += values[i];
  }
  rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (const auto& c : comments_) os << c << '\n';
  for (size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& r : rows_) os << r << '\n';
  return os.str();
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << str();
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static const char* hexd = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char b : digest) {
    out.push_back(hexd[b >> 4]);
    out.push_back(hexd[b & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return sha256_hex(os.str());
}

}  // namespace rds
