#include "ensemble/reports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ensemble/errors.hpp"

namespace fs = std::filesystem;

namespace ensemble {

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw DataError("output directory path is empty");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
  fs::path probe = fs::path(dir) / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw DataError("output directory is not writable: " + dir);
  }
  fs::remove(probe, ec);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool files_identical(const std::string& a, const std::string& b) {
  return read_text_file(a) == read_text_file(b);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TextTable::TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

void TextTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw DataError("table row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string TextTable::str() const {
  std::vector<std::size_t> width(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
  for (const auto& row : rows_)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  auto emit = [&](std::string& out, const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += row[c];
      if (c + 1 < row.size()) out.append(width[c] - row[c].size(), ' ');
    }
    out += '\n';
  };

  std::string out;
  emit(out, header_);
  std::vector<std::string> rule(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) rule[c] = std::string(width[c], '-');
  emit(out, rule);
  for (const auto& row : rows_) emit(out, row);
  return out;
}

}  // namespace ensemble
