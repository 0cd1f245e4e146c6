#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ensemble {

// Creates the directory (with parents) and proves it is writable by touching
// and removing a probe file. Runs before any computation so a bad output
// directory fails fast instead of after minutes of training.
void ensure_out_dir(const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
bool files_identical(const std::string& a, const std::string& b);

// Quotes a field when it holds a comma, quote, or newline; quotes double.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);  // includes '\n'

// 17 significant digits — parses back to the identical double, so CSVs are
// byte-stable across reruns.
std::string format_double(double v);

// Aligned monospace table: header, dashed rule, left-aligned cells with
// two-space gutters.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ensemble
