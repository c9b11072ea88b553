#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fxrca {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row

  // Index of `name` in the header, or -1.
  int column_index(const std::string& name) const;
};

// Comma-separated, first row header, optional double-quoted fields. Blank
// lines are skipped. Rows must have as many fields as the header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

std::string csv_field(const std::string& value);

// Writes via a temporary sibling file and rename, so readers never observe
// a partially written output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace fxrca
