#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pm25::dataset {

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> fields;

  // Missing trailing fields read as empty.
  const std::string& field(std::size_t i) const;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  // Throws DataError when the column is absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;
};

// Comma separated, double-quote escaping, CRLF tolerated, blank lines
// skipped. The first non-blank row is the header.
CsvTable parse_csv(std::string_view text, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

// Whole-field decimal number; surrounding blanks allowed.
double parse_number(std::string_view text);

std::string csv_escape(std::string_view field);

}  // namespace pm25::dataset
