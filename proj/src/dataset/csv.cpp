#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <iterator>

#include "pm25/errors.hpp"

namespace pm25::dataset {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::string& CsvRow::field(std::size_t i) const {
  static const std::string empty;
  return i < fields.size() ? fields[i] : empty;
}

std::size_t CsvTable::column(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  throw DataError("missing column '" + std::string(name) + "'");
}

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text, const std::string& source) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  bool quoted = false, field_started = false, row_started = false;
  row.line = 1;

  const auto end_field = [&] {
    row.fields.push_back(quoted ? field : std::string(trim(field)));
    field.clear();
    quoted = false;
    field_started = false;
  };
  const auto end_row = [&] {
    if (row_started) {
      end_field();
      rows.push_back(std::move(row));
    }
    row = CsvRow{};
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted && field_started) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          field_started = false;  // closing quote; stay `quoted` until the separator
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '\r') continue;
    if (ch == '\n') {
      end_row();
      ++line;
      row.line = line;
      continue;
    }
    if (!row_started) {
      row_started = true;
      row.line = line;
    }
    if (ch == ',') {
      end_field();
    } else if (ch == '"' && trim(field).empty() && !quoted) {
      field.clear();
      quoted = true;
      field_started = true;
    } else if (quoted) {
      if (ch != ' ' && ch != '\t') {
        throw DataError(source + ":" + std::to_string(line) + ": text after closing quote");
      }
    } else {
      field.push_back(ch);
    }
  }
  if (quoted && field_started) throw DataError(source + ": unterminated quoted field");
  end_row();

  CsvTable t;
  if (rows.empty()) throw DataError(source + ": no header row");
  t.header = std::move(rows.front().fields);
  t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_csv(text, path.string());
}

double parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace pm25::dataset
