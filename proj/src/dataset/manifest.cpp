#include "pm25/dataset/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>

#include "csv.hpp"
#include "pm25/errors.hpp"

namespace pm25::dataset {

namespace {

struct RowError {
  IssueKind kind;
  std::string message;
};

}  // namespace

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::Malformed: return "malformed";
    case IssueKind::BadTimestamp: return "bad_timestamp";
    case IssueKind::OutOfRange: return "out_of_range";
    case IssueKind::MissingLabel: return "missing_label";
    case IssueKind::MissingFile: return "missing_file";
    case IssueKind::Duplicate: return "duplicate";
  }
  return "?";
}

Manifest parse_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
  const CsvTable table = read_csv(path);
  const std::size_t c_path = table.column("image_path");
  const std::size_t c_time = table.column("captured_at");
  const std::size_t c_loc = table.column("location");
  const std::size_t c_pm = table.column("pm25");
  const auto c_hum = table.find_column("humidity");
  const std::filesystem::path base = path.parent_path();

  Manifest m;
  for (const auto& row : table.rows) {
    ImageRecord r;
    r.line = row.line;
    std::optional<RowError> err;
    try {
      if (row.fields.size() > table.header.size()) {
        throw RowError{IssueKind::Malformed, "row has " + std::to_string(row.fields.size()) + " fields, header has " +
                                                 std::to_string(table.header.size())};
      }
      const std::string& p = row.field(c_path);
      if (p.empty()) throw RowError{IssueKind::Malformed, "empty image_path"};
      r.image_path = std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : base / p;
      try {
        r.captured_at = parse_timestamp(row.field(c_time));
      } catch (const DataError& e) {
        throw RowError{IssueKind::BadTimestamp, e.what()};
      }
      r.location = row.field(c_loc);
      const std::string& pm = row.field(c_pm);
      if (!pm.empty()) {
        try {
          r.pm25_label = parse_number(pm);
        } catch (const DataError& e) {
          throw RowError{IssueKind::Malformed, std::string("pm25: ") + e.what()};
        }
        if (!(r.pm25_label >= 0.0 && r.pm25_label <= kAqiMax)) {
          throw RowError{IssueKind::OutOfRange, "pm25 " + pm + " is outside [0, 500]"};
        }
      } else if (options.readings) {
        try {
          r.pm25_label = assign_label(r.captured_at, *options.readings);
        } catch (const DataError& e) {
          throw RowError{IssueKind::MissingLabel, e.what()};
        }
      } else if (options.require_label) {
        throw RowError{IssueKind::MissingLabel, "pm25 is empty and no hourly readings were supplied"};
      }
      if (c_hum && !row.field(*c_hum).empty()) {
        double h = 0.0;
        try {
          h = parse_number(row.field(*c_hum));
        } catch (const DataError& e) {
          throw RowError{IssueKind::Malformed, std::string("humidity: ") + e.what()};
        }
        if (!(h >= 0.0 && h <= 100.0)) throw RowError{IssueKind::OutOfRange, "humidity " + row.field(*c_hum) + " is outside [0, 100]"};
        r.humidity = h;
      }
    } catch (const RowError& e) {
      err = e;
    }
    if (err) {
      if (options.fail_fast) throw DataError(path.string() + ":" + std::to_string(row.line) + ": " + err->message);
      m.issues.push_back({row.line, err->kind, err->message});
      continue;
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

void write_manifest_csv(std::span<const ImageRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  out << "image_path,captured_at,location,pm25,humidity\n";
  for (const auto& r : records) {
    out << csv_escape(r.image_path.string()) << ',' << r.captured_at.iso() << ',' << csv_escape(r.location) << ','
        << r.pm25_label << ',';
    if (r.humidity) out << *r.humidity;
    out << '\n';
  }
}

AuditReport audit(std::span<const ImageRecord> records) {
  AuditReport rep;
  rep.rows = records.size();
  std::map<std::string, std::size_t> seen;
  for (const auto& r : records) {
    bool ok = true;
    const std::string key = r.image_path.lexically_normal().string();
    if (auto [it, fresh] = seen.emplace(key, r.line); !fresh) {
      rep.issues.push_back({r.line, IssueKind::Duplicate,
                            "duplicate image_path " + r.image_path.string() + " (lines " + std::to_string(it->second) +
                                " and " + std::to_string(r.line) + ")"});
      ok = false;
    }
    if (!std::filesystem::is_regular_file(r.image_path)) {
      rep.issues.push_back({r.line, IssueKind::MissingFile, "image file not found: " + r.image_path.string()});
      ok = false;
    }
    try {
      validate(r);
    } catch (const DataError& e) {
      rep.issues.push_back({r.line, IssueKind::OutOfRange, e.what()});
      ok = false;
    }
    if (ok) ++rep.usable;
  }
  return rep;
}

AuditReport audit_manifest(const std::filesystem::path& path, const HourlyReadings* readings) {
  ManifestOptions opt;
  opt.fail_fast = false;
  opt.readings = readings;
  const Manifest m = parse_manifest(path, opt);
  AuditReport rep = audit(m.records);
  rep.rows += m.issues.size();
  rep.issues.insert(rep.issues.end(), m.issues.begin(), m.issues.end());
  std::stable_sort(rep.issues.begin(), rep.issues.end(),
                   [](const ManifestIssue& a, const ManifestIssue& b) { return a.line < b.line; });
  return rep;
}

void write_audit_csv(const AuditReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "line,kind,message\n";
  for (const auto& i : report.issues) out << i.line << ',' << to_string(i.kind) << ',' << csv_escape(i.message) << '\n';
}

}  // namespace pm25::dataset
