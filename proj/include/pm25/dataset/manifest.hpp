#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pm25/dataset/labeling.hpp"
#include "pm25/dataset/records.hpp"

namespace pm25::dataset {

enum class IssueKind { Malformed, BadTimestamp, OutOfRange, MissingLabel, MissingFile, Duplicate };

std::string_view to_string(IssueKind kind);

struct ManifestIssue {
  std::size_t line = 0;
  IssueKind kind = IssueKind::Malformed;
  std::string message;
};

struct ManifestOptions {
  // Throw DataError on the first bad row instead of skipping it.
  bool fail_fast = true;
  // Labels rows whose pm25 field is empty.
  const HourlyReadings* readings = nullptr;
  // When false, a row with no label is kept with pm25_label 0.
  bool require_label = true;
};

struct Manifest {
  std::vector<ImageRecord> records;
  std::vector<ManifestIssue> issues;  // rows skipped in non-fail-fast mode
};

// CSV with header image_path,captured_at,location,pm25,humidity (pm25 and
// humidity may be empty; the humidity column may be omitted). Relative image
// paths are resolved against the manifest's directory. An explicit pm25
// value takes precedence over the hourly readings.
Manifest parse_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});

void write_manifest_csv(std::span<const ImageRecord> records, const std::filesystem::path& path);

struct AuditReport {
  std::size_t rows = 0;
  std::size_t usable = 0;
  std::vector<ManifestIssue> issues;

  bool clean() const { return issues.empty(); }
};

// Missing image files, duplicate paths (reported on the later line, naming
// both) and out-of-range labels.
AuditReport audit(std::span<const ImageRecord> records);
// Row-level problems from parsing plus audit() over the rows that parsed.
AuditReport audit_manifest(const std::filesystem::path& path, const HourlyReadings* readings = nullptr);

void write_audit_csv(const AuditReport& report, const std::filesystem::path& path);

}  // namespace pm25::dataset
