#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pm25/dataset/records.hpp"
#include "pm25/model/train.hpp"

namespace pm25::cli {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kData = 3, kNumeric = 4 };

struct RunConfig {
  std::string subcommand;
  std::filesystem::path manifest;
  std::filesystem::path readings;
  std::filesystem::path output_dir = "pm25_out";
  std::filesystem::path checkpoint;
  std::vector<std::filesystem::path> images;
  model::TrainConfig train;
  std::string arch = "dcnn";
  std::uint64_t seed = 0;
  bool fail_fast = false;
  std::size_t k = 10;
  dataset::SplitOrder split_order = dataset::SplitOrder::Random;
  std::size_t patch = 15;
  std::optional<double> humidity;
};

using Settings = std::map<std::string, std::string>;

// Flat `key = value` lines; blank lines and lines starting with # ignored.
Settings read_config_file(const std::filesystem::path& path);

// Parses one setting into cfg. Throws ConfigError for an unknown key or a
// bad value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Defaults, then the config file, then $PM25_OUTPUT_DIR, then flags.
RunConfig resolve(const std::string& subcommand, const Settings& file, const Settings& flags,
                  std::vector<std::filesystem::path> images);

// Runs the subcommand; exceptions propagate.
void run(const RunConfig& cfg);

// Maps a thrown exception to an exit code and prints it.
int report_failure(std::exception_ptr error);

}  // namespace pm25::cli
