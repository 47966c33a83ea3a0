#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pm25/nn/network.hpp"

// Checkpoint layout (all integers little-endian):
//
//   "PM25CKPT"            8-byte magic
//   u32 format_version    currently 1
//   u64 header_bytes
//   header                UTF-8 JSON: input shape, layer specs, tensor table,
//                         parameter count
//   blobs                 float32 values of every tensor in the table, in
//                         table order (layer order, then declaration order)
namespace pm25::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { Io, Corrupt, VersionMismatch, Truncated, ShapeMismatch };

  CheckpointError(Kind kind, const std::string& what);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct TensorEntry {
  std::size_t layer = 0;
  std::string name;
  std::vector<std::size_t> shape;
};

struct CheckpointHeader {
  std::uint32_t format_version = kCheckpointVersion;
  Shape input_shape;
  std::uint64_t seed = 0;
  std::vector<LayerSpec> layers;
  std::vector<TensorEntry> tensors;
  std::size_t parameter_count = 0;
};

void save_checkpoint(const Network<float>& net, const std::filesystem::path& path);
Network<float> load_checkpoint(const std::filesystem::path& path);
CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

}  // namespace pm25::nn
