#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "isb/layers.hpp"

namespace isb {

using TensorMap = std::map<std::string, nn::Tensor>;

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

/// Everything needed to resume training.
///
/// File layout: "ISBC", u32 format_version, u64 length + JSON block (configs,
/// step, rng_state), then u32 array count and, in sorted name order, for each
/// array: u32 name length, name, u32 rank, u32 dims..., float32 data. All
/// integers little-endian. Array names carry a "generator/", "discriminator/"
/// or "optimizer/" prefix in the file.
struct CheckpointBundle {
  std::uint32_t format_version = kCheckpointFormatVersion;
  TensorMap generator_params;
  TensorMap discriminator_params;
  TensorMap optimizer_state;
  std::int64_t step = 0;
  nlohmann::json configs = nlohmann::json::object();
  std::string rng_state;

  friend bool operator==(const CheckpointBundle&, const CheckpointBundle&) = default;
};

std::string encode_checkpoint(const CheckpointBundle& bundle);
CheckpointBundle decode_checkpoint(const std::string& bytes);
void save_checkpoint(const CheckpointBundle& bundle, const std::filesystem::path& path);
CheckpointBundle load_checkpoint(const std::filesystem::path& path);

TensorMap export_parameters(const nn::ParameterList& params);
/// Copies values into params; ShapeMismatch on any missing, extra, or
/// differently shaped array.
void import_parameters(const nn::ParameterList& params, const TensorMap& values, const std::string& what);

// Shared array section codec, also used by feature-extractor weight files.
void append_arrays(std::string& out, const TensorMap& arrays);
TensorMap parse_arrays(const std::string& bytes, std::size_t& offset);

std::string read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace isb
