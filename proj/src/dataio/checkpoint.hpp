#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "numerics/graph.hpp"

namespace ssal {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Binary layout, all integers u32 little-endian:
///   "ALFG" version block_count
///   per block: name_len name rank dims[rank] payload (f32 LE, row-major)
///   CRC-32 of every preceding byte
/// Values are narrowed to float; written to a temporary file then renamed.
void save_checkpoint(const std::filesystem::path& path, std::span<const NamedTensor> blocks);

/// Verifies magic, version and checksum before returning any block.
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

std::vector<NamedTensor> to_named(std::span<Parameter* const> params);

/// Copies blocks into parameters by name. Missing, extra or mis-shaped blocks
/// raise a structural error naming the expected and found shapes.
void assign_named(std::span<Parameter* const> params, std::span<const NamedTensor> blocks);

/// Rounds every value to the nearest float, the precision checkpoints store.
void round_to_checkpoint_precision(std::span<Parameter* const> params);

/// CRC-32 of the whole file; convenient for determinism checks.
std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace ssal
