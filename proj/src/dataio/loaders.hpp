#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "dataio/config.hpp"
#include "dataio/dataset.hpp"

namespace ssal {

/// IDX image/label pair (big-endian headers; images 0x00000803 with
/// count x rows x cols unsigned bytes, labels 0x00000801). Pixels are scaled
/// to [0, 1], flattened, then standardized. Errors name the file and byte offset.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t classes = 10);

struct CsvSchema {
  std::size_t dim = 0;      // feature columns; 0 infers from the first data row
  bool header = false;      // skip the first line
  std::size_t classes = 0;  // 0 infers max label + 1
  bool normalize = true;
};

/// Rows of `dim` numeric feature columns followed by one integer label.
/// Errors cite path:line:field, both counted from 1.
Dataset load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes features (as stored) and labels with shortest round-trip formatting.
void write_csv_dataset(const std::filesystem::path& path, const Dataset& data);

/// Materializes the dataset a config describes, normalized. Synthetic data is
/// drawn from a stream derived from `seed`, so every strategy run with the same
/// seed sees the same samples.
Dataset load_dataset(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace ssal
