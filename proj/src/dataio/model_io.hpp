#pragma once

#include <filesystem>

#include "nets/target_model.hpp"
#include "ranking/sorter.hpp"

namespace ssal {

/// Sorter checkpoint: the network weights plus a `meta.sequence_length` block.
void save_sorter(const std::filesystem::path& path, LstmSorter& sorter);
LstmSorter load_sorter(const std::filesystem::path& path);

void save_target_model(const std::filesystem::path& path, TargetModel& model);
/// The architecture comes from `config`; a checkpoint of another shape is a
/// structural error naming the expected and found dimensions.
TargetModel load_target_model(const std::filesystem::path& path, const TargetConfig& config);

}  // namespace ssal
