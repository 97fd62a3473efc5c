#include "dataio/model_io.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "dataio/checkpoint.hpp"

namespace ssal {
namespace {

constexpr const char* kLengthBlock = "meta.sequence_length";

}  // namespace

void save_sorter(const std::filesystem::path& path, LstmSorter& sorter) {
  std::vector<NamedTensor> blocks{{kLengthBlock, Tensor::scalar(static_cast<double>(sorter.length()))}};
  for (auto& b : to_named(sorter.parameters())) blocks.push_back(std::move(b));
  save_checkpoint(path, blocks);
}

LstmSorter load_sorter(const std::filesystem::path& path) {
  std::vector<NamedTensor> blocks = load_checkpoint(path);
  const auto meta = std::find_if(blocks.begin(), blocks.end(), [](const NamedTensor& b) { return b.name == kLengthBlock; });
  require(meta != blocks.end() && meta->value.size() == 1, ErrorKind::structural,
          path.string() + ": not a sorter checkpoint (no sequence length block)");
  const auto w_h = std::find_if(blocks.begin(), blocks.end(), [](const NamedTensor& b) { return b.name == "sorter.fwd.w_h"; });
  require(w_h != blocks.end() && w_h->value.shape().size() == 2, ErrorKind::structural,
          path.string() + ": not a sorter checkpoint (no sorter.fwd.w_h block)");
  SorterShape shape{static_cast<std::size_t>(meta->value.item()), w_h->value.rows()};
  blocks.erase(meta);
  Rng unused(0);
  LstmSorter sorter(shape, unused);
  assign_named(sorter.parameters(), blocks);
  return sorter;
}

void save_target_model(const std::filesystem::path& path, TargetModel& model) {
  save_checkpoint(path, to_named(model.parameters()));
}

TargetModel load_target_model(const std::filesystem::path& path, const TargetConfig& config) {
  const std::vector<NamedTensor> blocks = load_checkpoint(path);
  Rng unused(0);
  TargetModel model(config, unused);
  assign_named(model.parameters(), blocks);
  return model;
}

}  // namespace ssal
