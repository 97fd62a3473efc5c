#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ranking/sorter.hpp"

namespace ssal {

enum class DatasetKind { blobs, moons, csv, idx };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::blobs;
  std::size_t n = 1000;
  std::size_t classes = 4;
  std::size_t dim = 2;
  double sigma = 1.0;   // blobs
  double noise = 0.15;  // moons
  std::filesystem::path csv_path;
  bool csv_header = false;
  std::filesystem::path idx_images;
  std::filesystem::path idx_labels;
  double test_fraction = 0.2;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// Every knob of one experiment. Defaults are the desk-scale settings; see
/// configs/ for annotated examples of the file grammar.
struct ExperimentConfig {
  DatasetSpec dataset;

  std::string strategy = "ssvaal";
  std::uint64_t seed = 0;
  std::size_t initial_labeled = 20;  // K
  std::size_t budget = 20;           // b
  std::size_t cycles = 5;

  double tau = 0.95;
  double lambda = 1.0;
  double beta = 1.0;
  double eta = 1.0;
  bool capl = true;  // lets a CAPL strategy skip the agreement stage

  std::vector<std::size_t> hidden_widths{64, 64, 64};
  std::size_t loss_head_width = 16;
  std::size_t latent_dim = 8;
  std::size_t vae_hidden = 64;
  std::size_t disc_hidden = 64;

  std::size_t batch_size = 32;
  std::size_t supervised_epochs = 60;
  std::size_t semi_epochs = 30;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0005;

  std::size_t adversarial_epochs = 10;
  std::size_t adversarial_batch = 64;
  double adversarial_lr = 5e-4;

  std::size_t sorter_length = 16;
  std::size_t sorter_hidden = 128;
  std::size_t sorter_epochs = 100;
  std::size_t sorter_vectors_per_epoch = 500;
  std::size_t sorter_batch = 32;
  std::size_t sorter_heldout = 1000;
  double sorter_lr = 1e-3;
  std::filesystem::path sorter_checkpoint;

  bool record_wall_clock = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown and repeated keys
/// are errors. All problems in the document are reported together in one
/// config error. Relative paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Assigns one key from its textual value; throws a config error on a bad key or value.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Every range violation, in key order. Empty when the config is usable.
std::vector<std::string> config_problems(const ExperimentConfig& config);
/// Throws one config error listing every problem.
void validate_config(const ExperimentConfig& config);

/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

std::vector<std::string> config_keys();

SorterTrainConfig sorter_train_config(const ExperimentConfig& config);

const char* dataset_kind_name(DatasetKind kind);

}  // namespace ssal
