#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ssal {

inline constexpr const char* kMetricsHeader =
    "cycle,labeled_count,test_accuracy,pseudo_count,pseudo_error_rate,disc_acc,vae_loss,seconds";

/// One line of the metrics CSV. Values that do not apply to a strategy (no
/// pseudo labels, no discriminator) are NaN and written as `nan`.
struct MetricsRow {
  std::size_t cycle = 0;
  std::size_t labeled_count = 0;
  double test_accuracy = 0.0;
  std::size_t pseudo_count = 0;
  double pseudo_error_rate = 0.0;
  double disc_acc = 0.0;
  double vae_loss = 0.0;
  double seconds = 0.0;
};

/// Field-wise equality in which NaN equals NaN.
bool same_record(const MetricsRow& a, const MetricsRow& b);

std::string format_metrics(std::span<const MetricsRow> rows);
/// Rows must be ordered by cycle. Written atomically with LF endings.
void write_metrics(const std::filesystem::path& path, std::span<const MetricsRow> rows);

std::vector<MetricsRow> parse_metrics(const std::string& text, const std::string& source = "<metrics>");
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

}  // namespace ssal
