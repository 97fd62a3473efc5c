#include "dataio/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "dataio/text_format.hpp"

namespace ssal {
namespace {

bool same_value(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

bool same_record(const MetricsRow& a, const MetricsRow& b) {
  return a.cycle == b.cycle && a.labeled_count == b.labeled_count && same_value(a.test_accuracy, b.test_accuracy) &&
         a.pseudo_count == b.pseudo_count && same_value(a.pseudo_error_rate, b.pseudo_error_rate) &&
         same_value(a.disc_acc, b.disc_acc) && same_value(a.vae_loss, b.vae_loss) &&
         same_value(a.seconds, b.seconds);
}

std::string format_metrics(std::span<const MetricsRow> rows) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MetricsRow& r = rows[i];
    require(i == 0 || rows[i - 1].cycle < r.cycle, ErrorKind::structural, "metrics rows must be ordered by cycle");
    out += std::to_string(r.cycle) + ',' + std::to_string(r.labeled_count) + ',' + format_double(r.test_accuracy) +
           ',' + std::to_string(r.pseudo_count) + ',' + format_double(r.pseudo_error_rate) + ',' +
           format_double(r.disc_acc) + ',' + format_double(r.vae_loss) + ',' + format_double(r.seconds) + '\n';
  }
  return out;
}

void write_metrics(const std::filesystem::path& path, std::span<const MetricsRow> rows) {
  write_file_atomic(path, format_metrics(rows));
}

std::vector<MetricsRow> parse_metrics(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kMetricsHeader, ErrorKind::format,
          source + ":1: missing or unexpected metrics header");
  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    require(cells.size() == 8, ErrorKind::format, where + "expected 8 columns, found " + std::to_string(cells.size()));
    auto count = [&](std::size_t col) {
      std::size_t v = 0;
      const auto c = cells[col];
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      require(ec == std::errc() && ptr == c.data() + c.size() && !c.empty(), ErrorKind::format,
              where + "column " + std::to_string(col + 1) + " is not a count");
      return v;
    };
    auto real = [&](std::size_t col) {
      const auto v = parse_double(cells[col]);
      require(v.has_value(), ErrorKind::format, where + "column " + std::to_string(col + 1) + " is not a number");
      return *v;
    };
    rows.push_back({count(0), count(1), real(2), count(3), real(4), real(5), real(6), real(7)});
  }
  return rows;
}

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open metrics " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_metrics(buf.str(), path.string());
}

}  // namespace ssal
