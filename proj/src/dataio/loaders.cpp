#include "dataio/loaders.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "dataio/generators.hpp"
#include "dataio/text_format.hpp"
#include "numerics/rng.hpp"

namespace ssal {
namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t offset) {
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

std::string hex32(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

[[noreturn]] void format_error(const std::filesystem::path& path, std::size_t offset, const std::string& msg) {
  fail(ErrorKind::format, path.string() + ": byte offset " + std::to_string(offset) + ": " + msg);
}

void expect_size(const std::filesystem::path& path, const std::vector<unsigned char>& bytes, std::size_t offset,
                 std::size_t needed, const char* what) {
  if (bytes.size() < offset + needed) {
    format_error(path, offset,
                 std::string("truncated ") + what + ": expected " + std::to_string(offset + needed) +
                     " bytes, found " + std::to_string(bytes.size()));
  }
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, std::size_t classes) {
  require(classes >= 2, ErrorKind::config, "load_idx needs at least two classes");
  const std::vector<unsigned char> img = read_bytes(images);
  const std::vector<unsigned char> lab = read_bytes(labels);

  expect_size(images, img, 0, 16, "image header");
  if (const std::uint32_t magic = read_be32(img, 0); magic != 0x00000803) {
    format_error(images, 0, "image magic " + hex32(magic) + ", expected 0x00000803");
  }
  const std::size_t count = read_be32(img, 4), rows = read_be32(img, 8), cols = read_be32(img, 12);
  const std::size_t pixels = rows * cols;
  if (pixels == 0) format_error(images, 8, "zero-sized images");
  expect_size(images, img, 16, count * pixels, "image payload");
  if (img.size() != 16 + count * pixels) {
    format_error(images, 16 + count * pixels,
                 std::to_string(img.size() - 16 - count * pixels) + " unexpected trailing bytes");
  }

  expect_size(labels, lab, 0, 8, "label header");
  if (const std::uint32_t magic = read_be32(lab, 0); magic != 0x00000801) {
    format_error(labels, 0, "label magic " + hex32(magic) + ", expected 0x00000801");
  }
  if (const std::size_t label_count = read_be32(lab, 4); label_count != count) {
    format_error(labels, 4,
                 "label count " + std::to_string(label_count) + " does not match image count " + std::to_string(count));
  }
  expect_size(labels, lab, 8, count, "label payload");
  if (lab.size() != 8 + count) {
    format_error(labels, 8 + count, std::to_string(lab.size() - 8 - count) + " unexpected trailing bytes");
  }

  Dataset data;
  data.name = images.filename().string();
  data.classes = classes;
  data.features = Tensor::matrix(count, pixels);
  data.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char label = lab[8 + i];
    if (label >= classes) {
      format_error(labels, 8 + i,
                   "label " + std::to_string(label) + " outside [0," + std::to_string(classes) + ")");
    }
    data.labels[i] = label;
    for (std::size_t p = 0; p < pixels; ++p) data.features.at(i, p) = img[16 + i * pixels + p] / 255.0;
  }
  normalize(data);
  return data;
}

Dataset load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  auto where = [&](std::size_t line, std::size_t col) {
    return path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": ";
  };

  std::size_t dim = schema.dim;
  std::vector<double> values;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && schema.header) continue;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (dim == 0) {
      if (cells.size() < 2) fail(ErrorKind::format, where(line_no, 1) + "need at least one feature and a label");
      dim = cells.size() - 1;
    }
    if (cells.size() != dim + 1) {
      fail(ErrorKind::format, where(line_no, 1) + "expected " + std::to_string(dim + 1) + " columns, found " +
                                  std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const auto v = parse_double(cells[c]);
      if (!v) fail(ErrorKind::format, where(line_no, c + 1) + "not a number: '" + std::string(cells[c]) + "'");
      values.push_back(*v);
    }
    int label = 0;
    const std::string_view cell = trim(cells[dim]);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), label);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || label < 0) {
      fail(ErrorKind::format, where(line_no, dim + 1) + "not a class label: '" + std::string(cells[dim]) + "'");
    }
    if (schema.classes && static_cast<std::size_t>(label) >= schema.classes) {
      fail(ErrorKind::format, where(line_no, dim + 1) + "label " + std::to_string(label) + " outside [0," +
                                  std::to_string(schema.classes) + ")");
    }
    labels.push_back(label);
  }
  require(!labels.empty(), ErrorKind::format, path.string() + ": no data rows");

  Dataset data;
  data.name = path.filename().string();
  data.features = Tensor({labels.size(), dim}, std::move(values));
  data.labels = std::move(labels);
  if (schema.classes) {
    data.classes = schema.classes;
  } else {
    for (int l : data.labels) data.classes = std::max(data.classes, static_cast<std::size_t>(l) + 1);
  }
  data.validate();
  if (schema.normalize) normalize(data);
  return data;
}

void write_csv_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j) out << format_double(data.features.at(i, j)) << ',';
    out << data.labels[i] << '\n';
  }
  write_file_atomic(path, out.str());
}

Dataset load_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  const std::uint64_t data_seed = Rng::derive(seed, "dataset").next_u64();
  Dataset data;
  switch (spec.kind) {
    case DatasetKind::blobs:
      data = make_blobs(data_seed, spec.n, spec.classes, spec.dim, spec.sigma);
      normalize(data);
      break;
    case DatasetKind::moons:
      data = make_two_moons(data_seed, spec.n, spec.noise);
      normalize(data);
      break;
    case DatasetKind::csv: {
      CsvSchema schema;
      schema.header = spec.csv_header;
      data = load_csv_dataset(spec.csv_path, schema);
      break;
    }
    case DatasetKind::idx:
      data = load_idx(spec.idx_images, spec.idx_labels, spec.classes);
      break;
  }
  return data;
}

}  // namespace ssal
