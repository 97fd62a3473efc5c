#include "dataio/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "common/error.hpp"
#include "dataio/text_format.hpp"

namespace ssal {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'A', 'L', 'F', 'G'};

std::uint32_t crc32_of(const unsigned char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  while (n > 0) {
    const uInt piece = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, piece);
    data += piece;
    n -= piece;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

class Reader {
 public:
  Reader(const std::filesystem::path& path, const std::vector<unsigned char>& bytes, std::size_t end)
      : path_(path), bytes_(bytes), end_(end) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v;
    std::memcpy(&v, bytes_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }
  const unsigned char* take(std::size_t n, const char* what) {
    need(n, what);
    const unsigned char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (end_ - pos_ < n) {
      fail(ErrorKind::checkpoint, path_.string() + ": truncated " + what + " at byte " + std::to_string(pos_));
    }
  }
  const std::filesystem::path& path_;
  const std::vector<unsigned char>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open checkpoint " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, std::span<const NamedTensor> blocks) {
  std::string out(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(blocks.size()));
  for (const NamedTensor& b : blocks) {
    require(b.value.all_finite(), ErrorKind::numeric, "checkpoint block '" + b.name + "' is not finite");
    put_u32(out, static_cast<std::uint32_t>(b.name.size()));
    out += b.name;
    put_u32(out, static_cast<std::uint32_t>(b.value.shape().size()));
    for (std::size_t d : b.value.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : b.value.values()) {
      const float f = static_cast<float>(v);
      char raw[4];
      std::memcpy(raw, &f, 4);
      out.append(raw, 4);
    }
  }
  put_u32(out, crc32_of(reinterpret_cast<const unsigned char*>(out.data()), out.size()));
  write_file_atomic(path, out);
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = slurp(path);
  const std::string where = path.string() + ": ";
  require(bytes.size() >= 16, ErrorKind::checkpoint,
          where + "file too short for a checkpoint (" + std::to_string(bytes.size()) + " bytes)");
  require(std::memcmp(bytes.data(), kMagic, 4) == 0, ErrorKind::checkpoint, where + "bad magic, not a checkpoint");

  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  const std::uint32_t actual = crc32_of(bytes.data(), body);
  require(stored == actual, ErrorKind::checkpoint, where + "checksum mismatch (file is corrupt)");

  Reader r(path, bytes, body);
  r.take(4, "magic");
  const std::uint32_t version = r.u32("version");
  require(version == kCheckpointVersion, ErrorKind::checkpoint,
          where + "unsupported checkpoint version " + std::to_string(version) + " (expected " +
              std::to_string(kCheckpointVersion) + ")");
  const std::uint32_t count = r.u32("block count");
  std::vector<NamedTensor> blocks;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor b;
    const std::uint32_t name_len = r.u32("name length");
    const unsigned char* name = r.take(name_len, "block name");
    b.name.assign(reinterpret_cast<const char*>(name), name_len);
    const std::uint32_t rank = r.u32("rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.u32("dimension");
    const std::size_t n = shape_size(shape);
    const unsigned char* payload = r.take(n * 4, "payload");
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) {
      float f;
      std::memcpy(&f, payload + 4 * k, 4);
      values[k] = f;
    }
    b.value = Tensor(std::move(shape), std::move(values));
    blocks.push_back(std::move(b));
  }
  require(r.pos() == body, ErrorKind::checkpoint,
          where + std::to_string(body - r.pos()) + " unexpected bytes after the last block");
  return blocks;
}

std::vector<NamedTensor> to_named(std::span<Parameter* const> params) {
  std::vector<NamedTensor> out;
  out.reserve(params.size());
  for (const Parameter* p : params) out.push_back({p->name, p->value});
  return out;
}

void assign_named(std::span<Parameter* const> params, std::span<const NamedTensor> blocks) {
  std::map<std::string, const NamedTensor*, std::less<>> by_name;
  for (const NamedTensor& b : blocks) by_name[b.name] = &b;
  for (Parameter* p : params) {
    const auto it = by_name.find(p->name);
    require(it != by_name.end(), ErrorKind::structural, "checkpoint has no block '" + p->name + "'");
    const Tensor& v = it->second->value;
    require(v.shape() == p->value.shape(), ErrorKind::structural,
            "block '" + p->name + "': expected shape " + shape_string(p->value.shape()) + ", found " +
                shape_string(v.shape()));
    p->value = v;
    by_name.erase(it);
  }
  if (!by_name.empty()) {
    fail(ErrorKind::structural, "checkpoint block '" + by_name.begin()->first + "' matches no parameter");
  }
}

void round_to_checkpoint_precision(std::span<Parameter* const> params) {
  for (Parameter* p : params)
    for (double& v : p->value.values()) v = static_cast<double>(static_cast<float>(v));
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return crc32_of(bytes.data(), bytes.size());
}

}  // namespace ssal
