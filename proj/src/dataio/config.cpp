#include "dataio/config.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "dataio/text_format.hpp"

namespace ssal {
namespace {

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Field {
  const char* key;
  Setter set;
  Getter get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  fail(ErrorKind::config, std::string(key) + ": expected " + expected + ", got '" + std::string(value) + "'");
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    bad_value(key, text, "a non-negative integer");
  }
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  const auto v = parse_double(text);
  if (!v || !std::isfinite(*v)) bad_value(key, text, "a finite number");
  return *v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text, "true or false");
}

template <class T>
Field size_field(const char* key, T ExperimentConfig::*member) {
  return {key, [=](ExperimentConfig& c, std::string_view v) { c.*member = static_cast<T>(parse_unsigned(key, v)); },
          [=](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

template <class Get>
Field size_field_at(const char* key, Get access) {
  return {key, [=](ExperimentConfig& c, std::string_view v) { access(c) = parse_unsigned(key, v); },
          [=](const ExperimentConfig& c) { return std::to_string(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Get>
Field real_field(const char* key, Get access) {
  return {key, [=](ExperimentConfig& c, std::string_view v) { access(c) = parse_real(key, v); },
          [=](const ExperimentConfig& c) { return format_double(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Get>
Field bool_field(const char* key, Get access) {
  return {key, [=](ExperimentConfig& c, std::string_view v) { access(c) = parse_bool(key, v); },
          [=](const ExperimentConfig& c) {
            return std::string(access(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          }};
}

template <class Get>
Field path_field(const char* key, Get access) {
  return {key, [=](ExperimentConfig& c, std::string_view v) { access(c) = std::string(trim(v)); },
          [=](const ExperimentConfig& c) { return access(const_cast<ExperimentConfig&>(c)).string(); }};
}

std::optional<DatasetKind> parse_kind(std::string_view s) {
  if (s == "blobs") return DatasetKind::blobs;
  if (s == "moons") return DatasetKind::moons;
  if (s == "csv") return DatasetKind::csv;
  if (s == "idx") return DatasetKind::idx;
  return std::nullopt;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using C = ExperimentConfig;
    std::vector<Field> f;
    f.push_back({"dataset",
                 [](C& c, std::string_view v) {
                   const auto kind = parse_kind(trim(v));
                   if (!kind) bad_value("dataset", v, "one of blobs, moons, csv, idx");
                   c.dataset.kind = *kind;
                 },
                 [](const C& c) { return std::string(dataset_kind_name(c.dataset.kind)); }});
    f.push_back(size_field_at("n", [](C& c) -> std::size_t& { return c.dataset.n; }));
    f.push_back(size_field_at("classes", [](C& c) -> std::size_t& { return c.dataset.classes; }));
    f.push_back(size_field_at("dim", [](C& c) -> std::size_t& { return c.dataset.dim; }));
    f.push_back(real_field("sigma", [](C& c) -> double& { return c.dataset.sigma; }));
    f.push_back(real_field("noise", [](C& c) -> double& { return c.dataset.noise; }));
    f.push_back(path_field("csv_path", [](C& c) -> std::filesystem::path& { return c.dataset.csv_path; }));
    f.push_back(bool_field("csv_header", [](C& c) -> bool& { return c.dataset.csv_header; }));
    f.push_back(path_field("idx_images", [](C& c) -> std::filesystem::path& { return c.dataset.idx_images; }));
    f.push_back(path_field("idx_labels", [](C& c) -> std::filesystem::path& { return c.dataset.idx_labels; }));
    f.push_back(real_field("test_fraction", [](C& c) -> double& { return c.dataset.test_fraction; }));

    f.push_back({"strategy", [](C& c, std::string_view v) { c.strategy = std::string(trim(v)); },
                 [](const C& c) { return c.strategy; }});
    f.push_back(size_field("seed", &C::seed));
    f.push_back(size_field("initial_labeled", &C::initial_labeled));
    f.push_back(size_field("budget", &C::budget));
    f.push_back(size_field("cycles", &C::cycles));

    f.push_back(real_field("tau", [](C& c) -> double& { return c.tau; }));
    f.push_back(real_field("lambda", [](C& c) -> double& { return c.lambda; }));
    f.push_back(real_field("beta", [](C& c) -> double& { return c.beta; }));
    f.push_back(real_field("eta", [](C& c) -> double& { return c.eta; }));
    f.push_back(bool_field("capl", [](C& c) -> bool& { return c.capl; }));

    f.push_back({"hidden_widths",
                 [](C& c, std::string_view v) {
                   std::vector<std::size_t> widths;
                   std::string_view rest = v;
                   while (true) {
                     const std::size_t comma = rest.find(',');
                     widths.push_back(parse_unsigned("hidden_widths", rest.substr(0, comma)));
                     if (comma == std::string_view::npos) break;
                     rest.remove_prefix(comma + 1);
                   }
                   c.hidden_widths = std::move(widths);
                 },
                 [](const C& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.hidden_widths.size(); ++i) {
                     if (i) s += ",";
                     s += std::to_string(c.hidden_widths[i]);
                   }
                   return s;
                 }});
    f.push_back(size_field("loss_head_width", &C::loss_head_width));
    f.push_back(size_field("latent_dim", &C::latent_dim));
    f.push_back(size_field("vae_hidden", &C::vae_hidden));
    f.push_back(size_field("disc_hidden", &C::disc_hidden));

    f.push_back(size_field("batch_size", &C::batch_size));
    f.push_back(size_field("supervised_epochs", &C::supervised_epochs));
    f.push_back(size_field("semi_epochs", &C::semi_epochs));
    f.push_back(real_field("learning_rate", [](C& c) -> double& { return c.learning_rate; }));
    f.push_back(real_field("momentum", [](C& c) -> double& { return c.momentum; }));
    f.push_back(real_field("weight_decay", [](C& c) -> double& { return c.weight_decay; }));

    f.push_back(size_field("adversarial_epochs", &C::adversarial_epochs));
    f.push_back(size_field("adversarial_batch", &C::adversarial_batch));
    f.push_back(real_field("adversarial_lr", [](C& c) -> double& { return c.adversarial_lr; }));

    f.push_back(size_field("sorter_length", &C::sorter_length));
    f.push_back(size_field("sorter_hidden", &C::sorter_hidden));
    f.push_back(size_field("sorter_epochs", &C::sorter_epochs));
    f.push_back(size_field("sorter_vectors_per_epoch", &C::sorter_vectors_per_epoch));
    f.push_back(size_field("sorter_batch", &C::sorter_batch));
    f.push_back(size_field("sorter_heldout", &C::sorter_heldout));
    f.push_back(real_field("sorter_lr", [](C& c) -> double& { return c.sorter_lr; }));
    f.push_back(path_field("sorter_checkpoint", [](C& c) -> std::filesystem::path& { return c.sorter_checkpoint; }));

    f.push_back(bool_field("record_wall_clock", [](C& c) -> bool& { return c.record_wall_clock; }));
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

void resolve(std::filesystem::path& p, const std::filesystem::path& base) {
  if (!p.empty() && p.is_relative() && !base.empty()) p = base / p;
}

}  // namespace

const char* dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::blobs: return "blobs";
    case DatasetKind::moons: return "moons";
    case DatasetKind::csv: return "csv";
    case DatasetKind::idx: return "idx";
  }
  return "?";
}

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  const Field* f = find_field(trim(key));
  require(f != nullptr, ErrorKind::config, "unknown config key '" + std::string(trim(key)) + "'");
  f->set(config, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.emplace_back(f.key);
  return keys;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  std::vector<std::string> errors;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!find_field(key)) {
      errors.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    try {
      set_config_value(config, key, value);
    } catch (const Error& e) {
      errors.push_back(where + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " config error(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    fail(ErrorKind::config, msg);
  }
  resolve(config.dataset.csv_path, base_dir);
  resolve(config.dataset.idx_images, base_dir);
  resolve(config.dataset.idx_labels, base_dir);
  resolve(config.sorter_checkpoint, base_dir);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

std::vector<std::string> config_problems(const ExperimentConfig& c) {
  std::vector<std::string> p;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) p.push_back(msg);
  };
  const DatasetSpec& d = c.dataset;
  if (d.kind == DatasetKind::blobs || d.kind == DatasetKind::moons) {
    check(d.n >= 2, "n must be at least 2");
    check(d.sigma >= 0, "sigma must be non-negative");
    check(d.noise >= 0, "noise must be non-negative");
  }
  if (d.kind == DatasetKind::blobs) {
    check(d.classes >= 2, "classes must be at least 2 for blobs");
    check(d.dim >= 1, "dim must be at least 1");
  }
  if (d.kind == DatasetKind::csv) check(!d.csv_path.empty(), "dataset = csv needs csv_path");
  if (d.kind == DatasetKind::idx) {
    check(!d.idx_images.empty(), "dataset = idx needs idx_images");
    check(!d.idx_labels.empty(), "dataset = idx needs idx_labels");
    check(d.classes >= 2, "classes must be at least 2 for idx");
  }
  check(d.test_fraction > 0 && d.test_fraction < 1, "test_fraction must lie in (0, 1)");

  check(c.initial_labeled >= 1, "initial_labeled must be at least 1");
  check(c.budget >= 1, "budget must be at least 1");
  check(c.tau > 0 && c.tau < 1, "tau must lie in (0, 1)");
  check(c.lambda >= 0, "lambda must be non-negative");
  check(c.beta >= 0, "beta must be non-negative");
  check(c.eta >= 0, "eta must be non-negative");

  check(c.hidden_widths.size() >= 2, "hidden_widths needs at least two blocks (the loss head taps two or more)");
  for (std::size_t w : c.hidden_widths) check(w >= 1, "hidden_widths entries must be positive");
  check(c.loss_head_width >= 1, "loss_head_width must be positive");
  check(c.latent_dim >= 1, "latent_dim must be positive");
  check(c.vae_hidden >= 1, "vae_hidden must be positive");
  check(c.disc_hidden >= 1, "disc_hidden must be positive");

  check(c.batch_size >= 1, "batch_size must be positive");
  check(c.learning_rate > 0, "learning_rate must be positive");
  check(c.momentum >= 0 && c.momentum < 1, "momentum must lie in [0, 1)");
  check(c.weight_decay >= 0, "weight_decay must be non-negative");
  check(c.adversarial_batch >= 1, "adversarial_batch must be positive");
  check(c.adversarial_lr > 0, "adversarial_lr must be positive");

  check(c.sorter_length >= 2, "sorter_length must be at least 2");
  check(c.sorter_hidden >= 1, "sorter_hidden must be positive");
  check(c.sorter_batch >= 1, "sorter_batch must be positive");
  check(c.sorter_vectors_per_epoch >= 1, "sorter_vectors_per_epoch must be positive");
  check(c.sorter_heldout >= 1, "sorter_heldout must be positive");
  check(c.sorter_lr > 0, "sorter_lr must be positive");
  return p;
}

void validate_config(const ExperimentConfig& config) {
  const auto problems = config_problems(config);
  if (problems.empty()) return;
  std::string msg = std::to_string(problems.size()) + " config error(s):";
  for (const auto& e : problems) msg += "\n  " + e;
  fail(ErrorKind::config, msg);
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    const std::string v = f.get(config);
    if (v.empty()) continue;
    out += f.key;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

SorterTrainConfig sorter_train_config(const ExperimentConfig& c) {
  SorterTrainConfig s;
  s.length = c.sorter_length;
  s.hidden = c.sorter_hidden;
  s.epochs = c.sorter_epochs;
  s.vectors_per_epoch = c.sorter_vectors_per_epoch;
  s.batch = c.sorter_batch;
  s.heldout = c.sorter_heldout;
  s.learning_rate = c.sorter_lr;
  s.seed = c.seed;
  return s;
}

}  // namespace ssal
