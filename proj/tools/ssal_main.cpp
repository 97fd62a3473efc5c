// Command-line front end. Everything goes through the C API in ssal/ssal.h.
//
// Exit codes: 0 success, 2 usage or configuration error, 1 runtime error.
// Progress goes to stderr; results go to files and stdout.

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ssal/ssal.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr const char* kOutputEnv = "SSAL_OUTPUT_DIR";

struct Failure {
  int code;
  std::string message;
};

int exit_code(ssal_status s) {
  return (s == SSAL_CONFIG || s == SSAL_INVALID_ARGUMENT) ? kExitUsage : kExitRuntime;
}

void check(ssal_status s, const std::string& context) {
  if (s != SSAL_OK) throw Failure{exit_code(s), context + ": " + ssal_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (ptr) Free(ptr);
  }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};
using Config = Handle<ssal_config, ssal_config_free>;
using Sorter = Handle<ssal_sorter, ssal_sorter_free>;
using Run = Handle<ssal_run, ssal_run_free>;

void progress_to_stderr(const char* line, void*) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::fprintf(stderr, "%s\n", line);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string config_value(const Config& cfg, const char* key) {
  size_t needed = 0;
  check(ssal_config_get(cfg.get(), key, nullptr, 0, &needed), "config");
  std::string buf(needed, '\0');
  check(ssal_config_get(cfg.get(), key, buf.data(), buf.size(), nullptr), "config");
  buf.resize(needed - 1);
  return buf;
}

fs::path output_dir(const std::string& flag, const char* name) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  throw Failure{kExitUsage, std::string(name) + " is required (or set " + kOutputEnv + ")"};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitRuntime, "cannot create " + dir.string() + ": " + ec.message()};
}

// Loads a sorter from --sorter or the config's sorter_checkpoint when the
// strategy needs one; leaves `sorter` empty otherwise.
void maybe_load_sorter(const Config& cfg, const std::string& strategy, const std::string& flag, Sorter& sorter) {
  std::string path = flag.empty() ? config_value(cfg, "sorter_checkpoint") : flag;
  if (path.empty()) return;
  if (!ssal_strategy_uses_ranking(strategy.c_str())) return;
  check(ssal_sorter_load(path.c_str(), sorter.out()), "loading sorter " + path);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  auto number = [&](const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw Failure{kExitUsage, "--seeds: '" + s + "' is not a seed"};
    }
    return v;
  };
  while (std::getline(in, item, ',')) {
    if (const auto dash = item.find('-'); dash != std::string::npos) {
      const std::uint64_t lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
      if (hi < lo) throw Failure{kExitUsage, "--seeds: empty range " + item};
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(number(item));
    }
  }
  return seeds;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct RunOptions {
  std::string config, strategy, out_dir, sorter;
  std::uint64_t seed = 0;
};

int cmd_run(const RunOptions& o) {
  Config cfg;
  check(ssal_config_load(o.config.c_str(), cfg.out()), "config");
  const std::string strategy = o.strategy.empty() ? config_value(cfg, "strategy") : o.strategy;
  check(ssal_config_set(cfg.get(), "strategy", strategy.c_str()), "--strategy");
  check(ssal_config_set(cfg.get(), "seed", std::to_string(o.seed).c_str()), "--seed");
  const fs::path dir = output_dir(o.out_dir, "--out-dir");
  Sorter sorter;
  maybe_load_sorter(cfg, strategy, o.sorter, sorter);
  Run run;
  check(ssal_run_experiment(cfg.get(), strategy.c_str(), o.seed, sorter.get(), progress_to_stderr, nullptr,
                            run.out()),
        "run");
  ensure_dir(dir);
  check(ssal_run_write_metrics(run.get(), (dir / "metrics.csv").c_str()), "writing metrics");
  check(ssal_run_save_model(run.get(), (dir / "model.ckpt").c_str()), "writing model");
  const size_t n = ssal_run_cycle_count(run.get());
  ssal_cycle_metrics last{};
  if (n > 0) check(ssal_run_get_cycle(run.get(), n - 1, &last), "metrics");
  std::cout << fmt(last.test_accuracy) << '\n';
  return kExitOk;
}

int cmd_pretrain(const std::string& config, const std::string& out, std::uint64_t seed) {
  Config cfg;
  check(ssal_config_load(config.c_str(), cfg.out()), "config");
  Sorter sorter;
  check(ssal_sorter_pretrain(cfg.get(), seed, progress_to_stderr, nullptr, sorter.out()), "pretraining");
  const fs::path path(out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  check(ssal_sorter_save(sorter.get(), out.c_str()), "saving sorter");
  std::cout << "heldout_spearman=" << fmt(ssal_sorter_heldout_spearman(sorter.get())) << " checkpoint=" << out
            << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& dataset, std::optional<std::uint64_t> seed) {
  Config cfg;
  check(ssal_config_load(dataset.c_str(), cfg.out()), "dataset config");
  const std::uint64_t s = seed ? *seed : std::stoull(config_value(cfg, "seed"));
  double acc = 0.0;
  check(ssal_evaluate(checkpoint.c_str(), cfg.get(), s, &acc), "eval");
  std::cout << fmt(acc) << '\n';
  return kExitOk;
}

struct CompareOptions {
  std::string config, strategies, seeds, out, sorter;
  unsigned jobs = 1;
};

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{kExitRuntime, "cannot write " + path.string()};
}

int cmd_compare(const CompareOptions& o) {
  const std::vector<std::string> strategies = split_list(o.strategies);
  const std::vector<std::uint64_t> seeds = parse_seeds(o.seeds);
  if (strategies.size() < 2) throw Failure{kExitUsage, "--strategies needs at least two strategies"};
  if (seeds.size() < 2) throw Failure{kExitUsage, "--seeds needs at least two seeds"};

  Config cfg;
  check(ssal_config_load(o.config.c_str(), cfg.out()), "config");
  bool any_ranking = false;
  for (const auto& s : strategies) {
    check(ssal_config_set(cfg.get(), "strategy", s.c_str()), "--strategies");
    check(ssal_config_validate(cfg.get()), "strategy " + s);
    any_ranking = any_ranking || ssal_strategy_uses_ranking(s.c_str());
  }
  Sorter sorter;
  if (any_ranking) {
    const std::string path = o.sorter.empty() ? config_value(cfg, "sorter_checkpoint") : o.sorter;
    if (!path.empty()) check(ssal_sorter_load(path.c_str(), sorter.out()), "loading sorter " + path);
  }
  const fs::path out = output_dir(o.out, "--out");
  ensure_dir(out / "runs");

  struct Job {
    std::string strategy;
    std::uint64_t seed;
    std::vector<ssal_cycle_metrics> cycles;
  };
  std::vector<Job> jobs;
  for (const auto& s : strategies)
    for (std::uint64_t seed : seeds) jobs.push_back({s, seed, {}});

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex fail_mu;
  std::optional<Failure> first_failure;
  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= jobs.size()) return;
      Job& job = jobs[i];
      const std::string label = job.strategy + " seed " + std::to_string(job.seed);
      try {
        Run run;
        check(ssal_run_experiment(cfg.get(), job.strategy.c_str(), job.seed, sorter.get(), progress_to_stderr,
                                  nullptr, run.out()),
              "run (" + label + ")");
        const fs::path dir = out / "runs" / (job.strategy + "_seed" + std::to_string(job.seed));
        ensure_dir(dir);
        check(ssal_run_write_metrics(run.get(), (dir / "metrics.csv").c_str()), "metrics (" + label + ")");
        job.cycles.resize(ssal_run_cycle_count(run.get()));
        for (size_t c = 0; c < job.cycles.size(); ++c) check(ssal_run_get_cycle(run.get(), c, &job.cycles[c]), label);
      } catch (const Failure& f) {
        std::lock_guard lock(fail_mu);
        if (!first_failure) first_failure = f;
        failed = true;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_failure) throw *first_failure;

  // Merge in a fixed (strategy, seed) order regardless of completion order.
  std::ostringstream summary;
  summary << "strategy,cycle,labeled_count,runs,mean_accuracy,std_accuracy\n";
  std::map<std::string, std::map<std::uint64_t, const Job*>> by;
  for (const Job& j : jobs) by[j.strategy][j.seed] = &j;
  for (const auto& s : strategies) {
    const std::size_t cycles = by[s].begin()->second->cycles.size();
    for (std::size_t c = 0; c < cycles; ++c) {
      std::vector<double> acc;
      for (std::uint64_t seed : seeds) acc.push_back(by[s][seed]->cycles[c].test_accuracy);
      summary << s << ',' << c + 1 << ',' << by[s].begin()->second->cycles[c].labeled_count << ',' << acc.size()
              << ',' << fmt(mean(acc)) << ',' << fmt(sample_std(acc)) << '\n';
    }
  }
  write_text(out / "summary.csv", summary.str());
  std::cout << summary.str();

  if (by.count("ssvaal") && by.count("random")) {
    std::ostringstream paired;
    paired << "seed,cycle,ssvaal_accuracy,random_accuracy,difference\n";
    const std::size_t cycles = by["ssvaal"].begin()->second->cycles.size();
    for (std::uint64_t seed : seeds) {
      for (std::size_t c = 0; c < cycles; ++c) {
        const double a = by["ssvaal"][seed]->cycles[c].test_accuracy;
        const double b = by["random"][seed]->cycles[c].test_accuracy;
        paired << seed << ',' << c + 1 << ',' << fmt(a) << ',' << fmt(b) << ',' << fmt(a - b) << '\n';
      }
    }
    write_text(out / "paired.csv", paired.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised variational adversarial active learning on desk-scale data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ssal_version()));
  app.footer(std::string("Environment: ") + kOutputEnv + " is the default for --out-dir / --out.");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run one active-learning experiment");
  run->add_option("--config", run_opts.config, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", run_opts.strategy,
                  "ssvaal, ssvaal-ranking-only, ssvaal-capl-only, ssvaal-plain-pl, random, entropy or maxloss "
                  "(default: the config's)");
  run->add_option("--seed", run_opts.seed, "Seed for every random stream")->required();
  run->add_option("--out-dir", run_opts.out_dir, "Directory for metrics.csv and model.ckpt");
  run->add_option("--sorter", run_opts.sorter, "Sorter checkpoint (overrides sorter_checkpoint)");

  std::string pre_config, pre_out;
  std::uint64_t pre_seed = 0;
  auto* pre = app.add_subcommand("pretrain-sorter", "Pretrain the differentiable sorter on synthetic data");
  pre->add_option("--config", pre_config, "Config file with sorter_* settings")->required()->check(CLI::ExistingFile);
  pre->add_option("--out", pre_out, "Checkpoint file to write")->required();
  pre->add_option("--seed", pre_seed, "Seed")->required();

  std::string eval_ckpt, eval_data;
  std::optional<std::uint64_t> eval_seed;
  auto* eval = app.add_subcommand("eval", "Test accuracy of a saved target model");
  eval->add_option("--checkpoint", eval_ckpt, "model.ckpt written by run")->required()->check(CLI::ExistingFile);
  eval->add_option("--dataset", eval_data, "Config file describing the dataset and architecture")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--seed", eval_seed, "Seed the run used (default: the config's)");

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Paired comparison of strategies over seeds");
  compare->add_option("--config", cmp.config, "Experiment config file")->required()->check(CLI::ExistingFile);
  compare->add_option("--strategies", cmp.strategies, "Comma-separated strategies (at least two)")->required();
  compare->add_option("--seeds", cmp.seeds, "Seeds, e.g. 0-9 or 1,2,3 (at least two)")->required();
  compare->add_option("--out", cmp.out, "Directory for runs/, summary.csv and paired.csv");
  compare->add_option("--jobs", cmp.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  compare->add_option("--sorter", cmp.sorter, "Sorter checkpoint (overrides sorter_checkpoint)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*pre) return cmd_pretrain(pre_config, pre_out, pre_seed);
    if (*eval) return cmd_eval(eval_ckpt, eval_data, eval_seed);
    if (*compare) return cmd_compare(cmp);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
