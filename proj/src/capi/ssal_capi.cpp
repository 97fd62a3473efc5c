#include "ssal/ssal.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "alcore/experiment.hpp"
#include "alcore/target_training.hpp"
#include "common/error.hpp"
#include "dataio/config.hpp"
#include "dataio/metrics.hpp"
#include "dataio/model_io.hpp"
#include "ranking/sorter.hpp"

struct ssal_config {
  ssal::ExperimentConfig value;
};

struct ssal_sorter {
  // Held mutably because Ranker::soft_ranks is non-const; a frozen graph
  // never writes to the weights, so sharing across threads is safe.
  mutable ssal::LstmSorter sorter;
  double heldout_spearman = std::numeric_limits<double>::quiet_NaN();
};

struct ssal_run {
  ssal::ExperimentResult result;
};

struct ssal_metrics {
  std::vector<ssal::MetricsRow> rows;
};

namespace {

thread_local std::string last_error;

ssal_status status_of(ssal::ErrorKind kind) {
  switch (kind) {
    case ssal::ErrorKind::structural: return SSAL_STRUCTURAL;
    case ssal::ErrorKind::numeric: return SSAL_NUMERIC;
    case ssal::ErrorKind::config: return SSAL_CONFIG;
    case ssal::ErrorKind::format: return SSAL_FORMAT;
    case ssal::ErrorKind::io: return SSAL_IO;
    case ssal::ErrorKind::checkpoint: return SSAL_CHECKPOINT;
  }
  return SSAL_INTERNAL;
}

template <class F>
ssal_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return SSAL_OK;
  } catch (const ssal::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SSAL_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SSAL_INTERNAL;
  }
}

ssal_status invalid(const char* what) {
  last_error = what;
  return SSAL_INVALID_ARGUMENT;
}

ssal::ProgressFn wrap(ssal_progress_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& line) { fn(line.c_str(), user); };
}

ssal_cycle_metrics to_c(const ssal::MetricsRow& r) {
  return {r.cycle, r.labeled_count, r.test_accuracy, r.pseudo_count, r.pseudo_error_rate,
          r.disc_acc, r.vae_loss, r.seconds};
}

}  // namespace

extern "C" {

const char* ssal_last_error(void) { return last_error.c_str(); }

const char* ssal_status_name(ssal_status status) {
  switch (status) {
    case SSAL_OK: return "ok";
    case SSAL_INVALID_ARGUMENT: return "invalid argument";
    case SSAL_CONFIG: return "config error";
    case SSAL_STRUCTURAL: return "structural error";
    case SSAL_NUMERIC: return "numeric error";
    case SSAL_FORMAT: return "format error";
    case SSAL_IO: return "i/o error";
    case SSAL_CHECKPOINT: return "checkpoint error";
    case SSAL_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ssal_version(void) { return "0.1.0"; }

ssal_status ssal_config_new(ssal_config** out) {
  if (!out) return invalid("ssal_config_new: out is null");
  return guarded([&] { *out = new ssal_config{}; });
}

ssal_status ssal_config_load(const char* path, ssal_config** out) {
  if (!path || !out) return invalid("ssal_config_load: null argument");
  return guarded([&] { *out = new ssal_config{ssal::load_config(path)}; });
}

ssal_status ssal_config_parse(const char* text, ssal_config** out) {
  if (!text || !out) return invalid("ssal_config_parse: null argument");
  return guarded([&] { *out = new ssal_config{ssal::parse_config(text)}; });
}

ssal_status ssal_config_set(ssal_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("ssal_config_set: null argument");
  return guarded([&] { ssal::set_config_value(config->value, key, value); });
}

ssal_status ssal_config_get(const ssal_config* config, const char* key, char* buf, size_t size, size_t* needed) {
  if (!config || !key) return invalid("ssal_config_get: null argument");
  return guarded([&] {
    const std::string text = ssal::format_config(config->value);
    const std::string prefix = std::string(key) + " = ";
    std::string value;
    bool found = false;
    for (std::size_t pos = 0; pos < text.size();) {
      const std::size_t nl = text.find('\n', pos);
      const std::string line = text.substr(pos, nl - pos);
      if (line.rfind(prefix, 0) == 0) {
        value = line.substr(prefix.size());
        found = true;
        break;
      }
      pos = nl + 1;
    }
    if (!found) {
      bool known = false;
      for (const auto& k : ssal::config_keys()) known = known || k == key;
      ssal::require(known, ssal::ErrorKind::config, std::string("unknown config key '") + key + "'");
    }
    if (needed) *needed = value.size() + 1;
    if (buf && size > 0) {
      const std::size_t n = std::min(size - 1, value.size());
      std::memcpy(buf, value.data(), n);
      buf[n] = '\0';
    }
  });
}

ssal_status ssal_config_validate(const ssal_config* config) {
  if (!config) return invalid("ssal_config_validate: config is null");
  return guarded([&] {
    ssal::validate_experiment(config->value, /*sorter_available=*/true);
  });
}

void ssal_config_free(ssal_config* config) { delete config; }

int ssal_strategy_uses_ranking(const char* strategy) {
  if (!strategy) return 0;
  const auto kind = ssal::parse_strategy(strategy);
  return kind && ssal::strategy_traits(*kind).ranking ? 1 : 0;
}

ssal_status ssal_sorter_pretrain(const ssal_config* config, uint64_t seed, ssal_progress_fn progress, void* user,
                                 ssal_sorter** out) {
  if (!config || !out) return invalid("ssal_sorter_pretrain: null argument");
  return guarded([&] {
    ssal::validate_config(config->value);
    ssal::SorterTrainConfig tc = ssal::sorter_train_config(config->value);
    tc.seed = seed;
    ssal::PretrainedSorter trained = ssal::pretrain_sorter(tc, wrap(progress, user));
    *out = new ssal_sorter{std::move(trained.sorter), trained.report.heldout_spearman};
  });
}

ssal_status ssal_sorter_load(const char* path, ssal_sorter** out) {
  if (!path || !out) return invalid("ssal_sorter_load: null argument");
  return guarded([&] { *out = new ssal_sorter{ssal::load_sorter(path)}; });
}

ssal_status ssal_sorter_save(const ssal_sorter* sorter, const char* path) {
  if (!sorter || !path) return invalid("ssal_sorter_save: null argument");
  return guarded([&] { ssal::save_sorter(path, sorter->sorter); });
}

double ssal_sorter_heldout_spearman(const ssal_sorter* sorter) {
  return sorter ? sorter->heldout_spearman : std::numeric_limits<double>::quiet_NaN();
}

ssal_status ssal_sorter_evaluate(const ssal_sorter* sorter, const ssal_config* config, uint64_t seed,
                                 double* spearman) {
  if (!sorter || !config || !spearman) return invalid("ssal_sorter_evaluate: null argument");
  return guarded([&] {
    ssal::SorterTrainConfig tc = ssal::sorter_train_config(config->value);
    tc.seed = seed;
    ssal::require(tc.length == sorter->sorter.length(), ssal::ErrorKind::config,
                  "sorter length " + std::to_string(sorter->sorter.length()) + " does not match sorter_length " +
                      std::to_string(tc.length));
    *spearman = ssal::mean_spearman(sorter->sorter, ssal::sorter_heldout_set(tc));
  });
}

size_t ssal_sorter_length(const ssal_sorter* sorter) { return sorter ? sorter->sorter.length() : 0; }

void ssal_sorter_free(ssal_sorter* sorter) { delete sorter; }

ssal_status ssal_run_experiment(const ssal_config* config, const char* strategy, uint64_t seed,
                                const ssal_sorter* sorter, ssal_progress_fn progress, void* user, ssal_run** out) {
  if (!config || !out) return invalid("ssal_run_experiment: null argument");
  return guarded([&] {
    ssal::ExperimentConfig cfg = config->value;
    if (strategy) cfg.strategy = strategy;
    cfg.seed = seed;
    ssal::RunHooks hooks;
    hooks.progress = wrap(progress, user);
    ssal::Ranker* ranker = sorter ? &sorter->sorter : nullptr;
    *out = new ssal_run{ssal::run_experiment(cfg, ranker, hooks)};
  });
}

size_t ssal_run_cycle_count(const ssal_run* run) { return run ? run->result.cycles.size() : 0; }

ssal_status ssal_run_get_cycle(const ssal_run* run, size_t index, ssal_cycle_metrics* out) {
  if (!run || !out) return invalid("ssal_run_get_cycle: null argument");
  if (index >= run->result.cycles.size()) return invalid("ssal_run_get_cycle: index out of range");
  *out = to_c(run->result.cycles[index].row);
  last_error.clear();
  return SSAL_OK;
}

ssal_status ssal_run_write_metrics(const ssal_run* run, const char* path) {
  if (!run || !path) return invalid("ssal_run_write_metrics: null argument");
  return guarded([&] { ssal::write_metrics(path, run->result.rows()); });
}

ssal_status ssal_run_save_model(const ssal_run* run, const char* path) {
  if (!run || !path) return invalid("ssal_run_save_model: null argument");
  return guarded([&] {
    ssal::TargetModel copy = run->result.final_model;
    ssal::save_target_model(path, copy);
  });
}

void ssal_run_free(ssal_run* run) { delete run; }

ssal_status ssal_metrics_read(const char* path, ssal_metrics** out) {
  if (!path || !out) return invalid("ssal_metrics_read: null argument");
  return guarded([&] { *out = new ssal_metrics{ssal::read_metrics(path)}; });
}

size_t ssal_metrics_count(const ssal_metrics* metrics) { return metrics ? metrics->rows.size() : 0; }

ssal_status ssal_metrics_get(const ssal_metrics* metrics, size_t index, ssal_cycle_metrics* out) {
  if (!metrics || !out) return invalid("ssal_metrics_get: null argument");
  if (index >= metrics->rows.size()) return invalid("ssal_metrics_get: index out of range");
  *out = to_c(metrics->rows[index]);
  last_error.clear();
  return SSAL_OK;
}

void ssal_metrics_free(ssal_metrics* metrics) { delete metrics; }

ssal_status ssal_evaluate(const char* checkpoint, const ssal_config* config, uint64_t seed, double* accuracy) {
  if (!checkpoint || !config || !accuracy) return invalid("ssal_evaluate: null argument");
  return guarded([&] {
    ssal::ExperimentConfig cfg = config->value;
    cfg.seed = seed;
    ssal::validate_config(cfg);
    const ssal::ExperimentData data = ssal::prepare_data(cfg);
    ssal::TargetModel model =
        ssal::load_target_model(checkpoint, ssal::target_config_for(cfg, data.test.dim(), data.test.classes));
    *accuracy = ssal::accuracy(model, data.test);
  });
}

}  // extern "C"
