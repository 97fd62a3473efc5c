/* Semi-supervised variational adversarial active learning: C interface.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an ssal_status; on
 * failure ssal_last_error() describes the problem for the calling thread.
 * Handles are not synchronized: use one handle per thread, except sorters,
 * which are read-only once built and may be shared by concurrent runs.
 */
#ifndef SSAL_SSAL_H
#define SSAL_SSAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(SSAL_BUILDING_LIBRARY)
#define SSAL_API __attribute__((visibility("default")))
#else
#define SSAL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssal_status {
  SSAL_OK = 0,
  SSAL_INVALID_ARGUMENT = 1, /* null handle or pointer, index out of range */
  SSAL_CONFIG = 2,           /* bad configuration or strategy/sorter mismatch */
  SSAL_STRUCTURAL = 3,       /* shape or contract violation */
  SSAL_NUMERIC = 4,          /* NaN / Inf during training */
  SSAL_FORMAT = 5,           /* malformed input file */
  SSAL_IO = 6,               /* filesystem failure */
  SSAL_CHECKPOINT = 7,       /* checksum or version failure */
  SSAL_INTERNAL = 8
} ssal_status;

typedef struct ssal_config ssal_config;
typedef struct ssal_sorter ssal_sorter;
typedef struct ssal_run ssal_run;
typedef struct ssal_metrics ssal_metrics;

/* Message of the last failure on this thread; empty after success. */
SSAL_API const char* ssal_last_error(void);
SSAL_API const char* ssal_status_name(ssal_status status);
SSAL_API const char* ssal_version(void);

/* Progress lines (human readable) are passed to this callback when given. */
typedef void (*ssal_progress_fn)(const char* line, void* user);

/* ---- configuration ---------------------------------------------------- */

SSAL_API ssal_status ssal_config_new(ssal_config** out);
SSAL_API ssal_status ssal_config_load(const char* path, ssal_config** out);
SSAL_API ssal_status ssal_config_parse(const char* text, ssal_config** out);
SSAL_API ssal_status ssal_config_set(ssal_config* config, const char* key, const char* value);
/* Copies the canonical value text into buf (always NUL terminated); *needed
 * receives the full length including the terminator. */
SSAL_API ssal_status ssal_config_get(const ssal_config* config, const char* key, char* buf, size_t size,
                                     size_t* needed);
SSAL_API ssal_status ssal_config_validate(const ssal_config* config);
SSAL_API void ssal_config_free(ssal_config* config);

/* Nonzero when the named strategy trains with the ranking loss. */
SSAL_API int ssal_strategy_uses_ranking(const char* strategy);

/* ---- sorter ----------------------------------------------------------- */

/* Pretrains with the config's sorter_* settings and the given seed. */
SSAL_API ssal_status ssal_sorter_pretrain(const ssal_config* config, uint64_t seed, ssal_progress_fn progress,
                                          void* user, ssal_sorter** out);
SSAL_API ssal_status ssal_sorter_load(const char* path, ssal_sorter** out);
SSAL_API ssal_status ssal_sorter_save(const ssal_sorter* sorter, const char* path);
/* Held-out score recorded by pretraining (NaN for a loaded sorter). */
SSAL_API double ssal_sorter_heldout_spearman(const ssal_sorter* sorter);
/* Mean Spearman on the held-out set the config describes for `seed`. */
SSAL_API ssal_status ssal_sorter_evaluate(const ssal_sorter* sorter, const ssal_config* config, uint64_t seed,
                                          double* spearman);
SSAL_API size_t ssal_sorter_length(const ssal_sorter* sorter);
SSAL_API void ssal_sorter_free(ssal_sorter* sorter);

/* ---- experiments ------------------------------------------------------ */

typedef struct ssal_cycle_metrics {
  size_t cycle;
  size_t labeled_count;
  double test_accuracy;
  size_t pseudo_count;
  double pseudo_error_rate; /* NaN when no pseudo labels apply */
  double disc_acc;          /* NaN without a discriminator */
  double vae_loss;          /* NaN without a VAE */
  double seconds;           /* 0 unless record_wall_clock is set */
} ssal_cycle_metrics;

/* strategy and seed override the config when non-NULL / always respectively.
 * sorter may be NULL for strategies that do not rank. */
SSAL_API ssal_status ssal_run_experiment(const ssal_config* config, const char* strategy, uint64_t seed,
                                         const ssal_sorter* sorter, ssal_progress_fn progress, void* user,
                                         ssal_run** out);
SSAL_API size_t ssal_run_cycle_count(const ssal_run* run);
SSAL_API ssal_status ssal_run_get_cycle(const ssal_run* run, size_t index, ssal_cycle_metrics* out);
SSAL_API ssal_status ssal_run_write_metrics(const ssal_run* run, const char* path);
SSAL_API ssal_status ssal_run_save_model(const ssal_run* run, const char* path);
SSAL_API void ssal_run_free(ssal_run* run);

/* ---- metrics files ---------------------------------------------------- */

SSAL_API ssal_status ssal_metrics_read(const char* path, ssal_metrics** out);
SSAL_API size_t ssal_metrics_count(const ssal_metrics* metrics);
SSAL_API ssal_status ssal_metrics_get(const ssal_metrics* metrics, size_t index, ssal_cycle_metrics* out);
SSAL_API void ssal_metrics_free(ssal_metrics* metrics);

/* ---- evaluation ------------------------------------------------------- */

/* Accuracy of a saved target model on the test split the config describes
 * for `seed`. */
SSAL_API ssal_status ssal_evaluate(const char* checkpoint, const ssal_config* config, uint64_t seed,
                                   double* accuracy);

#ifdef __cplusplus
}
#endif

#endif /* SSAL_SSAL_H */
