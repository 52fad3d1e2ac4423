/*
 * tcva - temperature-controlled verdict aggregation for AI-system evaluation.
 *
 * C interface to the shared library: plain functions for the scoring math
 * and statistics, opaque handles for datasets and verdict caches, and
 * command entry points mirroring the CLI. All functions return a
 * tcva_status; on failure tcva_last_error() describes what went wrong
 * (the message is thread-local and valid until the next failing call on
 * the same thread).
 */
#ifndef TCVA_H
#define TCVA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TCVA_API __declspec(dllexport)
#else
#define TCVA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tcva_status {
    TCVA_OK = 0,
    TCVA_ERR_EMPTY_INPUT = 1,
    TCVA_ERR_OUT_OF_RANGE = 2,
    TCVA_ERR_CONTRACT = 3,
    TCVA_ERR_PARSE = 4,
    TCVA_ERR_TRANSPORT = 5,
    TCVA_ERR_SCHEMA = 6,
    TCVA_ERR_CONFIG = 7,
    TCVA_ERR_UNDEFINED_CORRELATION = 8,
    TCVA_ERR_DEGENERATE_BOOTSTRAP = 9,
    TCVA_ERR_EXTRACTION = 10,
    TCVA_ERR_CACHE_MISS = 11,
    TCVA_ERR_IO = 12,
    TCVA_ERR_INVALID_ARGUMENT = 13,
    TCVA_ERR_INTERNAL = 14
} tcva_status;

typedef enum tcva_verdict {
    TCVA_VERDICT_FULLY = 0,
    TCVA_VERDICT_MOSTLY = 1,
    TCVA_VERDICT_PARTIALLY = 2,
    TCVA_VERDICT_MINOR = 3,
    TCVA_VERDICT_NONE = 4
} tcva_verdict;

TCVA_API const char* tcva_version(void);
TCVA_API const char* tcva_last_error(void);

/* ---- scoring ----------------------------------------------------------- */

/* p(T) under the default mapping: T in [0.1, 1.0] -> p in [-8, 12.25]. */
TCVA_API tcva_status tcva_temperature_to_p(double temperature, double* p_out);

TCVA_API tcva_status tcva_temperature_to_p_custom(double temperature, double t_min, double t_max,
                                                  double p_min, double p_max, double* p_out);

/* Generalized power mean of weights in [0,1]; p may be +/-INFINITY for the
 * exact max/min modes. */
TCVA_API tcva_status tcva_power_mean(const double* weights, size_t count, double p,
                                     double* mean_out);

TCVA_API tcva_status tcva_none_penalty_factor(size_t n_none, size_t total, double temperature,
                                              double* factor_out);

/* Weights of a named scheme (Default, Linear, Aggressive, Conservative) in
 * level order Fully..None. */
TCVA_API tcva_status tcva_scheme_weights(const char* scheme_name, double weights_out[5]);

typedef struct tcva_score {
    double raw_score;
    double none_fraction;
    double penalty_exponent;
    double penalty_factor;
    double final_score;
    double p_used;
    size_t claim_count;
} tcva_score;

/* Full aggregation of a verdict list at one temperature. */
TCVA_API tcva_status tcva_aggregate(const tcva_verdict* verdicts, size_t count,
                                    double temperature, const char* scheme_name,
                                    tcva_score* score_out);

typedef enum tcva_ablation_variant {
    TCVA_ABLATION_FULL = 0,
    TCVA_ABLATION_NO_PENALTY = 1,
    TCVA_ABLATION_ARITHMETIC_MEAN = 2,
    TCVA_ABLATION_BINARY_VERDICTS = 3
} tcva_ablation_variant;

TCVA_API tcva_status tcva_run_ablation(const tcva_verdict* verdicts, size_t count, int variant,
                                       double temperature, const char* scheme_name,
                                       tcva_score* score_out);

/* ---- baseline aggregators ---------------------------------------------- */

/* yes_flags: nonzero = Yes. Returns #Yes / count. */
TCVA_API tcva_status tcva_binary_fraction(const int* yes_flags, size_t count, double* score_out);

/* values: 1 = Yes, 0 = Unsure, -1 = No. Arithmetic mean of {1.0, 0.5, 0.0};
 * exclude_unsure drops Unsure verdicts from the denominator. */
TCVA_API tcva_status tcva_ternary_mean(const int* values, size_t count, int exclude_unsure,
                                       double* score_out);

/* Fully/Mostly -> 1.0, others -> 0.0; weights_out must hold count doubles. */
TCVA_API tcva_status tcva_collapse_to_binary(const tcva_verdict* verdicts, size_t count,
                                             double* weights_out);

/* ---- statistics --------------------------------------------------------- */

TCVA_API tcva_status tcva_spearman(const double* a, const double* b, size_t count,
                                   double* rho_out);
TCVA_API tcva_status tcva_kendall(const double* a, const double* b, size_t count,
                                  double* tau_out);
TCVA_API tcva_status tcva_mae(const double* a, const double* b, size_t count, double* mae_out);

typedef enum tcva_statistic {
    TCVA_STAT_SPEARMAN = 0,
    TCVA_STAT_KENDALL = 1,
    TCVA_STAT_MAE = 2
} tcva_statistic;

typedef struct tcva_bootstrap_report {
    double point_estimate;
    double ci_low;
    double ci_high;
    size_t n_resamples;
    size_t n_valid;
    double confidence_level;
    uint64_t seed;
} tcva_bootstrap_report;

/* Percentile bootstrap CI; resamples are deterministic in (seed, index). */
TCVA_API tcva_status tcva_bootstrap_ci(const double* method, const double* human, size_t count,
                                       int statistic, size_t n_resamples, double level,
                                       uint64_t seed, tcva_bootstrap_report* report_out);

TCVA_API tcva_status tcva_paired_bootstrap_test(const double* a, const double* b,
                                                const double* human, size_t count, int statistic,
                                                size_t n_resamples, uint64_t seed,
                                                double* delta_out, double* p_value_out);

/* ---- dataset handle ----------------------------------------------------- */

typedef struct tcva_dataset tcva_dataset;

/* NULL on failure; tcva_last_error() explains. */
TCVA_API tcva_dataset* tcva_dataset_load(const char* path);
TCVA_API void tcva_dataset_free(tcva_dataset* dataset);
TCVA_API size_t tcva_dataset_size(const tcva_dataset* dataset);
/* Pointer owned by the handle; NULL on a bad index. */
TCVA_API const char* tcva_dataset_sample_id(const tcva_dataset* dataset, size_t index);
/* TCVA_ERR_EMPTY_INPUT when the sample carries no human score. */
TCVA_API tcva_status tcva_dataset_human_score(const tcva_dataset* dataset, size_t index,
                                              double* score_out);

/* ---- verdict-cache handle ----------------------------------------------- */

typedef struct tcva_cache tcva_cache;

TCVA_API tcva_cache* tcva_cache_open(const char* path);
TCVA_API void tcva_cache_free(tcva_cache* cache);
TCVA_API size_t tcva_cache_size(const tcva_cache* cache);
/* Sample id of entry `index`; NULL on a bad index. */
TCVA_API const char* tcva_cache_sample_id(const tcva_cache* cache, size_t index);
/* Copies up to capacity verdict levels of entry `index`; *count_out is the
 * entry's full verdict count. */
TCVA_API tcva_status tcva_cache_levels(const tcva_cache* cache, size_t index,
                                       tcva_verdict* levels_out, size_t capacity,
                                       size_t* count_out);

/* ---- commands ------------------------------------------------------------
 * config_json carries the same layout as the CLI config file. Summaries are
 * heap strings owned by the caller; release them with tcva_string_free. */

TCVA_API void tcva_string_free(char* text);

TCVA_API tcva_status tcva_cmd_evaluate(const char* config_json, char** summary_out);

/* schemes / temperatures: comma-separated overrides, or NULL for the
 * defaults (all four schemes / the config's temperature list). */
TCVA_API tcva_status tcva_cmd_reaggregate(const char* config_json, const char* schemes,
                                          const char* temperatures, char** summary_out);

TCVA_API tcva_status tcva_cmd_stats(const char* scores_path, const char* dataset_path,
                                    const char* baseline_path, const char* baseline_name,
                                    size_t n_resamples, double confidence_level, uint64_t seed,
                                    unsigned n_threads, const char* output_dir,
                                    char** summary_out);

TCVA_API tcva_status tcva_cmd_ablate(const char* config_json, char** summary_out);

TCVA_API tcva_status tcva_cmd_sample(const char* dataset_path, const char* output_path,
                                     size_t n_bins, size_t per_bin, uint64_t seed,
                                     char** summary_out);

TCVA_API tcva_status tcva_cmd_convert(const char* format, const char* input_path,
                                      const char* output_path, const char* dimension,
                                      char** summary_out);

TCVA_API tcva_status tcva_cmd_plot(const char* scores_path, const char* dataset_path,
                                   const char* output_dir, char** summary_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TCVA_H */
