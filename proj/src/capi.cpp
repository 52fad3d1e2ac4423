#include "tcva.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcva/aggregate.hpp"
#include "tcva/baselines.hpp"
#include "tcva/cache.hpp"
#include "tcva/dataset.hpp"
#include "tcva/error.hpp"
#include "tcva/runner.hpp"
#include "tcva/stats.hpp"

namespace {

thread_local std::string g_last_error;

void set_last_error(std::string message) { g_last_error = std::move(message); }

tcva_status map_errc(tcva::Errc code) {
    using tcva::Errc;
    switch (code) {
    case Errc::empty_input: return TCVA_ERR_EMPTY_INPUT;
    case Errc::out_of_range: return TCVA_ERR_OUT_OF_RANGE;
    case Errc::contract: return TCVA_ERR_CONTRACT;
    case Errc::parse: return TCVA_ERR_PARSE;
    case Errc::transport: return TCVA_ERR_TRANSPORT;
    case Errc::schema: return TCVA_ERR_SCHEMA;
    case Errc::config: return TCVA_ERR_CONFIG;
    case Errc::undefined_correlation: return TCVA_ERR_UNDEFINED_CORRELATION;
    case Errc::degenerate_bootstrap: return TCVA_ERR_DEGENERATE_BOOTSTRAP;
    case Errc::extraction_failure: return TCVA_ERR_EXTRACTION;
    case Errc::cache_miss: return TCVA_ERR_CACHE_MISS;
    case Errc::io: return TCVA_ERR_IO;
    }
    return TCVA_ERR_INTERNAL;
}

template <typename Fn>
tcva_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        return TCVA_OK;
    } catch (const tcva::Error& e) {
        set_last_error(e.what());
        return map_errc(e.code());
    } catch (const std::exception& e) {
        set_last_error(e.what());
        return TCVA_ERR_INTERNAL;
    } catch (...) {
        set_last_error("unknown error");
        return TCVA_ERR_INTERNAL;
    }
}

tcva_status invalid_argument(const char* message) {
    set_last_error(message);
    return TCVA_ERR_INVALID_ARGUMENT;
}

std::vector<tcva::VerdictLevel> to_levels(const tcva_verdict* verdicts, size_t count) {
    std::vector<tcva::VerdictLevel> levels;
    levels.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const int v = static_cast<int>(verdicts[i]);
        if (v < 0 || v > 4) tcva::fail(tcva::Errc::contract, "verdict value out of range");
        levels.push_back(static_cast<tcva::VerdictLevel>(v));
    }
    return levels;
}

void fill_score(const tcva::EvaluationScore& score, tcva_score* out) {
    out->raw_score = score.raw_score;
    out->none_fraction = score.none_fraction;
    out->penalty_exponent = score.penalty_exponent;
    out->penalty_factor = score.penalty_factor;
    out->final_score = score.final_score;
    out->p_used = score.p_used;
    out->claim_count = score.claim_count;
}

tcva::PairedStatistic statistic_of(int statistic) {
    switch (statistic) {
    case TCVA_STAT_SPEARMAN: return tcva::spearman_statistic();
    case TCVA_STAT_KENDALL: return tcva::kendall_statistic();
    case TCVA_STAT_MAE: return tcva::mae_statistic();
    default: tcva::fail(tcva::Errc::config, "unknown statistic selector");
    }
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out) std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

tcva::RunConfig config_from_text(const char* config_json) {
    const auto doc = nlohmann::json::parse(config_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        tcva::fail(tcva::Errc::config, "config is not a JSON object");
    return tcva::RunConfig::from_json(doc);
}

std::vector<std::string> split_csv_list(const char* text) {
    std::vector<std::string> items;
    if (!text) return items;
    std::string current;
    for (const char* p = text;; ++p) {
        if (*p == ',' || *p == '\0') {
            if (!current.empty()) items.push_back(current);
            current.clear();
            if (*p == '\0') break;
        } else if (*p != ' ') {
            current.push_back(*p);
        }
    }
    return items;
}

} // namespace

struct tcva_dataset {
    std::vector<tcva::EvaluationSample> samples;
};

struct tcva_cache {
    std::vector<tcva::CachedEvaluation> entries;
};

extern "C" {

const char* tcva_version(void) { return "1.0.0"; }

const char* tcva_last_error(void) { return g_last_error.c_str(); }

tcva_status tcva_temperature_to_p(double temperature, double* p_out) {
    if (!p_out) return invalid_argument("p_out is null");
    return guarded([&] { *p_out = tcva::temperature_to_p(temperature); });
}

tcva_status tcva_temperature_to_p_custom(double temperature, double t_min, double t_max,
                                         double p_min, double p_max, double* p_out) {
    if (!p_out) return invalid_argument("p_out is null");
    return guarded([&] {
        *p_out = tcva::temperature_to_p(temperature, {t_min, t_max, p_min, p_max});
    });
}

tcva_status tcva_power_mean(const double* weights, size_t count, double p, double* mean_out) {
    if (!mean_out || (!weights && count > 0)) return invalid_argument("null buffer");
    return guarded([&] { *mean_out = tcva::power_mean({weights, count}, p); });
}

tcva_status tcva_none_penalty_factor(size_t n_none, size_t total, double temperature,
                                     double* factor_out) {
    if (!factor_out) return invalid_argument("factor_out is null");
    return guarded([&] { *factor_out = tcva::none_penalty_factor(n_none, total, temperature); });
}

tcva_status tcva_scheme_weights(const char* scheme_name, double weights_out[5]) {
    if (!scheme_name || !weights_out) return invalid_argument("null argument");
    return guarded([&] {
        const auto& scheme = tcva::WeightScheme::named(scheme_name);
        for (size_t i = 0; i < tcva::kVerdictLevelCount; ++i)
            weights_out[i] = scheme.weights()[i];
    });
}

tcva_status tcva_aggregate(const tcva_verdict* verdicts, size_t count, double temperature,
                           const char* scheme_name, tcva_score* score_out) {
    if (!score_out || !scheme_name || (!verdicts && count > 0))
        return invalid_argument("null argument");
    return guarded([&] {
        const auto levels = to_levels(verdicts, count);
        const auto score =
            tcva::aggregate(levels, temperature, tcva::WeightScheme::named(scheme_name));
        fill_score(score, score_out);
    });
}

tcva_status tcva_run_ablation(const tcva_verdict* verdicts, size_t count, int variant,
                              double temperature, const char* scheme_name,
                              tcva_score* score_out) {
    if (!score_out || !scheme_name || (!verdicts && count > 0))
        return invalid_argument("null argument");
    if (variant < 0 || variant > 3) return invalid_argument("unknown ablation variant");
    return guarded([&] {
        const auto levels = to_levels(verdicts, count);
        tcva::AblationConfig config;
        config.variant = static_cast<tcva::AblationVariant>(variant);
        config.temperature = temperature;
        config.scheme = &tcva::WeightScheme::named(scheme_name);
        fill_score(tcva::run_ablation(levels, config), score_out);
    });
}

tcva_status tcva_binary_fraction(const int* yes_flags, size_t count, double* score_out) {
    if (!score_out || (!yes_flags && count > 0)) return invalid_argument("null buffer");
    return guarded([&] {
        std::vector<tcva::BinaryVerdict> verdicts;
        verdicts.reserve(count);
        for (size_t i = 0; i < count; ++i)
            verdicts.push_back(yes_flags[i] ? tcva::BinaryVerdict::Yes : tcva::BinaryVerdict::No);
        *score_out = tcva::binary_fraction_score(verdicts);
    });
}

tcva_status tcva_ternary_mean(const int* values, size_t count, int exclude_unsure,
                              double* score_out) {
    if (!score_out || (!values && count > 0)) return invalid_argument("null buffer");
    return guarded([&] {
        std::vector<tcva::TernaryVerdict> verdicts;
        verdicts.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (values[i] > 0) verdicts.push_back(tcva::TernaryVerdict::Yes);
            else if (values[i] == 0) verdicts.push_back(tcva::TernaryVerdict::Unsure);
            else verdicts.push_back(tcva::TernaryVerdict::No);
        }
        *score_out = tcva::ternary_mean_score(verdicts, exclude_unsure != 0);
    });
}

tcva_status tcva_collapse_to_binary(const tcva_verdict* verdicts, size_t count,
                                    double* weights_out) {
    if (!weights_out || (!verdicts && count > 0)) return invalid_argument("null buffer");
    return guarded([&] {
        const auto levels = to_levels(verdicts, count);
        const auto weights = tcva::collapse_to_binary(levels);
        std::memcpy(weights_out, weights.data(), weights.size() * sizeof(double));
    });
}

tcva_status tcva_spearman(const double* a, const double* b, size_t count, double* rho_out) {
    if (!rho_out || !a || !b) return invalid_argument("null buffer");
    return guarded([&] { *rho_out = tcva::spearman_rho({a, count}, {b, count}); });
}

tcva_status tcva_kendall(const double* a, const double* b, size_t count, double* tau_out) {
    if (!tau_out || !a || !b) return invalid_argument("null buffer");
    return guarded([&] { *tau_out = tcva::kendall_tau({a, count}, {b, count}); });
}

tcva_status tcva_mae(const double* a, const double* b, size_t count, double* mae_out) {
    if (!mae_out || !a || !b) return invalid_argument("null buffer");
    return guarded([&] { *mae_out = tcva::mae({a, count}, {b, count}); });
}

tcva_status tcva_bootstrap_ci(const double* method, const double* human, size_t count,
                              int statistic, size_t n_resamples, double level, uint64_t seed,
                              tcva_bootstrap_report* report_out) {
    if (!report_out || !method || !human) return invalid_argument("null buffer");
    return guarded([&] {
        tcva::PairedScores pairs;
        pairs.method_scores.assign(method, method + count);
        pairs.human_scores.assign(human, human + count);
        const auto report =
            tcva::bootstrap_ci(pairs, statistic_of(statistic), n_resamples, level, seed);
        report_out->point_estimate = report.point_estimate;
        report_out->ci_low = report.ci_low;
        report_out->ci_high = report.ci_high;
        report_out->n_resamples = report.n_resamples;
        report_out->n_valid = report.n_valid;
        report_out->confidence_level = report.confidence_level;
        report_out->seed = report.seed;
    });
}

tcva_status tcva_paired_bootstrap_test(const double* a, const double* b, const double* human,
                                       size_t count, int statistic, size_t n_resamples,
                                       uint64_t seed, double* delta_out, double* p_value_out) {
    if (!a || !b || !human || !delta_out || !p_value_out)
        return invalid_argument("null buffer");
    return guarded([&] {
        const auto result = tcva::paired_bootstrap_test(
            {a, count}, {b, count}, {human, count}, statistic_of(statistic), n_resamples, seed);
        *delta_out = result.delta;
        *p_value_out = result.p_value;
    });
}

tcva_dataset* tcva_dataset_load(const char* path) {
    if (!path) {
        set_last_error("path is null");
        return nullptr;
    }
    tcva_dataset* handle = nullptr;
    const tcva_status status = guarded([&] {
        auto samples = tcva::load_dataset(path);
        handle = new tcva_dataset{std::move(samples)};
    });
    return status == TCVA_OK ? handle : nullptr;
}

void tcva_dataset_free(tcva_dataset* dataset) { delete dataset; }

size_t tcva_dataset_size(const tcva_dataset* dataset) {
    return dataset ? dataset->samples.size() : 0;
}

const char* tcva_dataset_sample_id(const tcva_dataset* dataset, size_t index) {
    if (!dataset || index >= dataset->samples.size()) return nullptr;
    return dataset->samples[index].id.c_str();
}

tcva_status tcva_dataset_human_score(const tcva_dataset* dataset, size_t index,
                                     double* score_out) {
    if (!dataset || !score_out) return invalid_argument("null argument");
    if (index >= dataset->samples.size()) return invalid_argument("index out of range");
    if (!dataset->samples[index].human_score) {
        set_last_error("sample has no human score");
        return TCVA_ERR_EMPTY_INPUT;
    }
    *score_out = *dataset->samples[index].human_score;
    return TCVA_OK;
}

tcva_cache* tcva_cache_open(const char* path) {
    if (!path) {
        set_last_error("path is null");
        return nullptr;
    }
    tcva_cache* handle = nullptr;
    const tcva_status status = guarded([&] {
        auto cache = tcva::VerdictCache::load(path);
        handle = new tcva_cache{cache.entries()};
    });
    return status == TCVA_OK ? handle : nullptr;
}

void tcva_cache_free(tcva_cache* cache) { delete cache; }

size_t tcva_cache_size(const tcva_cache* cache) { return cache ? cache->entries.size() : 0; }

const char* tcva_cache_sample_id(const tcva_cache* cache, size_t index) {
    if (!cache || index >= cache->entries.size()) return nullptr;
    return cache->entries[index].sample_id.c_str();
}

tcva_status tcva_cache_levels(const tcva_cache* cache, size_t index, tcva_verdict* levels_out,
                              size_t capacity, size_t* count_out) {
    if (!cache || !count_out || (!levels_out && capacity > 0))
        return invalid_argument("null argument");
    if (index >= cache->entries.size()) return invalid_argument("index out of range");
    const auto levels = cache->entries[index].levels();
    *count_out = levels.size();
    const size_t n = capacity < levels.size() ? capacity : levels.size();
    for (size_t i = 0; i < n; ++i)
        levels_out[i] = static_cast<tcva_verdict>(static_cast<int>(levels[i]));
    return TCVA_OK;
}

void tcva_string_free(char* text) { std::free(text); }

tcva_status tcva_cmd_evaluate(const char* config_json, char** summary_out) {
    if (!config_json) return invalid_argument("config_json is null");
    return guarded([&] {
        const auto result = tcva::cmd_evaluate(config_from_text(config_json));
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

tcva_status tcva_cmd_reaggregate(const char* config_json, const char* schemes,
                                 const char* temperatures, char** summary_out) {
    if (!config_json) return invalid_argument("config_json is null");
    return guarded([&] {
        const auto config = config_from_text(config_json);
        std::vector<std::string> scheme_names = split_csv_list(schemes);
        if (!schemes) scheme_names = tcva::WeightScheme::known_names();
        std::vector<double> temps;
        if (!temperatures) {
            temps = config.temperatures;
        } else {
            for (const auto& item : split_csv_list(temperatures)) temps.push_back(std::stod(item));
        }
        const auto result = tcva::cmd_reaggregate(config, scheme_names, temps);
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

tcva_status tcva_cmd_stats(const char* scores_path, const char* dataset_path,
                           const char* baseline_path, const char* baseline_name,
                           size_t n_resamples, double confidence_level, uint64_t seed,
                           unsigned n_threads, const char* output_dir, char** summary_out) {
    if (!scores_path || !dataset_path) return invalid_argument("scores/dataset path is null");
    return guarded([&] {
        tcva::StatsRequest request;
        request.scores_path = scores_path;
        request.dataset_path = dataset_path;
        if (baseline_path) request.baseline_path = baseline_path;
        if (baseline_name) request.baseline_name = baseline_name;
        request.n_resamples = n_resamples;
        request.confidence_level = confidence_level;
        request.seed = seed;
        request.n_threads = n_threads == 0 ? 1 : n_threads;
        if (output_dir) request.output_dir = output_dir;
        const auto result = tcva::cmd_stats(request);
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

tcva_status tcva_cmd_ablate(const char* config_json, char** summary_out) {
    if (!config_json) return invalid_argument("config_json is null");
    return guarded([&] {
        const auto result = tcva::cmd_ablate(config_from_text(config_json));
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

tcva_status tcva_cmd_sample(const char* dataset_path, const char* output_path, size_t n_bins,
                            size_t per_bin, uint64_t seed, char** summary_out) {
    if (!dataset_path || !output_path) return invalid_argument("dataset/output path is null");
    return guarded([&] {
        tcva::SampleRequest request;
        request.dataset_path = dataset_path;
        request.output_path = output_path;
        request.n_bins = n_bins == 0 ? 5 : n_bins;
        request.per_bin = per_bin;
        request.seed = seed;
        const auto result = tcva::cmd_sample(request);
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

tcva_status tcva_cmd_plot(const char* scores_path, const char* dataset_path,
                          const char* output_dir, char** summary_out) {
    if (!scores_path || !dataset_path) return invalid_argument("scores/dataset path is null");
    return guarded([&] {
        tcva::PlotRequest request;
        request.scores_path = scores_path;
        request.dataset_path = dataset_path;
        if (output_dir) request.output_dir = output_dir;
        const auto result = tcva::cmd_plot(request);
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

tcva_status tcva_cmd_convert(const char* format, const char* input_path, const char* output_path,
                             const char* dimension, char** summary_out) {
    if (!format || !input_path || !output_path) return invalid_argument("null argument");
    return guarded([&] {
        tcva::ConvertRequest request;
        request.format = format;
        request.input_path = input_path;
        request.output_path = output_path;
        if (dimension) request.dimension = dimension;
        const auto result = tcva::cmd_convert(request);
        if (summary_out) *summary_out = dup_string(result.summary);
    });
}

} // extern "C"
