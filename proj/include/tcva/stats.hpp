#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcva {

// Aligned method scores vs human annotations.
struct PairedScores {
    std::vector<double> method_scores;
    std::vector<double> human_scores;
    std::vector<std::string> sample_ids;

    // Validates equal lengths >= 2 (ids optional: empty or aligned).
    void validate() const;
    std::size_t size() const { return method_scores.size(); }
};

// Average ranks (1-based, ties get the mean of their positions).
std::vector<double> average_ranks(std::span<const double> values);

// Spearman's rho: Pearson correlation of average-ranked values. Throws
// Errc::undefined_correlation when either vector is constant.
double spearman_rho(const PairedScores& pairs);
double spearman_rho(std::span<const double> a, std::span<const double> b);

// Kendall's tau-b (tie-corrected). Throws Errc::undefined_correlation when
// all pairs are tied on either vector.
double kendall_tau(const PairedScores& pairs);
double kendall_tau(std::span<const double> a, std::span<const double> b);

// Mean absolute error.
double mae(const PairedScores& pairs);
double mae(std::span<const double> a, std::span<const double> b);

// Statistic evaluated on one resample; nullopt marks the resample undefined
// (e.g. a constant vector), in which case it is discarded.
using PairedStatistic =
    std::function<std::optional<double>(std::span<const double>, std::span<const double>)>;

PairedStatistic spearman_statistic();
PairedStatistic kendall_statistic();
PairedStatistic mae_statistic();

struct BootstrapReport {
    double point_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_resamples = 0; // requested
    std::size_t n_valid = 0;     // resamples where the statistic was defined
    double confidence_level = 0.95;
    std::uint64_t seed = 0;
};

// Percentile bootstrap CI. Resample r draws its index vector from
// Rng::substream(seed, r); undefined resamples are discarded. Throws
// Errc::degenerate_bootstrap when fewer than 100 resamples remain valid.
// n_threads > 1 splits the resample range; results are identical to serial.
BootstrapReport bootstrap_ci(const PairedScores& pairs, const PairedStatistic& statistic,
                             std::size_t n_resamples = 10000, double level = 0.95,
                             std::uint64_t seed = 0, unsigned n_threads = 1);

struct PairedTestResult {
    double delta = 0.0;   // corr(a, human) - corr(b, human) on the full data
    double p_value = 1.0; // two-sided
    std::size_t n_valid = 0;
};

// Paired bootstrap test: one shared index vector per resample is applied to
// scores_a, scores_b and human; p = 2 * min(frac(delta_r <= 0),
// frac(delta_r >= 0)), capped at 1.
PairedTestResult paired_bootstrap_test(std::span<const double> scores_a,
                                       std::span<const double> scores_b,
                                       std::span<const double> human,
                                       const PairedStatistic& correlation,
                                       std::size_t n_resamples = 10000,
                                       std::uint64_t seed = 0, unsigned n_threads = 1);

// Inverse-CDF quantile of a sorted sample: the smallest value v with
// CDF(v) >= q. Matches the quantiles of an enumerated discrete distribution.
double sorted_quantile(std::span<const double> sorted_values, double q);

// Equal-width stratified sampling over human scores in [0,1]; the top bin is
// closed. Draws per_bin indices without replacement per bin (all members when
// a bin is under-full); output is deterministic given the seed, ordered by
// bin then draw order. Returns indices into `human_scores`.
std::vector<std::size_t> stratified_sample_indices(std::span<const double> human_scores,
                                                   std::size_t n_bins, std::size_t per_bin,
                                                   std::uint64_t seed);

} // namespace tcva
