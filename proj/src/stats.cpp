#include "tcva/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "tcva/error.hpp"
#include "tcva/rng.hpp"

namespace tcva {

void PairedScores::validate() const {
    if (method_scores.size() != human_scores.size())
        fail(Errc::contract, "paired scores: method/human lengths differ");
    if (!sample_ids.empty() && sample_ids.size() != method_scores.size())
        fail(Errc::contract, "paired scores: sample_ids not aligned");
    if (method_scores.size() < 2)
        fail(Errc::empty_input, "paired scores require at least 2 pairs");
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the average 1-based rank
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    return cov / std::sqrt(var_a * var_b);
}

void check_pair_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(Errc::contract, "paired vectors have different lengths");
    if (a.size() < 2) fail(Errc::empty_input, "need at least 2 pairs");
}

} // namespace

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    check_pair_lengths(a, b);
    if (is_constant(a) || is_constant(b))
        fail(Errc::undefined_correlation, "spearman_rho undefined for a constant vector");
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return std::clamp(pearson(ra, rb), -1.0, 1.0);
}

double spearman_rho(const PairedScores& pairs) {
    pairs.validate();
    return spearman_rho(pairs.method_scores, pairs.human_scores);
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
    check_pair_lengths(a, b);
    // tau-b over all n(n-1)/2 pairs; O(n^2) is plenty for evaluation-sized data
    std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double da = a[i] - a[j];
            const double db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) continue;
            if (da == 0.0) { ++ties_a; continue; }
            if (db == 0.0) { ++ties_b; continue; }
            if (da * db > 0.0) ++concordant;
            else ++discordant;
        }
    }
    const double denom =
        std::sqrt(static_cast<double>(concordant + discordant + ties_a) *
                  static_cast<double>(concordant + discordant + ties_b));
    if (denom == 0.0)
        fail(Errc::undefined_correlation, "kendall_tau undefined: all pairs tied");
    return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

double kendall_tau(const PairedScores& pairs) {
    pairs.validate();
    return kendall_tau(pairs.method_scores, pairs.human_scores);
}

double mae(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(Errc::contract, "paired vectors have different lengths");
    if (a.empty()) fail(Errc::empty_input, "mae over empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

double mae(const PairedScores& pairs) {
    pairs.validate();
    return mae(pairs.method_scores, pairs.human_scores);
}

PairedStatistic spearman_statistic() {
    return [](std::span<const double> a, std::span<const double> b) -> std::optional<double> {
        if (is_constant(a) || is_constant(b)) return std::nullopt;
        return spearman_rho(a, b);
    };
}

PairedStatistic kendall_statistic() {
    return [](std::span<const double> a, std::span<const double> b) -> std::optional<double> {
        if (is_constant(a) || is_constant(b)) return std::nullopt;
        return kendall_tau(a, b);
    };
}

PairedStatistic mae_statistic() {
    return [](std::span<const double> a, std::span<const double> b) -> std::optional<double> {
        return mae(a, b);
    };
}

double sorted_quantile(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) fail(Errc::empty_input, "quantile of an empty sample");
    const double n = static_cast<double>(sorted_values.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    if (idx > 0) --idx;
    idx = std::min(idx, sorted_values.size() - 1);
    return sorted_values[idx];
}

namespace {

// Evaluates the statistic on resamples [first, last) into out[r - first].
template <typename Eval>
void run_resample_range(std::size_t first, std::size_t last, std::uint64_t seed,
                        std::size_t n, Eval&& eval,
                        std::vector<std::optional<double>>& out) {
    std::vector<std::size_t> indices(n);
    for (std::size_t r = first; r < last; ++r) {
        Rng rng = Rng::substream(seed, r);
        for (std::size_t i = 0; i < n; ++i)
            indices[i] = static_cast<std::size_t>(rng.next_below(n));
        out[r] = eval(indices);
    }
}

template <typename Eval>
std::vector<double> collect_resamples(std::size_t n_resamples, std::uint64_t seed,
                                      std::size_t n, unsigned n_threads, Eval&& eval) {
    std::vector<std::optional<double>> raw(n_resamples);
    if (n_threads <= 1 || n_resamples < 2 * n_threads) {
        run_resample_range(0, n_resamples, seed, n, eval, raw);
    } else {
        std::vector<std::thread> workers;
        const std::size_t chunk = (n_resamples + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::size_t first = t * chunk;
            const std::size_t last = std::min(n_resamples, first + chunk);
            if (first >= last) break;
            workers.emplace_back([&, first, last] {
                run_resample_range(first, last, seed, n, eval, raw);
            });
        }
        for (auto& w : workers) w.join();
    }
    std::vector<double> valid;
    valid.reserve(n_resamples);
    for (const auto& v : raw)
        if (v) valid.push_back(*v);
    return valid;
}

} // namespace

BootstrapReport bootstrap_ci(const PairedScores& pairs, const PairedStatistic& statistic,
                             std::size_t n_resamples, double level, std::uint64_t seed,
                             unsigned n_threads) {
    pairs.validate();
    if (n_resamples == 0) fail(Errc::config, "bootstrap_ci: n_resamples must be positive");
    if (!(level > 0.0 && level < 1.0))
        fail(Errc::config, "bootstrap_ci: confidence level must lie in (0,1)");

    const std::size_t n = pairs.size();
    const auto& method = pairs.method_scores;
    const auto& human = pairs.human_scores;

    const auto point = statistic(method, human);
    if (!point)
        fail(Errc::undefined_correlation, "bootstrap_ci: statistic undefined on the full data");

    auto eval = [&](const std::vector<std::size_t>& indices) -> std::optional<double> {
        thread_local std::vector<double> mb, hb;
        mb.resize(n);
        hb.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            mb[i] = method[indices[i]];
            hb[i] = human[indices[i]];
        }
        return statistic(mb, hb);
    };

    auto valid = collect_resamples(n_resamples, seed, n, n_threads, eval);
    if (valid.size() < 100)
        fail(Errc::degenerate_bootstrap,
             "bootstrap_ci: only " + std::to_string(valid.size()) +
                 " valid resamples (need >= 100)");
    std::sort(valid.begin(), valid.end());

    BootstrapReport report;
    report.point_estimate = *point;
    const double tail = (1.0 - level) / 2.0;
    report.ci_low = sorted_quantile(valid, tail);
    report.ci_high = sorted_quantile(valid, 1.0 - tail);
    if (report.ci_low > report.ci_high)
        fail(Errc::contract, "bootstrap_ci: quantiles out of order");
    report.n_resamples = n_resamples;
    report.n_valid = valid.size();
    report.confidence_level = level;
    report.seed = seed;
    return report;
}

PairedTestResult paired_bootstrap_test(std::span<const double> scores_a,
                                       std::span<const double> scores_b,
                                       std::span<const double> human,
                                       const PairedStatistic& correlation,
                                       std::size_t n_resamples, std::uint64_t seed,
                                       unsigned n_threads) {
    if (scores_a.size() != scores_b.size() || scores_a.size() != human.size())
        fail(Errc::contract, "paired_bootstrap_test: input lengths differ");
    if (scores_a.size() < 2) fail(Errc::empty_input, "paired_bootstrap_test: need >= 2 samples");
    if (n_resamples == 0) fail(Errc::config, "paired_bootstrap_test: n_resamples must be positive");

    const std::size_t n = human.size();
    const auto corr_a = correlation(scores_a, human);
    const auto corr_b = correlation(scores_b, human);
    if (!corr_a || !corr_b)
        fail(Errc::undefined_correlation,
             "paired_bootstrap_test: correlation undefined on the full data");

    auto eval = [&](const std::vector<std::size_t>& indices) -> std::optional<double> {
        thread_local std::vector<double> ab, bb, hb;
        ab.resize(n);
        bb.resize(n);
        hb.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            ab[i] = scores_a[indices[i]];
            bb[i] = scores_b[indices[i]];
            hb[i] = human[indices[i]];
        }
        const auto ca = correlation(ab, hb);
        const auto cb = correlation(bb, hb);
        if (!ca || !cb) return std::nullopt;
        return *ca - *cb;
    };

    auto deltas = collect_resamples(n_resamples, seed, n, n_threads, eval);
    if (deltas.size() < 100)
        fail(Errc::degenerate_bootstrap,
             "paired_bootstrap_test: only " + std::to_string(deltas.size()) +
                 " valid resamples (need >= 100)");

    std::size_t le = 0, ge = 0;
    for (double d : deltas) {
        if (d <= 0.0) ++le;
        if (d >= 0.0) ++ge;
    }
    const double total = static_cast<double>(deltas.size());

    PairedTestResult result;
    result.delta = *corr_a - *corr_b;
    result.p_value =
        std::min(1.0, 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) / total);
    result.n_valid = deltas.size();
    return result;
}

std::vector<std::size_t> stratified_sample_indices(std::span<const double> human_scores,
                                                   std::size_t n_bins, std::size_t per_bin,
                                                   std::uint64_t seed) {
    if (human_scores.empty()) fail(Errc::empty_input, "stratified_sample over an empty dataset");
    if (n_bins == 0) fail(Errc::config, "stratified_sample: n_bins must be positive");
    if (per_bin == 0) fail(Errc::config, "stratified_sample: per_bin must be positive");

    std::vector<std::vector<std::size_t>> bins(n_bins);
    for (std::size_t i = 0; i < human_scores.size(); ++i) {
        const double score = human_scores[i];
        if (!(score >= 0.0 && score <= 1.0))
            fail(Errc::out_of_range,
                 "stratified_sample: human score " + std::to_string(score) + " outside [0,1]");
        // equal-width bins over [0,1], top bin closed
        auto bin = static_cast<std::size_t>(score * static_cast<double>(n_bins));
        bin = std::min(bin, n_bins - 1);
        bins[bin].push_back(i);
    }

    std::vector<std::size_t> picked;
    picked.reserve(n_bins * per_bin);
    for (std::size_t b = 0; b < n_bins; ++b) {
        auto& members = bins[b];
        if (members.size() <= per_bin) {
            picked.insert(picked.end(), members.begin(), members.end());
            continue;
        }
        Rng rng = Rng::substream(seed, b);
        rng.shuffle(members);
        picked.insert(picked.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(per_bin));
    }
    return picked;
}

} // namespace tcva
