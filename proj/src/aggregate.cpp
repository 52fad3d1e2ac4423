#include "tcva/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcva/error.hpp"

namespace tcva {

double temperature_to_p(double temperature, const TemperatureMapping& mapping) {
    if (!(mapping.t_min < mapping.t_max))
        fail(Errc::config, "temperature mapping requires t_min < t_max");
    if (!(temperature >= mapping.t_min && temperature <= mapping.t_max))
        fail(Errc::out_of_range,
             "temperature " + std::to_string(temperature) + " outside [" +
                 std::to_string(mapping.t_min) + ", " + std::to_string(mapping.t_max) + "]");
    const double span = (temperature - mapping.t_min) / (mapping.t_max - mapping.t_min);
    return mapping.p_min + span * (mapping.p_max - mapping.p_min);
}

namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

double power_mean(std::span<const double> weights, double p) {
    if (weights.empty()) fail(Errc::empty_input, "power_mean over an empty weight list");
    const double m = static_cast<double>(weights.size());

    if (std::isinf(p)) {
        // Explicit limit modes, exact rather than numerically approximated.
        const auto [lo, hi] = std::minmax_element(weights.begin(), weights.end());
        return clamp_unit(p > 0 ? *hi : *lo);
    }

    // Accumulation order is canonical (sorted) so permutations of the input
    // produce bit-identical results.
    std::vector<double> sorted(weights.begin(), weights.end());
    std::sort(sorted.begin(), sorted.end());

    // An exact zero forces the p <= 0 limit: the geometric product vanishes
    // and every negative-p mean tends to 0. Returning the limit (instead of
    // an epsilon-guarded stand-in) keeps the mean monotone in p across 0.
    const bool has_zero = sorted.front() == 0.0;

    if (std::abs(p) < 1e-12) {
        if (has_zero) return 0.0;
        double log_sum = 0.0;
        for (double w : sorted) log_sum += std::log(std::max(w, kPowerMeanEpsilon));
        return clamp_unit(std::exp(log_sum / m));
    }
    if (p < 0 && has_zero) return 0.0;

    // Factor out the extreme guarded weight so w~^p never overflows, even for
    // large |p|; algebraically identical to ((1/m) sum w~^p)^(1/p).
    const double scale =
        p > 0 ? sorted.back() : std::max(sorted.front(), kPowerMeanEpsilon);
    if (p > 0 && scale == 0.0) return 0.0; // all-zero list

    double sum = 0.0;
    for (double w : sorted) {
        const double guarded = p < 0 ? std::max(w, kPowerMeanEpsilon) : w;
        sum += std::pow(guarded / scale, p);
    }
    return clamp_unit(scale * std::pow(sum / m, 1.0 / p));
}

double none_penalty_factor(std::size_t n_none, std::size_t m, double temperature) {
    if (m == 0) fail(Errc::empty_input, "none_penalty_factor with zero verdicts");
    if (n_none > m)
        fail(Errc::contract, "n_none (" + std::to_string(n_none) + ") exceeds verdict count (" +
                                 std::to_string(m) + ")");
    const double fraction = static_cast<double>(n_none) / static_cast<double>(m);
    const double alpha = 1.5 - temperature;
    return std::pow(1.0 - fraction, alpha);
}

EvaluationScore aggregate(std::span<const VerdictLevel> verdicts, double temperature,
                          const WeightScheme& scheme, const TemperatureMapping& mapping) {
    if (verdicts.empty()) fail(Errc::empty_input, "aggregate over an empty verdict list");

    EvaluationScore score;
    score.claim_count = verdicts.size();
    score.weights_used.reserve(verdicts.size());

    std::size_t n_none = 0;
    for (VerdictLevel level : verdicts) {
        score.weights_used.push_back(weight_of(level, scheme));
        if (level == VerdictLevel::None) ++n_none;
    }

    score.p_used = temperature_to_p(temperature, mapping);
    score.raw_score = power_mean(score.weights_used, score.p_used);
    score.none_fraction =
        static_cast<double>(n_none) / static_cast<double>(verdicts.size());
    score.penalty_exponent = 1.5 - temperature;
    score.penalty_factor = none_penalty_factor(n_none, verdicts.size(), temperature);
    score.final_score = std::clamp(score.raw_score * score.penalty_factor, 0.0, 1.0);
    return score;
}

} // namespace tcva
