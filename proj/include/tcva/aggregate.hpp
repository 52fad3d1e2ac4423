#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tcva/verdict.hpp"

namespace tcva {

// Linear map from aggregation temperature T to the power-mean exponent p.
// The bounds are plain configuration: p_max = 12.25 puts the arithmetic
// mean (p = 1) exactly at T = 0.5.
struct TemperatureMapping {
    double t_min = 0.1;
    double t_max = 1.0;
    double p_min = -8.0;
    double p_max = 12.25;
};

// p(T) = p_min + ((T - t_min) / (t_max - t_min)) * (p_max - p_min).
// Throws Errc::out_of_range when T lies outside [t_min, t_max].
double temperature_to_p(double temperature, const TemperatureMapping& mapping = {});

// Generalized power mean of weights in [0,1].
//
// |p| < 1e-12 takes the geometric-limit branch exp(mean(log(max(w, eps))));
// otherwise ((1/m) sum w~^p)^(1/p) with w~ = max(w, eps) for p < 0 and
// w~ = w for p >= 0, eps = 1e-9. A list containing an exact zero evaluates
// to its limit 0 for every p <= 0, which keeps the mean monotone in p.
// p = +/-inf are explicit max/min modes. The result is clamped to [0,1].
// Throws Errc::empty_input on an empty span.
double power_mean(std::span<const double> weights, double p);

inline constexpr double kPowerMeanEpsilon = 1e-9;

// (1 - n_none/m)^(1.5 - T). Throws Errc::empty_input when m = 0 and
// Errc::contract when n_none > m.
double none_penalty_factor(std::size_t n_none, std::size_t m, double temperature);

// Fully populated aggregation result with its provenance.
struct EvaluationScore {
    double raw_score = 0.0;        // power mean over the mapped weights
    double none_fraction = 0.0;    // n_none / m, exact
    double penalty_exponent = 0.0; // alpha = 1.5 - T (0 when the penalty is disabled)
    double penalty_factor = 1.0;
    double final_score = 0.0;      // raw_score * penalty_factor, clamped to [0,1]
    double p_used = 0.0;
    std::vector<double> weights_used;
    std::size_t claim_count = 0;
};

// Full pipeline steps over a verdict list: weights -> p(T) -> power mean ->
// None-penalty. Propagates empty-input and range errors.
EvaluationScore aggregate(std::span<const VerdictLevel> verdicts, double temperature,
                          const WeightScheme& scheme,
                          const TemperatureMapping& mapping = {});

} // namespace tcva
