#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcva/aggregate.hpp"
#include "tcva/verdict.hpp"

namespace tcva {

enum class BinaryVerdict { Yes, No };
enum class TernaryVerdict { Yes, Unsure, No };

// count(Yes) / total. Throws Errc::empty_input on an empty list.
double binary_fraction_score(std::span<const BinaryVerdict> verdicts);

// Arithmetic mean of {Yes -> 1.0, Unsure -> 0.5, No -> 0.0}. With
// exclude_unsure, Unsure verdicts drop out of the denominator instead;
// an all-Unsure list is then undefined and throws Errc::empty_input.
double ternary_mean_score(std::span<const TernaryVerdict> verdicts,
                          bool exclude_unsure = false);

// Fully/Mostly -> 1.0, everything else -> 0.0.
std::vector<double> collapse_to_binary(std::span<const VerdictLevel> verdicts);

enum class AblationVariant {
    FullTCVA,       // A: five-level weights + power mean + None-penalty
    NoPenalty,      // B: A without the penalty factor
    ArithmeticMean, // C: p forced to 1, penalty kept
    BinaryVerdicts, // D: weights collapsed to binary, power mean + penalty
};

std::string_view to_string(AblationVariant variant);

struct AblationConfig {
    AblationVariant variant = AblationVariant::FullTCVA;
    double temperature = 0.5;
    const WeightScheme* scheme = &WeightScheme::named("Default");
    TemperatureMapping mapping = {};
};

// Re-scores a stored verdict list under one ablation configuration. Config D
// collapses weights but keeps the penalty computed from the original None
// count (collapse substitutes weights, it does not create None verdicts).
EvaluationScore run_ablation(std::span<const VerdictLevel> verdicts,
                             const AblationConfig& config);

// One cell of a re-aggregation sweep.
struct SweepCell {
    std::size_t sample_index = 0;
    double temperature = 0.0;
    std::string scheme_name;
    EvaluationScore score;
};

// |samples| x |temperatures| x |schemes| TCVA scores over stored verdicts.
// Pure: no judge involvement. Throws Errc::config on empty temperature or
// scheme lists and Errc::empty_input on an empty sample list.
std::vector<SweepCell> reaggregate_sweep(
    std::span<const std::vector<VerdictLevel>> verdict_lists,
    std::span<const double> temperatures,
    std::span<const WeightScheme> schemes,
    const TemperatureMapping& mapping = {});

} // namespace tcva
