#include "tcva/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "tcva/error.hpp"

namespace tcva {

double binary_fraction_score(std::span<const BinaryVerdict> verdicts) {
    if (verdicts.empty()) fail(Errc::empty_input, "binary_fraction_score over an empty list");
    const auto yes = std::count(verdicts.begin(), verdicts.end(), BinaryVerdict::Yes);
    return static_cast<double>(yes) / static_cast<double>(verdicts.size());
}

double ternary_mean_score(std::span<const TernaryVerdict> verdicts, bool exclude_unsure) {
    if (verdicts.empty()) fail(Errc::empty_input, "ternary_mean_score over an empty list");
    double sum = 0.0;
    std::size_t counted = 0;
    for (TernaryVerdict v : verdicts) {
        switch (v) {
        case TernaryVerdict::Yes: sum += 1.0; ++counted; break;
        case TernaryVerdict::No: ++counted; break;
        case TernaryVerdict::Unsure:
            if (!exclude_unsure) { sum += 0.5; ++counted; }
            break;
        }
    }
    if (counted == 0)
        fail(Errc::empty_input, "ternary_mean_score: all verdicts Unsure with exclude_unsure");
    return sum / static_cast<double>(counted);
}

std::vector<double> collapse_to_binary(std::span<const VerdictLevel> verdicts) {
    if (verdicts.empty()) fail(Errc::empty_input, "collapse_to_binary over an empty list");
    std::vector<double> weights;
    weights.reserve(verdicts.size());
    for (VerdictLevel level : verdicts) {
        const bool high = level == VerdictLevel::Fully || level == VerdictLevel::Mostly;
        weights.push_back(high ? 1.0 : 0.0);
    }
    return weights;
}

std::string_view to_string(AblationVariant variant) {
    switch (variant) {
    case AblationVariant::FullTCVA: return "full_tcva";
    case AblationVariant::NoPenalty: return "no_penalty";
    case AblationVariant::ArithmeticMean: return "arithmetic_mean";
    case AblationVariant::BinaryVerdicts: return "binary_verdicts";
    }
    return "?";
}

EvaluationScore run_ablation(std::span<const VerdictLevel> verdicts,
                             const AblationConfig& config) {
    if (verdicts.empty()) fail(Errc::empty_input, "run_ablation over an empty verdict list");

    const double mapped_p = temperature_to_p(config.temperature, config.mapping);

    EvaluationScore score;
    score.claim_count = verdicts.size();

    std::size_t n_none = 0;
    for (VerdictLevel level : verdicts)
        if (level == VerdictLevel::None) ++n_none;
    score.none_fraction = static_cast<double>(n_none) / static_cast<double>(verdicts.size());

    switch (config.variant) {
    case AblationVariant::FullTCVA:
        return aggregate(verdicts, config.temperature, *config.scheme, config.mapping);
    case AblationVariant::NoPenalty: {
        score = aggregate(verdicts, config.temperature, *config.scheme, config.mapping);
        score.penalty_exponent = 0.0;
        score.penalty_factor = 1.0;
        score.final_score = score.raw_score;
        return score;
    }
    case AblationVariant::ArithmeticMean: {
        score.weights_used.reserve(verdicts.size());
        for (VerdictLevel level : verdicts)
            score.weights_used.push_back(weight_of(level, *config.scheme));
        score.p_used = 1.0; // forced regardless of temperature
        break;
    }
    case AblationVariant::BinaryVerdicts: {
        score.weights_used = collapse_to_binary(verdicts);
        score.p_used = mapped_p;
        break;
    }
    }

    score.raw_score = power_mean(score.weights_used, score.p_used);
    score.penalty_exponent = 1.5 - config.temperature;
    score.penalty_factor = none_penalty_factor(n_none, verdicts.size(), config.temperature);
    score.final_score = std::clamp(score.raw_score * score.penalty_factor, 0.0, 1.0);
    return score;
}

std::vector<SweepCell> reaggregate_sweep(
    std::span<const std::vector<VerdictLevel>> verdict_lists,
    std::span<const double> temperatures, std::span<const WeightScheme> schemes,
    const TemperatureMapping& mapping) {
    if (verdict_lists.empty()) fail(Errc::empty_input, "reaggregate_sweep over an empty cache");
    if (temperatures.empty()) fail(Errc::config, "reaggregate_sweep: no temperatures configured");
    if (schemes.empty()) fail(Errc::config, "reaggregate_sweep: no weight schemes configured");

    std::vector<SweepCell> cells;
    cells.reserve(verdict_lists.size() * temperatures.size() * schemes.size());
    for (std::size_t i = 0; i < verdict_lists.size(); ++i) {
        for (double temperature : temperatures) {
            for (const WeightScheme& scheme : schemes) {
                SweepCell cell;
                cell.sample_index = i;
                cell.temperature = temperature;
                cell.scheme_name = scheme.name();
                cell.score = aggregate(verdict_lists[i], temperature, scheme, mapping);
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

} // namespace tcva
