#include "tcva/verdict.hpp"

#include <algorithm>
#include <cctype>

#include "tcva/error.hpp"

namespace tcva {

std::string_view to_string(VerdictLevel level) {
    switch (level) {
    case VerdictLevel::Fully: return "Fully";
    case VerdictLevel::Mostly: return "Mostly";
    case VerdictLevel::Partially: return "Partially";
    case VerdictLevel::Minor: return "Minor";
    case VerdictLevel::None: return "None";
    }
    return "?";
}

std::optional<VerdictLevel> parse_verdict_level(std::string_view text) {
    auto eq_icase = [](std::string_view a, std::string_view b) {
        return a.size() == b.size() &&
               std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
                   return std::tolower(static_cast<unsigned char>(x)) ==
                          std::tolower(static_cast<unsigned char>(y));
               });
    };
    for (VerdictLevel level : kAllVerdictLevels) {
        if (eq_icase(text, to_string(level))) return level;
    }
    return std::nullopt;
}

WeightScheme::WeightScheme(std::string name,
                           const std::array<double, kVerdictLevelCount>& weights)
    : name_(std::move(name)), weights_(weights) {
    if (name_.empty()) fail(Errc::contract, "weight scheme name must be nonempty");
    if (weights_.front() != 1.0)
        fail(Errc::contract, "scheme '" + name_ + "': weight(Fully) must be 1.0");
    if (weights_.back() != 0.0)
        fail(Errc::contract, "scheme '" + name_ + "': weight(None) must be 0.0");
    for (std::size_t i = 1; i < weights_.size(); ++i) {
        if (!(weights_[i] < weights_[i - 1]))
            fail(Errc::contract,
                 "scheme '" + name_ + "': weights must be strictly decreasing");
    }
}

namespace {

const WeightScheme kDefault{"Default", {1.0, 0.9, 0.7, 0.3, 0.0}};
const WeightScheme kLinear{"Linear", {1.0, 0.75, 0.5, 0.25, 0.0}};
const WeightScheme kAggressive{"Aggressive", {1.0, 0.95, 0.8, 0.1, 0.0}};
const WeightScheme kConservative{"Conservative", {1.0, 0.8, 0.5, 0.2, 0.0}};

} // namespace

const WeightScheme& WeightScheme::named(std::string_view name) {
    if (name == "Default") return kDefault;
    if (name == "Linear") return kLinear;
    if (name == "Aggressive") return kAggressive;
    if (name == "Conservative") return kConservative;
    fail(Errc::config, "unknown weight scheme '" + std::string(name) +
                           "' (known: Default, Linear, Aggressive, Conservative)");
}

std::vector<std::string> WeightScheme::known_names() {
    return {"Default", "Linear", "Aggressive", "Conservative"};
}

} // namespace tcva
