#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcva {

// Five-level verdict scale, ordered from full compliance down to none.
enum class VerdictLevel : int {
    Fully = 0,
    Mostly = 1,
    Partially = 2,
    Minor = 3,
    None = 4,
};

inline constexpr std::size_t kVerdictLevelCount = 5;

inline constexpr std::array<VerdictLevel, kVerdictLevelCount> kAllVerdictLevels = {
    VerdictLevel::Fully, VerdictLevel::Mostly, VerdictLevel::Partially,
    VerdictLevel::Minor, VerdictLevel::None};

// Canonical name ("Fully", "Mostly", ...).
std::string_view to_string(VerdictLevel level);

// Case-insensitive lookup of a level name; nullopt if unrecognized.
std::optional<VerdictLevel> parse_verdict_level(std::string_view text);

// Maps each verdict level to a weight in [0,1]. Every scheme pins
// Fully = 1.0 and None = 0.0 and is strictly decreasing along the level
// order; the constructor rejects anything else.
class WeightScheme {
public:
    WeightScheme(std::string name, const std::array<double, kVerdictLevelCount>& weights);

    double weight(VerdictLevel level) const {
        return weights_[static_cast<std::size_t>(level)];
    }

    const std::string& name() const { return name_; }
    const std::array<double, kVerdictLevelCount>& weights() const { return weights_; }

    // The four named schemes: Default {1.0, 0.9, 0.7, 0.3, 0.0},
    // Linear {1.0, 0.75, 0.5, 0.25, 0.0}, Aggressive {1.0, 0.95, 0.8, 0.1, 0.0},
    // Conservative {1.0, 0.8, 0.5, 0.2, 0.0}. Lookup is case-sensitive;
    // throws Errc::config for unknown names.
    static const WeightScheme& named(std::string_view name);
    static std::vector<std::string> known_names();

private:
    std::string name_;
    std::array<double, kVerdictLevelCount> weights_;
};

// weight_of(level, scheme): total over the five levels.
inline double weight_of(VerdictLevel level, const WeightScheme& scheme) {
    return scheme.weight(level);
}

} // namespace tcva
