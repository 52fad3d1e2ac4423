#pragma once

#include <cstdint>
#include <vector>

namespace tcva {

// SplitMix64 generator. The standard library engines are portable but the
// distributions are not, so every randomized operation in this library draws
// through this class to keep results identical across platforms and runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Independent stream for substream `index` of `seed`. Resample r of a
    // bootstrap uses substream(seed, r), so parallel and serial execution
    // produce identical draws.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        Rng mixer(seed);
        std::uint64_t s = mixer.next_u64();
        Rng mixer2(index ^ 0xD1B54A32D192ED03ULL);
        return Rng(s ^ mixer2.next_u64());
    }

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace tcva
