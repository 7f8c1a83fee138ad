#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace shapsrc {

// All randomness in the project flows through this generator so that runs
// are reproducible bit-for-bit across platforms and standard libraries.
// (std::uniform_int_distribution is not portable across implementations.)
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        if (bound < 2) return 0;
        __uint128_t wide = static_cast<__uint128_t>(next()) * bound;
        auto low = static_cast<std::uint64_t>(wide);
        if (low < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                wide = static_cast<__uint128_t>(next()) * bound;
                low = static_cast<std::uint64_t>(wide);
            }
        }
        return static_cast<std::uint64_t>(wide >> 64);
    }
};

// One mixing round of the splitmix finalizer, used to fold words into a seed.
inline std::uint64_t mix_seed(std::uint64_t h, std::uint64_t word) {
    std::uint64_t z = h + 0x9e3779b97f4a7c15ull + word;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::span<const std::uint64_t> words) {
    std::uint64_t h = mix_seed(base, 0x5eed5eed5eed5eedull);
    for (std::uint64_t w : words) h = mix_seed(h, w);
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
    std::uint64_t words[] = {a};
    return derive_seed(base, words);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t words[] = {a, b};
    return derive_seed(base, words);
}

// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace shapsrc
