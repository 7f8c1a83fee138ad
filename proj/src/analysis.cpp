#include "shapsrc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "shapsrc/rng.hpp"

namespace shapsrc {

double paired_bootstrap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                        std::size_t n_samples, std::uint64_t seed) {
    const std::size_t n = a.size();
    if (n == 0 || b.size() != n)
        throw InvalidInput("paired_bootstrap: flag vectors must be non-empty and equal length");
    if (n_samples == 0) throw InvalidInput("paired_bootstrap: n_samples must be positive");

    SplitMix64 rng(derive_seed(seed, 0xb0075ull));
    std::size_t le_count = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        // Equal lengths make the mean comparison an integer sum comparison.
        std::int64_t sum_a = 0, sum_b = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = static_cast<std::size_t>(rng.below(n));
            sum_a += a[idx];
            sum_b += b[idx];
        }
        if (sum_a <= sum_b) ++le_count;
    }
    return static_cast<double>(le_count) / static_cast<double>(n_samples);
}

namespace {

// Ranks with ties replaced by the average rank of the tied block.
std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson_of(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va == 0.0 || vb == 0.0)
        throw NumericError("correlation undefined for a constant vector");
    return cov / std::sqrt(va * vb);
}

}  // namespace

RankAgreement rank_agreement(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw InvalidInput("rank_agreement: need two equal-length vectors of size >= 2");
    for (double v : a)
        if (!std::isfinite(v)) throw InvalidInput("rank_agreement: non-finite value");
    for (double v : b)
        if (!std::isfinite(v)) throw InvalidInput("rank_agreement: non-finite value");

    RankAgreement out;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    out.spearman = pearson_of(ra, rb);
    out.pearson = pearson_of(a, b);
    return out;
}

}  // namespace shapsrc
