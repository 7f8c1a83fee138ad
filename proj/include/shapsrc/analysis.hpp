#pragma once

#include <cstdint>
#include <span>

#include "shapsrc/types.hpp"

namespace shapsrc {

// Paired bootstrap significance test on per-example correctness flags.
// Resamples example indices with replacement n_samples times and returns
// the fraction of resamples where mean(a) <= mean(b) — ties count for b,
// so identical inputs give p = 1 and strict dominance of a gives p = 0.
double paired_bootstrap(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                        std::size_t n_samples = 10000, std::uint64_t seed = 0);

struct RankAgreement {
    double spearman = 0.0;
    double pearson = 0.0;
};

// Spearman (average ranks on ties) and Pearson correlation between two
// value vectors. Constant input makes both undefined and raises
// NumericError.
RankAgreement rank_agreement(std::span<const double> a, std::span<const double> b);

}  // namespace shapsrc
