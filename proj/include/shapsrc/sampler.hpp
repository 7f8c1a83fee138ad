#pragma once

#include <cstdint>
#include <span>

#include "shapsrc/corpus.hpp"
#include "shapsrc/types.hpp"

namespace shapsrc {

// Stratified subsampling parameters: fraction of each source to draw.
struct SampleSpec {
    double rate = 1.0;            // eta in (0, 1]
    std::uint64_t base_seed = 0;  // all draws derive from this
};

// Seed of the draw for one subset. Binding the seed to the SubsetKey makes
// every (subset, spec) pair map to exactly one reproducible bundle, so a
// cached score stays consistent with the sample that produced it.
std::uint64_t sample_seed_for(const SampleSpec& spec, const SubsetKey& subset);

// Draws ceil(rate * n_x) distinct instance indices from each source x in
// the subset, uniformly without replacement. rate == 1 returns all indices
// in load order. Indices within each stratum come out ascending.
TrainBundle stratified_sample(const SubsetKey& subset,
                              std::span<const std::size_t> source_sizes,
                              const SampleSpec& spec);

}  // namespace shapsrc
