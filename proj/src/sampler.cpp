#include "shapsrc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapsrc/rng.hpp"

namespace shapsrc {

namespace {

std::uint64_t subset_hash(const SubsetKey& subset) {
    std::uint64_t h = 0x5ab5e7ull;
    for (std::uint32_t v : subset.members()) h = mix_seed(h, v);
    return h;
}

}  // namespace

std::uint64_t sample_seed_for(const SampleSpec& spec, const SubsetKey& subset) {
    return derive_seed(spec.base_seed, subset_hash(subset));
}

TrainBundle stratified_sample(const SubsetKey& subset,
                              std::span<const std::size_t> source_sizes,
                              const SampleSpec& spec) {
    if (subset.empty()) throw InvalidInput("stratified_sample: empty subset");
    if (!(spec.rate > 0.0) || spec.rate > 1.0)
        throw InvalidInput("stratified_sample: rate must be in (0, 1]");

    TrainBundle bundle;
    bundle.per_source.reserve(subset.size());
    const std::uint64_t subset_seed = sample_seed_for(spec, subset);

    for (std::uint32_t x : subset.members()) {
        if (x >= source_sizes.size())
            throw InvalidInput("stratified_sample: source " + std::to_string(x) +
                               " has no corpus");
        const std::size_t n = source_sizes[x];
        if (n == 0) throw InvalidInput("stratified_sample: source " + std::to_string(x) +
                                       " is empty");

        TrainBundle::Part part;
        part.source = x;
        if (spec.rate == 1.0) {
            part.indices.resize(n);
            std::iota(part.indices.begin(), part.indices.end(), 0u);
        } else {
            const auto k = static_cast<std::size_t>(
                std::ceil(spec.rate * static_cast<double>(n)));
            // Partial Fisher-Yates: the first k slots are a uniform
            // without-replacement draw. Each stratum gets its own stream.
            SplitMix64 rng(derive_seed(subset_seed, x));
            std::vector<std::uint32_t> pool(n);
            std::iota(pool.begin(), pool.end(), 0u);
            for (std::size_t i = 0; i < k; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
                std::swap(pool[i], pool[j]);
            }
            part.indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
            std::sort(part.indices.begin(), part.indices.end());
        }
        bundle.per_source.push_back(std::move(part));
    }
    return bundle;
}

}  // namespace shapsrc
