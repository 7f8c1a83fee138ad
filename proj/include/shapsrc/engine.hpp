#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "shapsrc/cache.hpp"
#include "shapsrc/oracle.hpp"
#include "shapsrc/sampler.hpp"
#include "shapsrc/types.hpp"

namespace shapsrc {

// Surrogate for the empty-coalition score at the start of each permutation.
enum class RhoPolicy {
    Random,      // untrained / label-prior model score
    FracSingle,  // ((m-1)/m) * mean over single-source scores
    Const,       // a fixed constant, must lie in the oracle's score range
    AllHalf,     // full-set score / 2
    All,         // full-set score
    Mu,          // mean of the full-set score and all single-source scores
    EmptyScore,  // the oracle's declared empty-model score
};

struct RhoSpec {
    RhoPolicy policy = RhoPolicy::EmptyScore;
    double constant = 0.0;  // Const only
};

struct ConvergenceSpec {
    std::uint32_t window = 10;
    // Max |phi_t - phi_{t-window}| below which the run stops. Defaults to
    // 1e-3 of the oracle's score range; 0 disables early stopping.
    std::optional<double> epsilon;
};

struct EngineConfig {
    std::uint64_t nepoch = 1;
    double tolerance = 0.0;  // truncation threshold in score units; 0 = off
    RhoSpec rho;
    SampleSpec sample;
    ConvergenceSpec convergence;
    std::uint64_t seed = 0;
    std::uint32_t workers = 1;
    bool use_cache = true;
    bool record_trace = false;
};

// Exact Shapley values by direct subset enumeration:
//   phi_j = (1/m) * sum over subsets W of D\{j} of
//           [score(W + j) - score(W)] / C(m-1, |W|)
// with score({}) = empty_score. Refuses m > 16 (2^m evaluations).
std::vector<std::vector<double>> exact_shapley(
    const std::function<ScoreVector(const SubsetKey&)>& score, std::size_t m,
    const ScoreVector& empty_score);

// Resolves the initial score rho once per run. Policies needing subset
// scores draw them through `cache` when given (so the engine reuses them).
ScoreVector resolve_rho(const RhoSpec& rho, Oracle& oracle,
                        std::span<const std::size_t> source_sizes, const SampleSpec& sample,
                        SubsetScoreCache* cache = nullptr);

// Truncated Monte-Carlo permutation sampling over source subsets with
// stratified subset-seeded sampling and subset-score caching. Deterministic
// for a fixed (seed, config, oracle) regardless of worker count or whether
// the cache is enabled.
ValuationResult seal_shap(Oracle& oracle, std::span<const std::size_t> source_sizes,
                          const EngineConfig& config, SubsetScoreCache* cache = nullptr);

// Single-source transfer scores: value[t][j] = score({j})[t].
std::vector<std::vector<double>> baseline_single(Oracle& oracle,
                                                 std::span<const std::size_t> source_sizes,
                                                 const SampleSpec& sample);

// Leave-one-out: value[t][j] = score(D)[t] - score(D \ {j})[t].
std::vector<std::vector<double>> baseline_loo(Oracle& oracle,
                                              std::span<const std::size_t> source_sizes,
                                              const SampleSpec& sample);

// m uniform draws in [0, 1); deterministic per seed.
std::vector<double> baseline_random(std::size_t m, std::uint64_t seed);

// Greedy forward selection on one target: extend the current set by the
// source maximizing the resulting score, ties toward the smallest index.
std::vector<std::uint32_t> greedy_dfs(Oracle& oracle, std::span<const std::size_t> source_sizes,
                                      std::size_t target_index, std::size_t k,
                                      const SampleSpec& sample);

}  // namespace shapsrc
