#include "shapsrc/engine.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <numeric>

#include "shapsrc/rng.hpp"

namespace shapsrc {

namespace {

// Distinct stream tags so permutation draws never collide with sample draws.
constexpr std::uint64_t kEpochStream = 0xE70C5ull;

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

struct Counters {
    std::atomic<std::uint64_t> trainings{0};
};

// Shared scoring path: cached subset score, computed on miss from a fresh
// subset-seeded stratified sample.
ScoreVector score_subset(const SubsetKey& key, Oracle& oracle,
                         std::span<const std::size_t> sizes, const SampleSpec& sample,
                         SubsetScoreCache& cache, Counters& counters) {
    return cache.get_or_compute(key, [&]() {
        TrainBundle bundle = stratified_sample(key, sizes, sample);
        counters.trainings.fetch_add(1, std::memory_order_relaxed);
        return oracle.score(bundle);
    });
}

}  // namespace

std::vector<std::vector<double>> exact_shapley(
    const std::function<ScoreVector(const SubsetKey&)>& score, std::size_t m,
    const ScoreVector& empty_score) {
    if (m == 0) throw InvalidInput("exact_shapley: no sources");
    if (m > 16)
        throw InvalidInput("exact_shapley: m = " + std::to_string(m) +
                           " exceeds the 2^m enumeration guard (16); use the Monte-Carlo engine");
    const std::size_t targets = empty_score.size();
    if (targets == 0) throw InvalidInput("exact_shapley: empty score has no targets");

    // Evaluate every subset once.
    const std::size_t n_masks = std::size_t{1} << m;
    std::vector<ScoreVector> table(n_masks);
    table[0] = empty_score;
    for (std::size_t mask = 1; mask < n_masks; ++mask) {
        table[mask] = score(SubsetKey::from_mask(static_cast<std::uint32_t>(mask)));
        if (table[mask].size() != targets)
            throw OracleFailure("score function returned wrong arity for a subset");
    }

    // Precompute 1 / (m * C(m-1, s)) per subset size s.
    std::vector<double> weight(m);
    for (std::size_t s = 0; s < m; ++s)
        weight[s] = 1.0 / (static_cast<double>(m) * binomial(m - 1, s));

    std::vector<std::vector<double>> phi(targets, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const double w = weight[static_cast<std::size_t>(std::popcount(mask))];
            const ScoreVector& with = table[mask | bit];
            const ScoreVector& without = table[mask];
            for (std::size_t t = 0; t < targets; ++t)
                phi[t][j] += w * (with[t] - without[t]);
        }
    }
    return phi;
}

ScoreVector resolve_rho(const RhoSpec& rho, Oracle& oracle,
                        std::span<const std::size_t> sizes, const SampleSpec& sample,
                        SubsetScoreCache* cache) {
    const std::size_t m = sizes.size();
    const std::size_t targets = oracle.target_count();
    SubsetScoreCache local(targets, true);
    SubsetScoreCache& c = cache ? *cache : local;
    Counters counters;

    auto subset_score = [&](const SubsetKey& key) {
        return score_subset(key, oracle, sizes, sample, c, counters);
    };

    switch (rho.policy) {
        case RhoPolicy::EmptyScore:
            return oracle.empty_score();
        case RhoPolicy::Random:
            return oracle.untrained_score();
        case RhoPolicy::Const: {
            const ScoreRange range = oracle.score_range();
            if (rho.constant < range.lo || rho.constant > range.hi)
                throw InvalidInput("rho constant " + std::to_string(rho.constant) +
                                   " outside the oracle's score range");
            return ScoreVector(targets, rho.constant);
        }
        case RhoPolicy::All:
            return subset_score(SubsetKey::full(m));
        case RhoPolicy::AllHalf: {
            ScoreVector v = subset_score(SubsetKey::full(m));
            for (double& x : v) x *= 0.5;
            return v;
        }
        case RhoPolicy::FracSingle: {
            ScoreVector acc(targets, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                ScoreVector s = subset_score(SubsetKey{}.with(static_cast<std::uint32_t>(j)));
                for (std::size_t t = 0; t < targets; ++t) acc[t] += s[t];
            }
            const double frac = m > 0 ? static_cast<double>(m - 1) / static_cast<double>(m) : 0.0;
            for (double& x : acc) x = frac * (x / static_cast<double>(m));
            return acc;
        }
        case RhoPolicy::Mu: {
            ScoreVector acc = subset_score(SubsetKey::full(m));
            for (std::size_t j = 0; j < m; ++j) {
                ScoreVector s = subset_score(SubsetKey{}.with(static_cast<std::uint32_t>(j)));
                for (std::size_t t = 0; t < targets; ++t) acc[t] += s[t];
            }
            for (double& x : acc) x /= static_cast<double>(m + 1);
            return acc;
        }
    }
    throw InvalidInput("unknown rho policy");
}

namespace {

struct EpochOutcome {
    std::vector<std::vector<double>> marginals;  // [target][source]
    std::uint64_t truncations = 0;
};

EpochOutcome run_epoch(std::uint64_t epoch, Oracle& oracle,
                       std::span<const std::size_t> sizes, const EngineConfig& cfg,
                       const ScoreVector& s_full, const ScoreVector& rho,
                       SubsetScoreCache& cache, Counters& counters) {
    const std::size_t m = sizes.size();
    const std::size_t targets = s_full.size();

    std::vector<std::uint32_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0u);
    SplitMix64 rng(derive_seed(cfg.seed, kEpochStream, epoch));
    shuffle(perm, rng);

    EpochOutcome out;
    out.marginals.assign(targets, std::vector<double>(m, 0.0));

    ScoreVector v_prev = rho;
    ScoreVector v_cur(targets);
    SubsetKey key;
    for (std::size_t j = 0; j < m; ++j) {
        const std::uint32_t source = perm[j];
        key = key.with(source);

        // Per-target truncation against the full-sample reference score.
        // The subset is trained only if at least one target still needs it.
        bool need_score = false;
        for (std::size_t t = 0; t < targets; ++t)
            if (!(std::abs(s_full[t] - v_prev[t]) < cfg.tolerance)) {
                need_score = true;
                break;
            }

        ScoreVector subset_score;
        if (need_score)
            subset_score = score_subset(key, oracle, sizes, cfg.sample, cache, counters);

        for (std::size_t t = 0; t < targets; ++t) {
            if (std::abs(s_full[t] - v_prev[t]) < cfg.tolerance) {
                v_cur[t] = v_prev[t];
                ++out.truncations;
            } else {
                v_cur[t] = subset_score[t];
            }
            out.marginals[t][source] = v_cur[t] - v_prev[t];
        }
        v_prev = v_cur;
    }
    return out;
}

}  // namespace

ValuationResult seal_shap(Oracle& oracle, std::span<const std::size_t> sizes,
                          const EngineConfig& cfg, SubsetScoreCache* external_cache) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::size_t m = sizes.size();
    if (m == 0) throw InvalidInput("seal_shap: no sources");
    const std::size_t targets = oracle.target_count();
    if (targets == 0) throw InvalidInput("seal_shap: oracle declares no targets");
    if (cfg.nepoch == 0) throw InvalidInput("seal_shap: nepoch must be >= 1");
    if (cfg.tolerance < 0) throw InvalidInput("seal_shap: tolerance must be >= 0");
    if (cfg.convergence.window == 0) throw InvalidInput("seal_shap: convergence window must be >= 1");
    if (cfg.convergence.epsilon && *cfg.convergence.epsilon < 0)
        throw InvalidInput("seal_shap: convergence epsilon must be >= 0");

    SubsetScoreCache own_cache(targets, cfg.use_cache);
    SubsetScoreCache& cache = external_cache ? *external_cache : own_cache;
    if (cache.target_arity() != targets)
        throw InvalidInput("cache arity does not match oracle target count");

    Counters counters;

    // Full-universe reference model (sampled once, subset-seeded), then rho.
    const ScoreVector s_full =
        score_subset(SubsetKey::full(m), oracle, sizes, cfg.sample, cache, counters);
    const ScoreVector rho = resolve_rho(cfg.rho, oracle, sizes, cfg.sample, &cache);
    if (rho.size() != targets) throw InvalidInput("rho arity does not match target count");

    const ScoreRange range = oracle.score_range();
    const double epsilon =
        cfg.convergence.epsilon.value_or(1e-3 * (range.hi - range.lo));

    ValuationResult result;
    result.seed = cfg.seed;
    result.values.assign(targets, std::vector<double>(m, 0.0));

    // Ring buffer of the last `window` snapshots for the convergence test.
    std::deque<std::vector<std::vector<double>>> history;

    const std::uint32_t workers = std::max<std::uint32_t>(1, cfg.workers);
    std::deque<std::pair<std::uint64_t, std::future<EpochOutcome>>> pending;
    std::uint64_t next_epoch = 1;

    auto launch = [&](std::uint64_t epoch) {
        pending.emplace_back(epoch, std::async(std::launch::async, [&, epoch]() {
                                 return run_epoch(epoch, oracle, sizes, cfg, s_full, rho, cache,
                                                  counters);
                             }));
    };

    auto run_inline = [&](std::uint64_t epoch) {
        return run_epoch(epoch, oracle, sizes, cfg, s_full, rho, cache, counters);
    };

    bool stopped = false;
    std::uint64_t folded = 0;
    while (folded < cfg.nepoch && !stopped) {
        EpochOutcome outcome;
        std::uint64_t epoch;
        if (workers == 1) {
            epoch = next_epoch++;
            outcome = run_inline(epoch);
        } else {
            while (pending.size() < workers && next_epoch <= cfg.nepoch) launch(next_epoch++);
            epoch = pending.front().first;
            outcome = pending.front().second.get();
            pending.pop_front();
        }

        // Running mean over epochs, folded strictly in epoch order so the
        // result is independent of worker scheduling.
        const double t = static_cast<double>(epoch);
        for (std::size_t ti = 0; ti < targets; ++ti)
            for (std::size_t j = 0; j < m; ++j)
                result.values[ti][j] = (t - 1.0) / t * result.values[ti][j] +
                                       outcome.marginals[ti][j] / t;
        result.truncations += outcome.truncations;
        folded = epoch;
        if (cfg.record_trace) result.trace.push_back(result.values);

        if (epsilon > 0.0) {
            history.push_back(result.values);
            if (history.size() > cfg.convergence.window + 1) history.pop_front();
            if (history.size() == cfg.convergence.window + 1) {
                const auto& old = history.front();
                double max_delta = 0.0;
                for (std::size_t ti = 0; ti < targets; ++ti)
                    for (std::size_t j = 0; j < m; ++j)
                        max_delta = std::max(max_delta,
                                             std::abs(result.values[ti][j] - old[ti][j]));
                if (max_delta < epsilon) {
                    result.converged = true;
                    stopped = true;
                }
            }
        }
    }
    // Drain speculative epochs; their cache inserts are harmless.
    for (auto& [e, fut] : pending) fut.get();

    result.epochs_run = folded;
    result.cache_hits = cache.hits();
    result.cache_misses = cache.misses();
    result.oracle_trainings = counters.trainings.load();
    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
    return result;
}

std::vector<std::vector<double>> baseline_single(Oracle& oracle,
                                                 std::span<const std::size_t> sizes,
                                                 const SampleSpec& sample) {
    const std::size_t m = sizes.size();
    if (m == 0) throw InvalidInput("baseline_single: no sources");
    const std::size_t targets = oracle.target_count();
    std::vector<std::vector<double>> values(targets, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        TrainBundle bundle =
            stratified_sample(SubsetKey{}.with(static_cast<std::uint32_t>(j)), sizes, sample);
        ScoreVector s = oracle.score(bundle);
        for (std::size_t t = 0; t < targets; ++t) values[t][j] = s[t];
    }
    return values;
}

std::vector<std::vector<double>> baseline_loo(Oracle& oracle,
                                              std::span<const std::size_t> sizes,
                                              const SampleSpec& sample) {
    const std::size_t m = sizes.size();
    if (m < 2) throw InvalidInput("baseline_loo: needs at least two sources");
    const std::size_t targets = oracle.target_count();
    const SubsetKey full = SubsetKey::full(m);
    ScoreVector s_all = oracle.score(stratified_sample(full, sizes, sample));
    std::vector<std::vector<double>> values(targets, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        SubsetKey rest = full.without(static_cast<std::uint32_t>(j));
        ScoreVector s = oracle.score(stratified_sample(rest, sizes, sample));
        for (std::size_t t = 0; t < targets; ++t) values[t][j] = s_all[t] - s[t];
    }
    return values;
}

std::vector<double> baseline_random(std::size_t m, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 0xba5e11ull));
    std::vector<double> values(m);
    for (double& v : values) v = rng.uniform01();
    return values;
}

std::vector<std::uint32_t> greedy_dfs(Oracle& oracle, std::span<const std::size_t> sizes,
                                      std::size_t target_index, std::size_t k,
                                      const SampleSpec& sample) {
    const std::size_t m = sizes.size();
    if (k < 1 || k > m) throw InvalidInput("greedy_dfs: k must be in [1, m]");
    if (target_index >= oracle.target_count())
        throw InvalidInput("greedy_dfs: target index out of range");

    std::vector<std::uint32_t> order;
    std::vector<bool> taken(m, false);
    SubsetKey chosen;
    for (std::size_t step = 0; step < k; ++step) {
        double best_score = 0.0;
        std::uint32_t best = 0;
        bool found = false;
        for (std::uint32_t x = 0; x < m; ++x) {
            if (taken[x]) continue;
            SubsetKey candidate = chosen.with(x);
            ScoreVector s = oracle.score(stratified_sample(candidate, sizes, sample));
            if (!found || s[target_index] > best_score) {  // ties keep the smallest index
                found = true;
                best_score = s[target_index];
                best = x;
            }
        }
        taken[best] = true;
        chosen = chosen.with(best);
        order.push_back(best);
    }
    return order;
}

}  // namespace shapsrc
