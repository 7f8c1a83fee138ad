#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <unordered_map>

#include "shapsrc/types.hpp"

namespace shapsrc {

// Memoizes per-subset score vectors. Entries are write-once; an in-flight
// registry guarantees that concurrent misses for one key train exactly once
// (later callers block until the first writer inserts).
//
// With `enabled == false` every lookup recomputes and nothing is stored;
// since sampling is subset-seeded this changes only the hit/miss counters
// and wall time, never the scores.
class SubsetScoreCache {
public:
    explicit SubsetScoreCache(std::size_t target_arity, bool enabled = true)
        : arity_(target_arity), enabled_(enabled) {}

    // Returns the cached score or computes it via `compute`.
    ScoreVector get_or_compute(const SubsetKey& key,
                               const std::function<ScoreVector()>& compute);

    std::optional<ScoreVector> lookup(const SubsetKey& key) const;
    void insert(const SubsetKey& key, ScoreVector score);

    std::uint64_t hits() const;
    std::uint64_t misses() const;
    std::size_t size() const;
    std::size_t target_arity() const noexcept { return arity_; }
    bool enabled() const noexcept { return enabled_; }

    // Persistence: append-only record stream with a version-tagged header.
    // Each record stores (key bytes, sample seed, score vector); on load,
    // records whose stored seed disagrees with `seed_of` — i.e. written
    // under a different sampling configuration — are dropped. Returns the
    // number of entries kept.
    void save(const std::string& path,
              const std::function<std::uint64_t(const SubsetKey&)>& seed_of) const;
    std::size_t load(const std::string& path, std::size_t universe,
                     const std::function<std::uint64_t(const SubsetKey&)>& seed_of);

private:
    std::size_t arity_;
    bool enabled_;
    mutable std::mutex mu_;
    mutable std::condition_variable ready_;
    std::unordered_map<SubsetKey, ScoreVector, SubsetKeyHash> entries_;
    std::set<SubsetKey> in_flight_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

}  // namespace shapsrc
