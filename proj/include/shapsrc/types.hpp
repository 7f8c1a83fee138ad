#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapsrc {

// Malformed arguments, out-of-range indices, schema violations.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure (singular system, undefined statistic).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A score oracle broke its contract (process died, bad response, NaN).
// Carries the raw payload so callers can surface it.
class OracleFailure : public std::runtime_error {
public:
    OracleFailure(const std::string& msg, std::string payload = {})
        : std::runtime_error(msg), payload_(std::move(payload)) {}
    const std::string& payload() const noexcept { return payload_; }

private:
    std::string payload_;
};

// One source corpus identity. Indices are dense 0..m-1 within a problem.
struct SourceId {
    std::uint32_t index = 0;
    std::string name;
};

// Per-target evaluation scores of one trained model.
using ScoreVector = std::vector<double>;

// Canonical identity of an unordered set of source indices.
// Members are kept sorted ascending and duplicate-free, so two subsets
// with the same members compare equal and serialize to identical bytes.
class SubsetKey {
public:
    SubsetKey() = default;

    const std::vector<std::uint32_t>& members() const noexcept { return members_; }
    bool empty() const noexcept { return members_.empty(); }
    std::size_t size() const noexcept { return members_.size(); }

    bool contains(std::uint32_t index) const {
        return std::binary_search(members_.begin(), members_.end(), index);
    }

    // Key for the subset extended with one more member.
    SubsetKey with(std::uint32_t index) const {
        SubsetKey out = *this;
        auto pos = std::lower_bound(out.members_.begin(), out.members_.end(), index);
        if (pos != out.members_.end() && *pos == index) return out;
        out.members_.insert(pos, index);
        return out;
    }

    SubsetKey without(std::uint32_t index) const {
        SubsetKey out = *this;
        auto pos = std::lower_bound(out.members_.begin(), out.members_.end(), index);
        if (pos != out.members_.end() && *pos == index) out.members_.erase(pos);
        return out;
    }

    // Fixed-width little-endian serialization, 4 bytes per member.
    // Stable across runs; used directly as the on-disk cache key.
    std::string bytes() const {
        std::string out;
        out.resize(members_.size() * 4);
        for (std::size_t i = 0; i < members_.size(); ++i) {
            std::uint32_t v = members_[i];
            out[4 * i + 0] = static_cast<char>(v & 0xff);
            out[4 * i + 1] = static_cast<char>((v >> 8) & 0xff);
            out[4 * i + 2] = static_cast<char>((v >> 16) & 0xff);
            out[4 * i + 3] = static_cast<char>((v >> 24) & 0xff);
        }
        return out;
    }

    // Bitmask form, usable for tabular games with m <= 32.
    std::uint32_t mask() const {
        std::uint32_t m = 0;
        for (std::uint32_t x : members_) m |= (1u << x);
        return m;
    }

    static SubsetKey from_mask(std::uint32_t mask) {
        SubsetKey out;
        for (std::uint32_t i = 0; i < 32; ++i)
            if (mask & (1u << i)) out.members_.push_back(i);
        return out;
    }

    // Full universe {0, .., m-1}.
    static SubsetKey full(std::size_t m) {
        SubsetKey out;
        out.members_.resize(m);
        for (std::size_t i = 0; i < m; ++i) out.members_[i] = static_cast<std::uint32_t>(i);
        return out;
    }

    auto operator<=>(const SubsetKey&) const = default;

private:
    friend SubsetKey make_subset_key(std::span<const std::uint32_t>, std::size_t);
    std::vector<std::uint32_t> members_;
};

// Canonicalize a member list into a SubsetKey. Order of input is irrelevant.
// Duplicate or out-of-range indices are rejected.
inline SubsetKey make_subset_key(std::span<const std::uint32_t> members, std::size_t universe) {
    SubsetKey out;
    out.members_.assign(members.begin(), members.end());
    std::sort(out.members_.begin(), out.members_.end());
    for (std::size_t i = 0; i < out.members_.size(); ++i) {
        if (out.members_[i] >= universe)
            throw InvalidInput("subset member " + std::to_string(out.members_[i]) +
                               " outside universe of size " + std::to_string(universe));
        if (i > 0 && out.members_[i] == out.members_[i - 1])
            throw InvalidInput("duplicate subset member " + std::to_string(out.members_[i]));
    }
    return out;
}

struct SubsetKeyHash {
    std::size_t operator()(const SubsetKey& key) const noexcept {
        // FNV-1a over the member words
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint32_t v : key.members()) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// Output of a valuation engine run: per-target, per-source value estimates
// plus convergence and cache diagnostics.
struct ValuationResult {
    std::vector<std::vector<double>> values;  // [target][source]
    std::uint64_t epochs_run = 0;
    bool converged = false;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::uint64_t oracle_trainings = 0;  // equals cache_misses: every miss trains once
    std::uint64_t truncations = 0;       // per-target truncated steps
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    // Per-epoch snapshots of the value matrix, recorded only on request.
    std::vector<std::vector<std::vector<double>>> trace;
};

}  // namespace shapsrc
