#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shapsrc/oracle.hpp"
#include "shapsrc/sampler.hpp"

namespace shapsrc {

struct SelectionReport {
    std::vector<std::uint32_t> chosen;               // never empty
    std::optional<double> theta_used;                // unset on fallback
    std::vector<std::pair<double, ScoreVector>> dev_scores;  // evaluated theta -> scores
    bool fallback_all = false;                        // true => chosen == all sources
};

// k sources of highest value; ties toward the smallest index; output
// ordered by descending value.
std::vector<std::uint32_t> select_topk(std::span<const double> values, std::size_t k);

// Sources with value strictly greater than theta, ascending by index.
// May be empty; callers handle that.
std::vector<std::uint32_t> select_threshold(std::span<const double> values, double theta);

// Tries each candidate theta that yields a non-empty proper subset, scores
// it on the dev target, and keeps the best. Ties between thetas resolve
// toward the larger theta (smaller subset). If no subset strictly beats the
// all-sources dev score, falls back to all sources.
SelectionReport tune_threshold(std::span<const double> values,
                               std::span<const double> candidates, Oracle& oracle,
                               std::span<const std::size_t> source_sizes,
                               std::size_t dev_target, const SampleSpec& sample);

}  // namespace shapsrc
