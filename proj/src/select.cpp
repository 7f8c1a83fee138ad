#include "shapsrc/select.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace shapsrc {

std::vector<std::uint32_t> select_topk(std::span<const double> values, std::size_t k) {
    const std::size_t m = values.size();
    if (k < 1 || k > m) throw InvalidInput("select_topk: k must be in [1, m]");
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    order.resize(k);
    return order;
}

std::vector<std::uint32_t> select_threshold(std::span<const double> values, double theta) {
    std::vector<std::uint32_t> out;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (values[j] > theta) out.push_back(static_cast<std::uint32_t>(j));
    return out;
}

SelectionReport tune_threshold(std::span<const double> values,
                               std::span<const double> candidates, Oracle& oracle,
                               std::span<const std::size_t> sizes, std::size_t dev_target,
                               const SampleSpec& sample) {
    const std::size_t m = values.size();
    if (m == 0) throw InvalidInput("tune_threshold: no values");
    if (candidates.empty()) throw InvalidInput("tune_threshold: no candidate thresholds");
    if (dev_target >= oracle.target_count())
        throw InvalidInput("tune_threshold: dev target index out of range");

    const SubsetKey all = SubsetKey::full(m);
    const ScoreVector all_scores = oracle.score(stratified_sample(all, sizes, sample));
    const double all_dev = all_scores[dev_target];

    SelectionReport report;

    // Larger theta first, so on ties the smaller subset is kept.
    std::vector<double> thetas(candidates.begin(), candidates.end());
    std::sort(thetas.begin(), thetas.end(), std::greater<>());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

    std::map<SubsetKey, ScoreVector> evaluated;  // same subset from two thetas scores once
    bool have_best = false;
    double best_dev = 0.0;
    double best_theta = 0.0;
    std::vector<std::uint32_t> best_subset;

    for (double theta : thetas) {
        auto subset = select_threshold(values, theta);
        if (subset.empty() || subset.size() == m) continue;  // proper non-empty subsets only
        SubsetKey key = make_subset_key(subset, m);
        auto it = evaluated.find(key);
        if (it == evaluated.end()) {
            ScoreVector s = oracle.score(stratified_sample(key, sizes, sample));
            it = evaluated.emplace(key, std::move(s)).first;
        }
        report.dev_scores.emplace_back(theta, it->second);
        const double dev = it->second[dev_target];
        if (!have_best || dev > best_dev) {
            have_best = true;
            best_dev = dev;
            best_theta = theta;
            best_subset = subset;
        }
    }

    if (have_best && best_dev > all_dev) {
        report.chosen = best_subset;
        report.theta_used = best_theta;
        report.fallback_all = false;
    } else {
        report.chosen.resize(m);
        std::iota(report.chosen.begin(), report.chosen.end(), 0u);
        report.fallback_all = true;
    }
    return report;
}

}  // namespace shapsrc
