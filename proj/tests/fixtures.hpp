#pragma once

// Shared test fixtures: an independent Shapley oracle, random game
// builders, and synthetic text problems for the built-in classifiers.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "shapsrc/corpus.hpp"
#include "shapsrc/oracle.hpp"
#include "shapsrc/rng.hpp"
#include "shapsrc/types.hpp"

namespace fixtures {

using namespace shapsrc;

// Independent reference implementation: averages marginal contributions
// over all m! permutations. Deliberately a different algorithm from the
// subset-enumeration formula it is used to check. Feasible for m <= 8.
inline std::vector<std::vector<double>> permutation_shapley(const TabularGame& game) {
    const std::size_t m = game.players();
    const std::size_t targets = game.targets();
    std::vector<std::uint32_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0u);

    std::vector<std::vector<double>> phi(targets, std::vector<double>(m, 0.0));
    std::size_t count = 0;
    do {
        std::uint32_t mask = 0;
        ScoreVector prev = game.value_mask(0);
        for (std::uint32_t j : perm) {
            mask |= (1u << j);
            ScoreVector cur = game.value_mask(mask);
            for (std::size_t t = 0; t < targets; ++t) phi[t][j] += cur[t] - prev[t];
            prev = std::move(cur);
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (auto& row : phi)
        for (double& v : row) v /= static_cast<double>(count);
    return phi;
}

// Uniform-random characteristic function with v({}) = 0, one target.
inline TabularGame random_game(std::size_t m, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 0x9a3eull));
    std::vector<ScoreVector> table(std::size_t{1} << m);
    table[0] = {0.0};
    for (std::size_t mask = 1; mask < table.size(); ++mask) table[mask] = {rng.uniform01()};
    return TabularGame::from_table(m, std::move(table));
}

// Multi-target uniform-random game.
inline TabularGame random_game_multi(std::size_t m, std::size_t targets, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 0x9a3e1ull));
    std::vector<ScoreVector> table(std::size_t{1} << m);
    table[0] = ScoreVector(targets, 0.0);
    for (std::size_t mask = 1; mask < table.size(); ++mask) {
        ScoreVector sv(targets);
        for (double& v : sv) v = rng.uniform01();
        table[mask] = sv;
    }
    return TabularGame::from_table(m, std::move(table));
}

// Concave "diminishing returns" game: v(S) = (1 - exp(-sum w_i)) scaled so
// the full set scores 1. Marginals shrink as the prefix grows.
inline TabularGame diminishing_game(std::size_t m, std::uint64_t seed, double total_weight) {
    SplitMix64 rng(derive_seed(seed, 0xd141ull));
    auto weights = std::make_shared<std::vector<double>>(m);
    double raw = 0.0;
    for (double& w : *weights) {
        w = 0.2 + rng.uniform01();
        raw += w;
    }
    for (double& w : *weights) w *= total_weight / raw;
    const double denom = 1.0 - std::exp(-total_weight);
    return TabularGame::from_function(m, 1, [weights, denom](std::uint32_t mask) {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights->size(); ++i)
            if (mask & (1u << i)) acc += (*weights)[i];
        return ScoreVector{(1.0 - std::exp(-acc)) / denom};
    });
}

// Additive weights plus small pairwise interactions; phi stays analytic:
//   phi_j = w_j + 0.5 * sum_i c_ij
inline TabularGame interaction_game(const std::vector<double>& weights,
                                    const std::vector<std::vector<double>>& pair_bonus) {
    const std::size_t m = weights.size();
    auto w = std::make_shared<std::vector<double>>(weights);
    auto c = std::make_shared<std::vector<std::vector<double>>>(pair_bonus);
    double hi = 0.0;
    for (double x : weights) hi += x;
    for (const auto& row : pair_bonus)
        for (double x : row) hi += std::max(0.0, x);
    return TabularGame::from_function(
        m, 1,
        [w, c](std::uint32_t mask) {
            double v = 0.0;
            for (std::size_t i = 0; i < w->size(); ++i) {
                if (!(mask & (1u << i))) continue;
                v += (*w)[i];
                for (std::size_t j = i + 1; j < w->size(); ++j)
                    if (mask & (1u << j)) v += (*c)[i][j];
            }
            return ScoreVector{v};
        },
        ScoreRange{0.0, std::max(1.0, hi)});
}

// --- synthetic text problems -------------------------------------------

struct TextProblemSpec {
    std::size_t n_classes = 3;
    std::size_t n_sources = 6;
    std::size_t instances_per_source = 500;
    std::size_t target_instances = 500;
    std::size_t doc_len = 8;
    std::size_t class_vocab = 12;   // discriminative tokens per class
    std::size_t shared_vocab = 30;  // tokens common to all classes
    double discriminative_rate = 0.45;  // chance a token is class-specific
    std::size_t noisy_source = SIZE_MAX;  // index with flipped labels, if any
    double flip_rate = 0.5;
    // Directional flips (c -> c+1) model a consistent annotation confusion;
    // uniform flips spread the noise over every wrong class.
    bool flip_directional = false;
    std::uint64_t seed = 7;
};

inline Instance make_text_instance(std::size_t label, const TextProblemSpec& spec,
                                   SplitMix64& rng) {
    Instance inst;
    inst.label = static_cast<int>(label);
    inst.tokens.reserve(spec.doc_len);
    for (std::size_t i = 0; i < spec.doc_len; ++i) {
        if (rng.uniform01() < spec.discriminative_rate) {
            inst.tokens.push_back("c" + std::to_string(label) + "w" +
                                  std::to_string(rng.below(spec.class_vocab)));
        } else {
            inst.tokens.push_back("shared" + std::to_string(rng.below(spec.shared_vocab)));
        }
    }
    return inst;
}

// Builds a text classification problem whose sources share one generative
// model. The optional noisy source keeps its true token distributions but
// has `flip_rate` of its labels reassigned to a wrong class.
inline CorpusSet make_text_problem(const TextProblemSpec& spec) {
    CorpusSet data;
    data.feature_kind = FeatureKind::Text;
    for (std::size_t c = 0; c < spec.n_classes; ++c) data.labels.push_back("L" + std::to_string(c));

    for (std::size_t s = 0; s < spec.n_sources; ++s) {
        SplitMix64 rng(derive_seed(spec.seed, 0x50u, s));
        SourceCorpus corpus;
        corpus.id = SourceId{static_cast<std::uint32_t>(s), "src" + std::to_string(s)};
        for (std::size_t i = 0; i < spec.instances_per_source; ++i) {
            const std::size_t label = rng.below(spec.n_classes);
            Instance inst = make_text_instance(label, spec, rng);
            if (s == spec.noisy_source && rng.uniform01() < spec.flip_rate) {
                const std::size_t offset =
                    spec.flip_directional ? 1 : 1 + rng.below(spec.n_classes - 1);
                inst.label = static_cast<int>((label + offset) % spec.n_classes);
            }
            corpus.instances.push_back(std::move(inst));
        }
        data.sources.push_back(std::move(corpus));
    }

    SplitMix64 rng(derive_seed(spec.seed, 0x7a9u));
    TargetCorpus target;
    target.name = "target";
    for (std::size_t i = 0; i < spec.target_instances; ++i) {
        const std::size_t label = rng.below(spec.n_classes);
        target.instances.push_back(make_text_instance(label, spec, rng));
    }
    data.targets.push_back(std::move(target));
    return data;
}

// Writes a corpus as JSONL for CLI-level tests.
inline void write_jsonl(const std::string& path, const std::vector<Instance>& instances,
                        const std::vector<std::string>& labels) {
    std::ofstream out(path);
    for (const auto& inst : instances) {
        out << "{\"text\": \"";
        for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
            if (i) out << ' ';
            out << inst.tokens[i];
        }
        out << "\", \"label\": \"" << labels[static_cast<std::size_t>(inst.label)] << "\"}\n";
    }
}

// Fresh scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("shapsrc_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace fixtures
