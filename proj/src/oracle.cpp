#include "shapsrc/oracle.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace shapsrc {

TabularGame TabularGame::from_function(std::size_t players, std::size_t targets,
                                       std::function<ScoreVector(std::uint32_t)> fn,
                                       ScoreRange range) {
    if (players == 0 || players > 32) throw InvalidInput("tabular game needs 1..32 players");
    if (targets == 0) throw InvalidInput("tabular game needs at least one target");
    TabularGame g;
    g.players_ = players;
    g.targets_ = targets;
    g.range_ = range;
    g.fn_ = std::move(fn);
    return g;
}

TabularGame TabularGame::from_table(std::size_t players, std::vector<ScoreVector> by_mask,
                                    ScoreRange range) {
    if (players == 0 || players > 20) throw InvalidInput("tabular game table needs 1..20 players");
    const std::size_t want = std::size_t{1} << players;
    if (by_mask.size() != want)
        throw InvalidInput("tabular game table must cover all " + std::to_string(want) +
                           " subsets");
    const std::size_t targets = by_mask.front().size();
    for (const auto& sv : by_mask) {
        if (sv.size() != targets) throw InvalidInput("tabular game table has ragged score arity");
        for (double s : sv)
            if (!std::isfinite(s)) throw InvalidInput("tabular game table has non-finite score");
    }
    auto table = std::make_shared<std::vector<ScoreVector>>(std::move(by_mask));
    return from_function(players, targets,
                         [table](std::uint32_t mask) { return (*table)[mask]; }, range);
}

TabularGame TabularGame::additive(std::vector<double> weights) {
    if (weights.empty()) throw InvalidInput("additive game needs at least one weight");
    double total = 0.0;
    for (double w : weights) total += std::max(0.0, w);
    auto ws = std::make_shared<std::vector<double>>(std::move(weights));
    return from_function(ws->size(), 1,
                         [ws](std::uint32_t mask) {
                             double v = 0.0;
                             for (std::size_t i = 0; i < ws->size(); ++i)
                                 if (mask & (1u << i)) v += (*ws)[i];
                             return ScoreVector{v};
                         },
                         ScoreRange{0.0, std::max(1.0, total)});
}

TabularGame TabularGame::glove() {
    return from_function(3, 1, [](std::uint32_t mask) {
        const bool left = mask & 1u;
        const bool right = (mask & 2u) || (mask & 4u);
        return ScoreVector{left && right ? 1.0 : 0.0};
    });
}

ScoreVector TabularGame::value_mask(std::uint32_t mask) const {
    if (players_ == 0) throw InvalidInput("uninitialized tabular game");
    if (players_ < 32 && mask >= (1u << players_))
        throw InvalidInput("subset outside game universe");
    return fn_(mask);
}

ScoreVector TabularGame::value(const SubsetKey& subset) const {
    if (!subset.empty() && subset.members().back() >= players_)
        throw InvalidInput("subset outside game universe");
    return value_mask(subset.mask());
}

TabularGame TabularGame::sum(const TabularGame& a, const TabularGame& b) {
    if (a.players() != b.players() || a.targets() != b.targets())
        throw InvalidInput("game sum needs matching universe and target arity");
    auto fa = a.fn_, fb = b.fn_;
    return from_function(a.players(), a.targets(),
                         [fa, fb](std::uint32_t mask) {
                             ScoreVector va = fa(mask), vb = fb(mask);
                             for (std::size_t i = 0; i < va.size(); ++i) va[i] += vb[i];
                             return va;
                         },
                         ScoreRange{a.range().lo + b.range().lo, a.range().hi + b.range().hi});
}

ScoreVector synthetic_score(const TabularGame& game, const SubsetKey& subset) {
    return game.value(subset);
}

namespace {

// Multinomial counting model: per-class token counts, add-one smoothing
// over the training vocabulary, class priors from instance shares.
// Unknown evaluation tokens are skipped.
class CountingModel {
public:
    CountingModel(std::size_t label_count) : class_total_(label_count, 0), class_docs_(label_count, 0) {}

    void add(const Instance& inst) {
        for (const auto& tok : inst.tokens) {
            auto [it, fresh] = vocab_.emplace(tok, vocab_.size());
            (void)fresh;
            counts_[std::pair<int, std::size_t>(inst.label, it->second)] += 1;
            class_total_[static_cast<std::size_t>(inst.label)] += 1;
        }
        class_docs_[static_cast<std::size_t>(inst.label)] += 1;
        ++total_docs_;
    }

    int predict(const Instance& inst) const {
        const double vocab = static_cast<double>(vocab_.size());
        int best = 0;
        double best_lp = 0.0;
        bool found = false;
        for (std::size_t c = 0; c < class_total_.size(); ++c) {
            if (class_docs_[c] == 0) continue;  // class absent from training
            double lp = std::log(static_cast<double>(class_docs_[c]) /
                                 static_cast<double>(total_docs_));
            const double denom = static_cast<double>(class_total_[c]) + vocab;
            for (const auto& tok : inst.tokens) {
                auto v = vocab_.find(tok);
                if (v == vocab_.end()) continue;
                std::uint64_t cnt = 0;
                auto it = counts_.find(std::pair<int, std::size_t>(static_cast<int>(c), v->second));
                if (it != counts_.end()) cnt = it->second;
                lp += std::log((static_cast<double>(cnt) + 1.0) / denom);
            }
            // strict >: ties keep the smallest label id
            if (!found || lp > best_lp) {
                found = true;
                best_lp = lp;
                best = static_cast<int>(c);
            }
        }
        return best;
    }

    bool trained() const noexcept { return total_docs_ > 0; }

private:
    std::map<std::string, std::size_t> vocab_;
    std::map<std::pair<int, std::size_t>, std::uint64_t> counts_;
    std::vector<std::uint64_t> class_total_;  // tokens per class
    std::vector<std::uint64_t> class_docs_;   // instances per class
    std::uint64_t total_docs_ = 0;
};

class CentroidModel {
public:
    CentroidModel(std::size_t label_count, std::size_t dim)
        : sums_(label_count, std::vector<double>(dim, 0.0)), counts_(label_count, 0) {}

    void add(const Instance& inst) {
        auto& s = sums_[static_cast<std::size_t>(inst.label)];
        for (std::size_t i = 0; i < inst.vec.size() && i < s.size(); ++i) s[i] += inst.vec[i];
        counts_[static_cast<std::size_t>(inst.label)] += 1;
    }

    int predict(const Instance& inst) const {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums_.size(); ++c) {
            if (counts_[c] == 0) continue;
            double d = 0.0;
            for (std::size_t i = 0; i < inst.vec.size(); ++i) {
                const double centroid = sums_[c][i] / static_cast<double>(counts_[c]);
                const double diff = inst.vec[i] - centroid;
                d += diff * diff;
            }
            if (d < best_d) {  // strict: ties keep the smaller label id
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        return best;
    }

private:
    std::vector<std::vector<double>> sums_;
    std::vector<std::uint64_t> counts_;
};

double accuracy_of(const std::vector<Instance>& instances, const std::function<int(const Instance&)>& predict) {
    std::size_t hit = 0;
    for (const auto& inst : instances)
        if (predict(inst) == inst.label) ++hit;
    return static_cast<double>(hit) / static_cast<double>(instances.size());
}

std::size_t infer_label_count(const std::vector<SourceCorpus>& sources,
                              const std::vector<TargetCorpus>& targets) {
    int hi = -1;
    for (const auto& s : sources)
        for (const auto& i : s.instances) hi = std::max(hi, i.label);
    for (const auto& t : targets)
        for (const auto& i : t.instances) hi = std::max(hi, i.label);
    return static_cast<std::size_t>(hi + 1);
}

}  // namespace

ScoreVector builtin_train_and_score(const TrainBundle& bundle,
                                    const std::vector<SourceCorpus>& sources,
                                    const std::vector<TargetCorpus>& targets,
                                    BuiltinKind kind, std::size_t label_count) {
    if (bundle.empty() || bundle.total_instances() == 0)
        throw InvalidInput("builtin_train_and_score: empty bundle");
    if (targets.empty()) throw InvalidInput("builtin_train_and_score: no targets");
    if (label_count == 0) label_count = infer_label_count(sources, targets);

    ScoreVector out;
    out.reserve(targets.size());

    if (kind == BuiltinKind::CountingClassifier) {
        CountingModel model(label_count);
        for (const auto& part : bundle.per_source) {
            if (part.source >= sources.size())
                throw InvalidInput("bundle references unknown source " + std::to_string(part.source));
            const auto& inst = sources[part.source].instances;
            for (std::uint32_t idx : part.indices) {
                if (idx >= inst.size())
                    throw InvalidInput("bundle index out of range for source " +
                                       sources[part.source].id.name);
                model.add(inst[idx]);
            }
        }
        for (const auto& t : targets)
            out.push_back(accuracy_of(t.instances, [&](const Instance& i) { return model.predict(i); }));
    } else {
        std::size_t dim = 0;
        for (const auto& part : bundle.per_source)
            for (std::uint32_t idx : part.indices)
                dim = std::max(dim, sources[part.source].instances[idx].vec.size());
        CentroidModel model(label_count, dim);
        for (const auto& part : bundle.per_source) {
            if (part.source >= sources.size())
                throw InvalidInput("bundle references unknown source " + std::to_string(part.source));
            const auto& inst = sources[part.source].instances;
            for (std::uint32_t idx : part.indices) {
                if (idx >= inst.size())
                    throw InvalidInput("bundle index out of range for source " +
                                       sources[part.source].id.name);
                model.add(inst[idx]);
            }
        }
        for (const auto& t : targets)
            out.push_back(accuracy_of(t.instances, [&](const Instance& i) { return model.predict(i); }));
    }
    return out;
}

BuiltinOracle::BuiltinOracle(BuiltinKind kind, const CorpusSet& data)
    : kind_(kind), data_(&data) {
    if (data.sources.empty()) throw InvalidInput("oracle needs at least one source corpus");
    if (data.targets.empty()) throw InvalidInput("oracle needs at least one target corpus");
    for (const auto& s : data.sources)
        if (s.instances.empty()) throw InvalidInput("source corpus is empty: " + s.id.name);
    for (const auto& t : data.targets)
        if (t.instances.empty()) throw InvalidInput("target corpus is empty: " + t.name);
}

ScoreVector BuiltinOracle::score(const TrainBundle& bundle) {
    return builtin_train_and_score(bundle, data_->sources, data_->targets, kind_,
                                   data_->labels.size());
}

ScoreVector BuiltinOracle::empty_score() const {
    // The empty model predicts the smallest label id everywhere, matching
    // the classifiers' tie-breaking with no counts.
    ScoreVector out;
    out.reserve(data_->targets.size());
    for (const auto& t : data_->targets) {
        std::size_t hit = 0;
        for (const auto& inst : t.instances)
            if (inst.label == 0) ++hit;
        out.push_back(static_cast<double>(hit) / static_cast<double>(t.instances.size()));
    }
    return out;
}

ScoreVector DelayOracle::score(const TrainBundle& bundle) {
    if (delay_ms_ > 0)
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms_));
    return inner_->score(bundle);
}

}  // namespace shapsrc
