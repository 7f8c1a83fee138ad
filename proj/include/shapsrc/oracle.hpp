#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>

#include "shapsrc/corpus.hpp"
#include "shapsrc/types.hpp"

namespace shapsrc {

struct ScoreRange {
    double lo = 0.0;
    double hi = 1.0;
};

// The Score(C_Omega, V) black box: train a model on a bundle of instances
// and return one score per target. Implementations are deterministic
// functions of the bundle and must be callable concurrently for distinct
// bundles once constructed.
class Oracle {
public:
    virtual ~Oracle() = default;

    virtual std::size_t target_count() const = 0;
    virtual ScoreRange score_range() const { return {0.0, 1.0}; }

    // Trains on the bundle and scores every target.
    virtual ScoreVector score(const TrainBundle& bundle) = 0;

    // The oracle's declared empty-model score (no training data at all).
    virtual ScoreVector empty_score() const = 0;

    // Score of an untrained / label-prior model, used by the Random rho
    // policy. Defaults to the empty-model score.
    virtual ScoreVector untrained_score() const { return empty_score(); }
};

// A characteristic function given in closed form or as a full table over
// all 2^m subsets. Stands in for a trained-model oracle in tests and
// desk-scale experiments.
class TabularGame {
public:
    TabularGame() = default;

    static TabularGame from_function(std::size_t players, std::size_t targets,
                                     std::function<ScoreVector(std::uint32_t mask)> fn,
                                     ScoreRange range = {0.0, 1.0});
    static TabularGame from_table(std::size_t players,
                                  std::vector<ScoreVector> by_mask,  // size 2^players
                                  ScoreRange range = {0.0, 1.0});

    // v(S) = sum of weights of members; single target.
    static TabularGame additive(std::vector<double> weights);
    // v(S) = 1 iff S contains player 0 and at least one of {1, 2}; m = 3.
    static TabularGame glove();

    std::size_t players() const noexcept { return players_; }
    std::size_t targets() const noexcept { return targets_; }
    ScoreRange range() const noexcept { return range_; }

    ScoreVector value(const SubsetKey& subset) const;
    ScoreVector value_mask(std::uint32_t mask) const;

    // Pointwise sum of two games over the same universe (for additivity checks).
    static TabularGame sum(const TabularGame& a, const TabularGame& b);

private:
    std::size_t players_ = 0;
    std::size_t targets_ = 1;
    ScoreRange range_{0.0, 1.0};
    std::function<ScoreVector(std::uint32_t)> fn_;
};

// Tabulated/closed-form score lookup; pure, trains nothing.
ScoreVector synthetic_score(const TabularGame& game, const SubsetKey& subset);

// Adapts a TabularGame to the Oracle interface. Bundles identify the
// subset; instance indices are ignored.
class TabularOracle : public Oracle {
public:
    explicit TabularOracle(TabularGame game) : game_(std::move(game)) {}

    std::size_t target_count() const override { return game_.targets(); }
    ScoreRange score_range() const override { return game_.range(); }
    ScoreVector score(const TrainBundle& bundle) override { return game_.value(bundle.subset()); }
    ScoreVector empty_score() const override { return game_.value(SubsetKey{}); }

    const TabularGame& game() const noexcept { return game_; }

private:
    TabularGame game_;
};

enum class BuiltinKind { CountingClassifier, NearestCentroid };

// Trains the chosen lightweight classifier on the union of selected
// instances and returns per-target accuracy in [0, 1].
//  - CountingClassifier: per-class token counts with add-one smoothing
//    over the training vocabulary, class priors from instance shares.
//  - NearestCentroid: per-class mean vector, nearest by Euclidean distance.
// Prediction ties break toward the smallest label id.
ScoreVector builtin_train_and_score(const TrainBundle& bundle,
                                    const std::vector<SourceCorpus>& sources,
                                    const std::vector<TargetCorpus>& targets,
                                    BuiltinKind kind, std::size_t label_count);

class BuiltinOracle : public Oracle {
public:
    // Caller keeps `data` alive for the oracle's lifetime.
    BuiltinOracle(BuiltinKind kind, const CorpusSet& data);

    std::size_t target_count() const override { return data_->targets.size(); }
    ScoreVector score(const TrainBundle& bundle) override;
    ScoreVector empty_score() const override;

private:
    BuiltinKind kind_;
    const CorpusSet* data_;
};

// Adds a fixed artificial delay to every training, for runtime ablations.
class DelayOracle : public Oracle {
public:
    DelayOracle(std::shared_ptr<Oracle> inner, double delay_ms)
        : inner_(std::move(inner)), delay_ms_(delay_ms) {}

    std::size_t target_count() const override { return inner_->target_count(); }
    ScoreRange score_range() const override { return inner_->score_range(); }
    ScoreVector score(const TrainBundle& bundle) override;
    ScoreVector empty_score() const override { return inner_->empty_score(); }
    ScoreVector untrained_score() const override { return inner_->untrained_score(); }

private:
    std::shared_ptr<Oracle> inner_;
    double delay_ms_;
};

}  // namespace shapsrc
