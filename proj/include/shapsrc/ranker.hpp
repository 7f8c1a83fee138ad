#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "shapsrc/engine.hpp"
#include "shapsrc/oracle.hpp"
#include "shapsrc/types.hpp"

namespace shapsrc {

// Dense per-(target, source) feature vectors supplied by the user
// (language distances, overlap statistics, ...). Never computed here.
struct FeatureTable {
    std::size_t dim = 0;
    std::map<std::pair<std::string, std::string>, std::vector<double>> rows;

    const std::vector<double>& at(const std::string& target, const std::string& source) const;
    void add(const std::string& target, const std::string& source, std::vector<double> features);
};

// header: target,source,f1,..,fK
FeatureTable load_feature_csv(const std::string& path);

// Linear source-value predictor. Weights and intercept live in raw feature
// space; the standardization stats used during fitting ride along for
// serialization and provenance.
struct RankerModel {
    std::vector<double> weights;
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<double> feat_mean;
    std::vector<double> feat_scale;

    double predict(std::span<const double> features) const;
};

struct RankerRow {
    std::string target;   // held-out corpus acting as target
    std::string source;
    std::vector<double> features;
    double value = 0.0;   // Shapley estimate of the source for that target
};

// Builds the fold oracle for one leave-one-corpus-out round. `held_out` is
// the corpus index acting as target; `fold_sources` lists the original
// indices of the remaining corpora, in fold order (their position is the
// fold-local source index). Must declare exactly one target.
using FoldOracleFactory = std::function<std::unique_ptr<Oracle>(
    std::size_t held_out, const std::vector<std::size_t>& fold_sources)>;

// Leave-one-corpus-out dataset: for each corpus j, values the remaining
// m-1 corpora against target j with seal_shap and emits one row per
// (held-out target, source) pair. m * (m-1) rows in total.
std::vector<RankerRow> build_ranker_dataset(const std::vector<std::string>& corpus_names,
                                            const std::vector<std::size_t>& corpus_sizes,
                                            const FeatureTable& features,
                                            const EngineConfig& config,
                                            const FoldOracleFactory& factory);

// Closed-form ridge regression on standardized features; the intercept is
// unpenalized. lambda = 0 on a singular system raises NumericError advising
// a positive lambda.
RankerModel train_ranker(const std::vector<RankerRow>& dataset, double lambda);

std::vector<double> predict_source_values(const RankerModel& model,
                                          const std::vector<std::vector<double>>& features);

// Leave-one-target-out mean squared error of a ridge fit, for lambda sweeps.
double ranker_cv_loss(const std::vector<RankerRow>& dataset, double lambda);

}  // namespace shapsrc
