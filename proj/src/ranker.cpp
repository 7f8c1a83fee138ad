#include "shapsrc/ranker.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "shapsrc/rng.hpp"

namespace shapsrc {

const std::vector<double>& FeatureTable::at(const std::string& target,
                                            const std::string& source) const {
    auto it = rows.find({target, source});
    if (it == rows.end())
        throw InvalidInput("missing feature row for (target=" + target + ", source=" + source +
                           ")");
    return it->second;
}

void FeatureTable::add(const std::string& target, const std::string& source,
                       std::vector<double> features) {
    if (target == source)
        throw InvalidInput("feature table cannot pair a corpus with itself: " + target);
    if (dim == 0) dim = features.size();
    if (features.size() != dim)
        throw InvalidInput("feature row for (" + target + ", " + source + ") has " +
                           std::to_string(features.size()) + " features, expected " +
                           std::to_string(dim));
    for (double f : features)
        if (!std::isfinite(f))
            throw InvalidInput("non-finite feature for (" + target + ", " + source + ")");
    rows[{target, source}] = std::move(features);
}

FeatureTable load_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open feature CSV: " + path);

    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };

    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("empty feature CSV: " + path);
    auto header = split(line);
    if (header.size() < 3 || header[0] != "target" || header[1] != "source")
        throw InvalidInput(path + ":1: header must start with target,source,f1,..");

    FeatureTable table;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
        std::vector<double> feats;
        feats.reserve(cells.size() - 2);
        for (std::size_t i = 2; i < cells.size(); ++i) {
            try {
                feats.push_back(std::stod(cells[i]));
            } catch (const std::exception&) {
                throw InvalidInput(path + ":" + std::to_string(lineno) + ": bad number '" +
                                   cells[i] + "'");
            }
        }
        table.add(cells[0], cells[1], std::move(feats));
    }
    if (table.rows.empty()) throw InvalidInput("feature CSV has no data rows: " + path);
    return table;
}

double RankerModel::predict(std::span<const double> features) const {
    if (features.size() != weights.size())
        throw InvalidInput("feature dimension " + std::to_string(features.size()) +
                           " does not match model dimension " + std::to_string(weights.size()));
    double y = intercept;
    for (std::size_t i = 0; i < weights.size(); ++i) y += weights[i] * features[i];
    return y;
}

std::vector<RankerRow> build_ranker_dataset(const std::vector<std::string>& names,
                                            const std::vector<std::size_t>& sizes,
                                            const FeatureTable& features,
                                            const EngineConfig& config,
                                            const FoldOracleFactory& factory) {
    const std::size_t m = names.size();
    if (m < 3) throw InvalidInput("build_ranker_dataset: needs at least three corpora");
    if (sizes.size() != m) throw InvalidInput("build_ranker_dataset: names/sizes mismatch");

    // Fail before any training if a feature row is missing.
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t x = 0; x < m; ++x)
            if (x != j) (void)features.at(names[j], names[x]);

    std::vector<RankerRow> rows;
    rows.reserve(m * (m - 1));
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::size_t> fold_sources;
        std::vector<std::size_t> fold_sizes;
        for (std::size_t x = 0; x < m; ++x) {
            if (x == j) continue;
            fold_sources.push_back(x);
            fold_sizes.push_back(sizes[x]);
        }
        auto oracle = factory(j, fold_sources);
        if (!oracle || oracle->target_count() != 1)
            throw InvalidInput("fold oracle must declare exactly one target");

        EngineConfig fold_cfg = config;
        // Decorrelate folds while keeping the whole build reproducible.
        fold_cfg.seed = derive_seed(config.seed, 0xf01dull, j);
        ValuationResult result = seal_shap(*oracle, fold_sizes, fold_cfg);

        for (std::size_t i = 0; i < fold_sources.size(); ++i) {
            RankerRow row;
            row.target = names[j];
            row.source = names[fold_sources[i]];
            row.features = features.at(row.target, row.source);
            row.value = result.values[0][i];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

// Gaussian elimination with partial pivoting; A is n x n row-major.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, bool ridge_hint) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double cand = std::abs(a[r * n + col]);
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (best < 1e-12) {
            if (ridge_hint)
                throw NumericError(
                    "normal equations are singular with lambda = 0; use lambda > 0");
            throw NumericError("singular linear system");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double diag = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / diag;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return x;
}

}  // namespace

RankerModel train_ranker(const std::vector<RankerRow>& dataset, double lambda) {
    if (dataset.empty()) throw InvalidInput("train_ranker: empty dataset");
    if (lambda < 0) throw InvalidInput("train_ranker: lambda must be >= 0");
    const std::size_t n = dataset.size();
    const std::size_t dim = dataset.front().features.size();
    if (dim == 0) throw InvalidInput("train_ranker: zero-dimensional features");
    for (const auto& row : dataset)
        if (row.features.size() != dim)
            throw InvalidInput("train_ranker: ragged feature dimensions");

    // Standardize features; constant columns get unit scale (their
    // centered values are all zero, so their weight is determined by the
    // penalty alone).
    std::vector<double> mean(dim, 0.0), scale(dim, 0.0);
    double y_mean = 0.0;
    for (const auto& row : dataset) {
        for (std::size_t i = 0; i < dim; ++i) mean[i] += row.features[i];
        y_mean += row.value;
    }
    for (double& v : mean) v /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);
    for (const auto& row : dataset)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = row.features[i] - mean[i];
            scale[i] += d * d;
        }
    for (double& v : scale) {
        v = std::sqrt(v / static_cast<double>(n));
        if (v < 1e-12) v = 1.0;
    }

    // Normal equations on standardized, centered data: the unpenalized
    // intercept decouples and equals mean(y).
    std::vector<double> gram(dim * dim, 0.0), rhs(dim, 0.0);
    std::vector<double> z(dim);
    for (const auto& row : dataset) {
        for (std::size_t i = 0; i < dim; ++i) z[i] = (row.features[i] - mean[i]) / scale[i];
        const double yc = row.value - y_mean;
        for (std::size_t i = 0; i < dim; ++i) {
            rhs[i] += z[i] * yc;
            for (std::size_t k = i; k < dim; ++k) gram[i * dim + k] += z[i] * z[k];
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        gram[i * dim + i] += lambda;
        for (std::size_t k = 0; k < i; ++k) gram[i * dim + k] = gram[k * dim + i];
    }

    const std::vector<double> w_std = solve_linear(std::move(gram), std::move(rhs), lambda == 0.0);

    RankerModel model;
    model.lambda = lambda;
    model.feat_mean = mean;
    model.feat_scale = scale;
    model.weights.resize(dim);
    model.intercept = y_mean;
    for (std::size_t i = 0; i < dim; ++i) {
        model.weights[i] = w_std[i] / scale[i];
        model.intercept -= model.weights[i] * mean[i];
    }
    for (double w : model.weights)
        if (!std::isfinite(w)) throw NumericError("ridge fit produced non-finite weights");
    return model;
}

std::vector<double> predict_source_values(const RankerModel& model,
                                          const std::vector<std::vector<double>>& features) {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(model.predict(f));
    return out;
}

double ranker_cv_loss(const std::vector<RankerRow>& dataset, double lambda) {
    std::set<std::string> targets;
    for (const auto& row : dataset) targets.insert(row.target);
    if (targets.size() < 2) throw InvalidInput("ranker_cv_loss: needs at least two targets");

    double sq_err = 0.0;
    std::size_t count = 0;
    for (const auto& held : targets) {
        std::vector<RankerRow> train;
        for (const auto& row : dataset)
            if (row.target != held) train.push_back(row);
        RankerModel model = train_ranker(train, lambda);
        for (const auto& row : dataset) {
            if (row.target != held) continue;
            const double err = model.predict(row.features) - row.value;
            sq_err += err * err;
            ++count;
        }
    }
    return sq_err / static_cast<double>(count);
}

}  // namespace shapsrc
