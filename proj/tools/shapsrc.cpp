// shapsrc — source-corpus valuation for transfer learning.
//
// Subcommands:
//   value      approximate per-source Shapley values (Monte-Carlo engine)
//   exact      exact Shapley values by subset enumeration (small m)
//   baselines  single-source, leave-one-out, random and greedy rankings
//   select     turn a values file into a source subset (top-k / threshold)
//   rank       train the feature ranker and predict values for a new target

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapsrc/analysis.hpp"
#include "shapsrc/config.hpp"
#include "shapsrc/engine.hpp"
#include "shapsrc/external_oracle.hpp"
#include "shapsrc/ranker.hpp"
#include "shapsrc/report.hpp"
#include "shapsrc/select.hpp"

namespace {

using nlohmann::json;
using namespace shapsrc;

int log_level() {
    const char* env = std::getenv("SHAPSRC_LOG");
    if (!env) return 1;  // warn
    const std::string v = env;
    if (v == "error") return 0;
    if (v == "warn") return 1;
    if (v == "info") return 2;
    if (v == "debug") return 3;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "shapsrc: " << msg << "\n";
}

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> workers;
    std::optional<std::string> cache_path;
    std::optional<std::string> out_dir;
    bool resume = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "run configuration file")->required();
    cmd->add_option("--seed", flags.seed, "override engine seed");
    cmd->add_option("--workers", flags.workers, "override worker count");
    cmd->add_option("--cache", flags.cache_path, "override cache file path");
    cmd->add_option("--out", flags.out_dir, "override output directory");
    cmd->add_flag("--resume", flags.resume, "load the cache file before running");
}

// A run's assembled problem: oracle + naming + sampling sizes.
struct Problem {
    std::unique_ptr<CorpusSet> data;  // null for tabular oracles
    std::unique_ptr<Oracle> oracle;
    std::vector<std::string> source_names;
    std::vector<std::string> target_names;
    std::vector<std::size_t> source_sizes;
    json corpus_hashes = json::object();
};

RunConfig load_run_config(const CommonFlags& flags) {
    RunConfig rc = RunConfig::from_file(flags.config_path);
    if (flags.seed) {
        rc.engine.seed = *flags.seed;
        rc.engine.sample.base_seed = *flags.seed;
    }
    if (flags.workers) rc.engine.workers = *flags.workers;
    if (flags.cache_path) rc.cache_path = *flags.cache_path;
    if (flags.out_dir) rc.out_dir = *flags.out_dir;
    return rc;
}

Problem assemble_problem(const RunConfig& rc) {
    Problem p;
    if (rc.oracle == OracleKind::Tabular) {
        TabularGameFile gf = load_tabular_game(rc.table_path);
        p.source_names = gf.source_names;
        p.target_names = gf.target_names;
        p.source_sizes.assign(gf.game.players(), 1);  // one pseudo-instance per source
        p.oracle = std::make_unique<TabularOracle>(std::move(gf.game));
        p.corpus_hashes[std::filesystem::path(rc.table_path).stem().string()] =
            hash_file_hex(rc.table_path);
    } else {
        if (rc.target_paths.empty())
            throw ConfigError("problem.targets is required for this command");
        p.data = std::make_unique<CorpusSet>(load_corpus_set(rc.source_paths, rc.target_paths));
        p.source_names = p.data->source_names();
        p.target_names = p.data->target_names();
        p.source_sizes = p.data->source_sizes();
        for (std::size_t i = 0; i < rc.source_paths.size(); ++i)
            p.corpus_hashes[p.source_names[i]] = hash_file_hex(rc.source_paths[i]);
        for (std::size_t i = 0; i < rc.target_paths.size(); ++i)
            p.corpus_hashes[p.target_names[i]] = hash_file_hex(rc.target_paths[i]);
        if (rc.oracle == OracleKind::External) {
            p.oracle = std::make_unique<ExternalOracle>(rc.endpoint, p.source_names,
                                                        p.target_names, rc.timeout_sec);
        } else {
            const BuiltinKind kind = rc.oracle == OracleKind::Counting
                                         ? BuiltinKind::CountingClassifier
                                         : BuiltinKind::NearestCentroid;
            p.oracle = std::make_unique<BuiltinOracle>(kind, *p.data);
        }
    }
    if (rc.delay_ms > 0)
        p.oracle = std::make_unique<DelayOracle>(
            std::shared_ptr<Oracle>(std::move(p.oracle)), rc.delay_ms);
    return p;
}

const char* rho_name(RhoPolicy p) {
    switch (p) {
        case RhoPolicy::Random: return "random";
        case RhoPolicy::FracSingle: return "frac-single";
        case RhoPolicy::Const: return "const";
        case RhoPolicy::AllHalf: return "all-half";
        case RhoPolicy::All: return "all";
        case RhoPolicy::Mu: return "mu";
        case RhoPolicy::EmptyScore: return "empty";
    }
    return "?";
}

json engine_json(const EngineConfig& e) {
    json out = {
        {"nepoch", e.nepoch},
        {"tolerance", e.tolerance},
        {"rho", rho_name(e.rho.policy)},
        {"eta", e.sample.rate},
        {"workers", e.workers},
        {"use_cache", e.use_cache},
        {"convergence_window", e.convergence.window},
    };
    if (e.rho.policy == RhoPolicy::Const) out["rho_const"] = e.rho.constant;
    if (e.convergence.epsilon) out["convergence_epsilon"] = *e.convergence.epsilon;
    return out;
}

json base_report(const char* command, const RunConfig& rc, const CommonFlags& flags,
                 const Problem& p) {
    return json{
        {"schema_version", 1},
        {"command", command},
        {"seed", rc.engine.seed},
        {"config_hash", hash_file_hex(flags.config_path)},
        {"corpus_hashes", p.corpus_hashes},
        {"sources", p.source_names},
        {"targets", p.target_names},
        {"engine", engine_json(rc.engine)},
    };
}

void write_report(const RunConfig& rc, const std::string& stem, const json& report) {
    ensure_dir(rc.out_dir);
    const std::string path = rc.out_dir + "/" + stem + ".json";
    write_text_file(path, report.dump(2) + "\n");
    log_info("wrote " + path);
}

int cmd_value(const CommonFlags& flags) {
    RunConfig rc = load_run_config(flags);
    Problem p = assemble_problem(rc);

    SubsetScoreCache cache(p.oracle->target_count(), rc.cache_enabled);
    auto seed_of = [&](const SubsetKey& key) { return sample_seed_for(rc.engine.sample, key); };
    if (flags.resume) {
        if (rc.cache_path.empty())
            throw ConfigError(flags.config_path + ": --resume needs cache.path");
        const std::size_t kept =
            cache.load(rc.cache_path, p.source_sizes.size(), seed_of);
        log_info("resumed " + std::to_string(kept) + " cache entries from " + rc.cache_path);
    }

    ValuationResult result = seal_shap(*p.oracle, p.source_sizes, rc.engine, &cache);
    if (!rc.cache_path.empty() && rc.cache_enabled) cache.save(rc.cache_path, seed_of);

    json report = base_report("value", rc, flags, p);
    report["values"] = result.values;
    report["epochs_run"] = result.epochs_run;
    report["converged"] = result.converged;
    report["cache_hits"] = result.cache_hits;
    report["cache_misses"] = result.cache_misses;
    report["oracle_trainings"] = result.oracle_trainings;
    report["truncations"] = result.truncations;
    report["wall_ms"] = result.wall_ms;
    if (!result.trace.empty()) {
        // Per-epoch max-abs change of the value matrix; the full per-epoch
        // values go to trace.csv.
        json deltas = json::array();
        for (std::size_t e = 1; e < result.trace.size(); ++e) {
            double delta = 0.0;
            for (std::size_t t = 0; t < result.trace[e].size(); ++t)
                for (std::size_t j = 0; j < result.trace[e][t].size(); ++j)
                    delta = std::max(delta, std::abs(result.trace[e][t][j] -
                                                     result.trace[e - 1][t][j]));
            deltas.push_back(delta);
        }
        report["convergence_trace"] = deltas;
    }

    ensure_dir(rc.out_dir);
    write_text_file(rc.out_dir + "/values.csv",
                    values_csv(p.target_names, p.source_names, result.values));
    if (rc.engine.record_trace)
        write_text_file(rc.out_dir + "/trace.csv",
                        trace_csv(p.target_names, p.source_names, result.trace));
    write_report(rc, "report", report);
    return 0;
}

int cmd_exact(const CommonFlags& flags) {
    RunConfig rc = load_run_config(flags);
    Problem p = assemble_problem(rc);
    const std::size_t m = p.source_sizes.size();

    auto score = [&](const SubsetKey& key) {
        return p.oracle->score(stratified_sample(key, p.source_sizes, rc.engine.sample));
    };
    const auto values = exact_shapley(score, m, p.oracle->empty_score());

    json report = base_report("exact", rc, flags, p);
    report["values"] = values;
    ensure_dir(rc.out_dir);
    write_text_file(rc.out_dir + "/values.csv",
                    values_csv(p.target_names, p.source_names, values));
    write_report(rc, "report", report);
    return 0;
}

int cmd_baselines(const CommonFlags& flags) {
    RunConfig rc = load_run_config(flags);
    Problem p = assemble_problem(rc);
    const std::size_t m = p.source_sizes.size();

    json report = base_report("baselines", rc, flags, p);
    report["single"] = baseline_single(*p.oracle, p.source_sizes, rc.engine.sample);
    if (m >= 2) report["loo"] = baseline_loo(*p.oracle, p.source_sizes, rc.engine.sample);
    report["random"] = baseline_random(m, rc.engine.seed);
    json greedy = json::array();
    for (std::size_t t = 0; t < p.target_names.size(); ++t)
        greedy.push_back(greedy_dfs(*p.oracle, p.source_sizes, t, m, rc.engine.sample));
    report["greedy_dfs"] = greedy;
    write_report(rc, "baselines", report);
    return 0;
}

// Reads a values CSV (target,source,value) back into a per-source vector
// for the named target.
std::vector<double> values_for_target(const std::string& csv_path, const std::string& target,
                                      const std::vector<std::string>& source_names) {
    std::ifstream in(csv_path);
    if (!in) throw InvalidInput("cannot open values file: " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "target,source,value")
        throw InvalidInput(csv_path + ":1: expected header target,source,value");
    std::map<std::string, double> by_source;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw InvalidInput(csv_path + ":" + std::to_string(lineno) + ": bad row");
        if (line.substr(0, c1) != target) continue;
        by_source[line.substr(c1 + 1, c2 - c1 - 1)] = std::stod(line.substr(c2 + 1));
    }
    std::vector<double> values;
    values.reserve(source_names.size());
    for (const auto& name : source_names) {
        auto it = by_source.find(name);
        if (it == by_source.end())
            throw InvalidInput(csv_path + ": no value for source '" + name + "' and target '" +
                               target + "'");
        values.push_back(it->second);
    }
    return values;
}

int cmd_select(const CommonFlags& flags, const std::string& values_override) {
    RunConfig rc = load_run_config(flags);
    Problem p = assemble_problem(rc);
    const std::size_t m = p.source_sizes.size();

    if (rc.dev_target.empty())
        throw ConfigError(flags.config_path + ": select.dev_target is required for select");
    const auto dev_it =
        std::find(p.target_names.begin(), p.target_names.end(), rc.dev_target);
    if (dev_it == p.target_names.end())
        throw ConfigError(flags.config_path + ": select.dev_target '" + rc.dev_target +
                          "' is not a target of this problem");
    const auto dev_index = static_cast<std::size_t>(dev_it - p.target_names.begin());

    const std::string values_path = !values_override.empty() ? values_override : rc.values_path;
    if (values_path.empty())
        throw ConfigError(flags.config_path + ": select needs a values file (select.values or --values)");
    const auto values = values_for_target(values_path, rc.dev_target, p.source_names);

    json report = base_report("select", rc, flags, p);
    report["values_file"] = values_path;
    report["dev_target"] = rc.dev_target;

    if (rc.topk > 0) {
        const auto chosen = select_topk(values, rc.topk);
        report["mode"] = "topk";
        report["k"] = rc.topk;
        report["chosen"] = json::array();
        for (auto j : chosen) report["chosen"].push_back(p.source_names[j]);
        write_report(rc, "selection", report);
        return 0;
    }

    SelectionReport sel = tune_threshold(values, rc.theta_candidates, *p.oracle, p.source_sizes,
                                         dev_index, rc.engine.sample);
    report["mode"] = "threshold";
    report["fallback_all"] = sel.fallback_all;
    if (sel.theta_used) report["theta_used"] = *sel.theta_used;
    json dev_scores = json::array();
    for (const auto& [theta, scores] : sel.dev_scores)
        dev_scores.push_back({{"theta", theta}, {"scores", scores}});
    report["dev_scores"] = dev_scores;
    json chosen_names = json::array();
    for (auto j : sel.chosen) chosen_names.push_back(p.source_names[j]);
    report["chosen"] = chosen_names;

    // Final full-data retrain on the chosen subset vs all sources, scored on
    // the held-out test target when one is configured.
    if (!rc.test_target.empty()) {
        const auto test_it =
            std::find(p.target_names.begin(), p.target_names.end(), rc.test_target);
        if (test_it == p.target_names.end())
            throw ConfigError(flags.config_path + ": select.test_target '" + rc.test_target +
                              "' is not a target of this problem");
        const auto test_index = static_cast<std::size_t>(test_it - p.target_names.begin());
        SampleSpec full{1.0, rc.engine.sample.base_seed};
        SubsetKey chosen_key = make_subset_key(sel.chosen, m);
        const ScoreVector chosen_score =
            p.oracle->score(stratified_sample(chosen_key, p.source_sizes, full));
        const ScoreVector all_score =
            p.oracle->score(stratified_sample(SubsetKey::full(m), p.source_sizes, full));
        report["retrain"] = {{"test_target", rc.test_target},
                             {"chosen_score", chosen_score[test_index]},
                             {"all_sources_score", all_score[test_index]}};
    }
    write_report(rc, "selection", report);
    return 0;
}

int cmd_rank(const CommonFlags& flags) {
    RunConfig rc = load_run_config(flags);
    if (rc.feature_csv.empty())
        throw ConfigError(flags.config_path + ": rank.features is required for rank");
    if (rc.rank_target.empty())
        throw ConfigError(flags.config_path + ": rank.target is required for rank");

    // The ranker trains on leave-one-corpus-out valuations of the source
    // corpora only; the unseen target has no corpus by definition.
    CorpusSet data = load_corpus_set(rc.source_paths, {});
    const std::vector<std::string> names = data.source_names();
    const std::vector<std::size_t> sizes = data.source_sizes();
    FeatureTable features = load_feature_csv(rc.feature_csv);

    if (rc.oracle == OracleKind::Tabular)
        throw ConfigError(flags.config_path + ": rank needs a corpus-backed oracle kind");
    const BuiltinKind kind = rc.oracle == OracleKind::Centroid ? BuiltinKind::NearestCentroid
                                                               : BuiltinKind::CountingClassifier;

    // Each fold trains on the remaining corpora with the held-out corpus as
    // the sole target. External oracles get one process per fold.
    std::vector<std::unique_ptr<CorpusSet>> fold_data;
    FoldOracleFactory factory = [&](std::size_t held_out,
                                    const std::vector<std::size_t>& fold_sources)
        -> std::unique_ptr<Oracle> {
        std::vector<std::string> fold_names;
        for (std::size_t x : fold_sources) fold_names.push_back(names[x]);
        if (rc.oracle == OracleKind::External)
            return std::make_unique<ExternalOracle>(rc.endpoint, fold_names,
                                                    std::vector<std::string>{names[held_out]},
                                                    rc.timeout_sec);
        auto fold = std::make_unique<CorpusSet>();
        fold->labels = data.labels;
        fold->feature_kind = data.feature_kind;
        fold->dense_dim = data.dense_dim;
        for (std::size_t i = 0; i < fold_sources.size(); ++i) {
            SourceCorpus sc = data.sources[fold_sources[i]];
            sc.id.index = static_cast<std::uint32_t>(i);
            fold->sources.push_back(std::move(sc));
        }
        fold->targets.push_back(
            TargetCorpus{data.sources[held_out].id.name, data.sources[held_out].instances});
        fold_data.push_back(std::move(fold));
        return std::make_unique<BuiltinOracle>(kind, *fold_data.back());
    };

    const auto dataset = build_ranker_dataset(names, sizes, features, rc.engine, factory);
    RankerModel model = train_ranker(dataset, rc.lambda);

    json report;
    report["schema_version"] = 1;
    report["command"] = "rank";
    report["seed"] = rc.engine.seed;
    report["config_hash"] = hash_file_hex(flags.config_path);
    report["lambda"] = rc.lambda;
    report["model"] = {{"weights", model.weights},
                       {"intercept", model.intercept},
                       {"lambda", model.lambda},
                       {"feat_mean", model.feat_mean},
                       {"feat_scale", model.feat_scale}};
    report["training_rows"] = dataset.size();

    if (!rc.lambda_sweep.empty()) {
        json sweep = json::array();
        for (double lam : rc.lambda_sweep)
            sweep.push_back({{"lambda", lam}, {"cv_loss", ranker_cv_loss(dataset, lam)}});
        report["lambda_sweep"] = sweep;
    }

    // Predicted values for the named unseen target.
    std::vector<std::vector<double>> target_features;
    for (const auto& name : names) target_features.push_back(features.at(rc.rank_target, name));
    const auto predicted = predict_source_values(model, target_features);
    json pred = json::array();
    for (std::size_t j = 0; j < names.size(); ++j)
        pred.push_back({{"source", names[j]}, {"value", predicted[j]}});
    report["predicted"] = pred;

    ensure_dir(rc.out_dir);
    std::vector<std::vector<double>> as_matrix{predicted};
    write_text_file(rc.out_dir + "/predicted_values.csv",
                    values_csv({rc.rank_target}, names, as_matrix));
    write_text_file(rc.out_dir + "/ranker_model.json", report["model"].dump(2) + "\n");
    write_report(rc, "rank", report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"source-corpus valuation for transfer learning"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string values_override;

    CLI::App* value = app.add_subcommand("value", "approximate Shapley values");
    add_common_flags(value, flags);
    CLI::App* exact = app.add_subcommand("exact", "exact Shapley values (m <= 16)");
    add_common_flags(exact, flags);
    CLI::App* baselines = app.add_subcommand("baselines", "baseline source rankings");
    add_common_flags(baselines, flags);
    CLI::App* select = app.add_subcommand("select", "select sources from a values file");
    add_common_flags(select, flags);
    select->add_option("--values", values_override, "values CSV from a previous run");
    CLI::App* rank = app.add_subcommand("rank", "feature ranker for unseen targets");
    add_common_flags(rank, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (value->parsed()) return cmd_value(flags);
        if (exact->parsed()) return cmd_exact(flags);
        if (baselines->parsed()) return cmd_baselines(flags);
        if (select->parsed()) return cmd_select(flags, values_override);
        if (rank->parsed()) return cmd_rank(flags);
    } catch (const ConfigError& e) {
        std::cerr << "shapsrc: config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "shapsrc: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const OracleFailure& e) {
        std::cerr << "shapsrc: oracle failure: " << e.what() << "\n";
        if (!e.payload().empty()) std::cerr << "  payload: " << e.payload() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "shapsrc: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
