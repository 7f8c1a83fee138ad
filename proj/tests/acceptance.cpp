// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each, nonzero exit if anything fails. Thresholds are fixed here, not
// tuned at runtime.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "shapsrc/analysis.hpp"
#include "shapsrc/engine.hpp"
#include "shapsrc/ranker.hpp"
#include "shapsrc/select.hpp"

using namespace shapsrc;
using nlohmann::json;

namespace {

struct Checker {
    std::ostringstream log;
    bool ok = true;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "\n    failed: " << what;
        }
    }
    void note(const std::string& what) { log << "\n    " << what; }
};

int g_failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<void(Checker&)>& body) {
    Checker check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.ok = false;
        check.log << "\n    exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %02d %s (%.1fs)%s\n", check.ok ? "PASS" : "FAIL", number, name.c_str(),
                secs, check.log.str().c_str());
    std::fflush(stdout);
    if (!check.ok) ++g_failures;
}

std::function<ScoreVector(const SubsetKey&)> score_fn(const TabularGame& game) {
    return [&game](const SubsetKey& key) { return game.value(key); };
}

double max_abs_error(const std::vector<std::vector<double>>& a,
                     const std::vector<std::vector<double>>& b) {
    double worst = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t j = 0; j < a[t].size(); ++j)
            worst = std::max(worst, std::abs(a[t][j] - b[t][j]));
    return worst;
}

EngineConfig plain_config(std::uint64_t nepoch, std::uint64_t seed) {
    EngineConfig cfg;
    cfg.nepoch = nepoch;
    cfg.seed = seed;
    cfg.sample.base_seed = seed;
    cfg.convergence.epsilon = 0.0;
    return cfg;
}

// --- 1: exact-oracle axiom suite ----------------------------------------

void axiom_suite(Checker& check) {
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + (static_cast<std::size_t>(trial) % 7);  // 2..8
        const TabularGame game = fixtures::random_game(m, 1000 + trial);
        const auto phi = exact_shapley(score_fn(game), m, game.value(SubsetKey{}));

        // Efficiency.
        double total = 0.0;
        for (double v : phi[0]) total += v;
        const double span = game.value(SubsetKey::full(m))[0] - game.value(SubsetKey{})[0];
        check.require(std::abs(total - span) <= 1e-10 * std::max(1.0, std::abs(span)),
                      "efficiency trial " + std::to_string(trial));

        // Additivity.
        const TabularGame other = fixtures::random_game(m, 5000 + trial);
        const auto phi_other = exact_shapley(score_fn(other), m, other.value(SubsetKey{}));
        const auto phi_sum = exact_shapley(score_fn(TabularGame::sum(game, other)), m,
                                           {game.value(SubsetKey{})[0] +
                                            other.value(SubsetKey{})[0]});
        for (std::size_t j = 0; j < m; ++j) {
            const double want = phi[0][j] + phi_other[0][j];
            check.require(std::abs(phi_sum[0][j] - want) <= 1e-10 * std::max(1.0, std::abs(want)),
                          "additivity trial " + std::to_string(trial));
        }

        // Symmetry: symmetrize players 0 and 1.
        const TabularGame symmetric =
            TabularGame::from_function(m, 1, [game](std::uint32_t mask) {
                std::uint32_t swapped = mask & ~3u;
                if (mask & 1u) swapped |= 2u;
                if (mask & 2u) swapped |= 1u;
                return ScoreVector{0.5 *
                                   (game.value_mask(mask)[0] + game.value_mask(swapped)[0])};
            });
        const auto phi_sym = exact_shapley(score_fn(symmetric), m, symmetric.value(SubsetKey{}));
        check.require(std::abs(phi_sym[0][0] - phi_sym[0][1]) <= 1e-10,
                      "symmetry trial " + std::to_string(trial));

        // Dummy: the last player never changes the score.
        const std::uint32_t dummy_bit = 1u << (m - 1);
        const TabularGame dummied =
            TabularGame::from_function(m, 1, [game, dummy_bit](std::uint32_t mask) {
                return game.value_mask(mask & ~dummy_bit);
            });
        const auto phi_dummy = exact_shapley(score_fn(dummied), m, dummied.value(SubsetKey{}));
        check.require(std::abs(phi_dummy[0][m - 1]) <= 1e-10,
                      "dummy trial " + std::to_string(trial));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(secs < 10.0, "runtime " + std::to_string(secs) + "s exceeds 10s");
}

// --- 2: Monte-Carlo convergence ------------------------------------------

void mc_convergence(Checker& check) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<TabularGame> games;
    games.push_back(TabularGame::glove());
    for (int i = 0; i < 20; ++i) games.push_back(fixtures::random_game(6, 2000 + i));

    const std::vector<std::uint64_t> checkpoints{312, 625, 1250, 2500, 5000};
    std::vector<double> mean_error(checkpoints.size(), 0.0);

    for (std::size_t g = 0; g < games.size(); ++g) {
        const TabularGame& game = games[g];
        const std::size_t m = game.players();
        const auto exact = exact_shapley(score_fn(game), m, game.value(SubsetKey{}));

        TabularOracle oracle(game);
        const std::vector<std::size_t> sizes(m, 1);
        EngineConfig cfg = plain_config(5000, 77);
        cfg.record_trace = true;
        const ValuationResult result = seal_shap(oracle, sizes, cfg);

        for (std::size_t c = 0; c < checkpoints.size(); ++c)
            mean_error[c] += max_abs_error(result.trace[checkpoints[c] - 1], exact);
        const double final_error = max_abs_error(result.values, exact);
        check.require(final_error < 0.02, "game " + std::to_string(g) + " error " +
                                              std::to_string(final_error) + " >= 0.02");
        check.require(result.truncations == 0, "tolerance 0 must never truncate");
    }

    for (double& e : mean_error) e /= static_cast<double>(games.size());
    int inversions = 0;
    for (std::size_t c = 1; c < mean_error.size(); ++c)
        if (mean_error[c] > mean_error[c - 1]) ++inversions;
    std::ostringstream sweep;
    for (double e : mean_error) sweep << " " << e;
    check.note("mean error sweep:" + sweep.str());
    check.require(inversions <= 1,
                  "epoch sweep not monotone: " + std::to_string(inversions) + " inversions");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(secs < 60.0, "runtime " + std::to_string(secs) + "s exceeds 60s");
}

// --- 3: seed stability -----------------------------------------------------

void seed_stability(Checker& check) {
    // Heterogeneous m = 10 game: spread weights plus mild interactions.
    const std::size_t m = 10;
    std::vector<double> weights(m);
    for (std::size_t j = 0; j < m; ++j) weights[j] = 0.02 + 0.016 * static_cast<double>(j);
    std::vector<std::vector<double>> bonus(m, std::vector<double>(m, 0.0));
    SplitMix64 rng(424242);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            bonus[i][j] = 0.06 * (rng.uniform01() - 0.5);
    const TabularGame game = fixtures::interaction_game(weights, bonus);
    TabularOracle oracle(game);
    const std::vector<std::size_t> sizes(m, 1);

    auto run = [&](std::uint64_t seed) {
        EngineConfig cfg;
        cfg.nepoch = 30000;
        cfg.seed = seed;
        cfg.sample.base_seed = seed;
        cfg.convergence.window = 10;
        cfg.convergence.epsilon = 1e-3;
        return seal_shap(oracle, sizes, cfg);
    };
    const ValuationResult a = run(1);
    const ValuationResult b = run(2);
    check.require(a.converged, "seed 1 did not converge");
    check.require(b.converged, "seed 2 did not converge");
    check.note("epochs to converge: " + std::to_string(a.epochs_run) + " / " +
               std::to_string(b.epochs_run));

    const RankAgreement agreement = rank_agreement(a.values[0], b.values[0]);
    check.note("pearson between seeds: " + std::to_string(agreement.pearson));
    check.require(agreement.pearson >= 0.9, "pearson < 0.9 after convergence");
}

// --- 4: truncation fidelity -------------------------------------------------

void truncation_fidelity(Checker& check) {
    std::uint64_t trainings_plain = 0, trainings_truncated = 0;
    for (std::uint64_t g = 0; g < 3; ++g) {
        const TabularGame game = fixtures::diminishing_game(8, 300 + g, 10.0);
        TabularOracle oracle(game);
        const std::vector<std::size_t> sizes(8, 1);

        EngineConfig plain = plain_config(400, 9 + g);
        EngineConfig truncated = plain;
        truncated.tolerance = 0.02;  // 2% of the unit score range

        const ValuationResult full = seal_shap(oracle, sizes, plain);
        const ValuationResult cut = seal_shap(oracle, sizes, truncated);
        trainings_plain += full.oracle_trainings;
        trainings_truncated += cut.oracle_trainings;

        const RankAgreement agreement = rank_agreement(cut.values[0], full.values[0]);
        check.note("game " + std::to_string(g) + ": spearman " +
                   std::to_string(agreement.spearman) + ", trainings " +
                   std::to_string(cut.oracle_trainings) + " vs " +
                   std::to_string(full.oracle_trainings));
        check.require(agreement.spearman >= 0.9,
                      "spearman < 0.9 on game " + std::to_string(g));
    }
    check.require(trainings_truncated <=
                      static_cast<std::uint64_t>(0.8 * static_cast<double>(trainings_plain)),
                  "truncation saved less than 20% of trainings");
}

// --- 5: caching ablation ------------------------------------------------------

void caching_ablation(Checker& check) {
    fixtures::TextProblemSpec spec;
    spec.n_sources = 8;
    spec.instances_per_source = 50;
    spec.target_instances = 80;
    spec.seed = 55;
    const CorpusSet data = fixtures::make_text_problem(spec);
    auto inner = std::make_shared<BuiltinOracle>(BuiltinKind::CountingClassifier, data);
    DelayOracle oracle(inner, 50.0);  // 50 ms artificial training cost

    EngineConfig cached = plain_config(200, 21);
    cached.sample.rate = 0.5;
    cached.workers = 8;
    EngineConfig uncached = cached;
    uncached.use_cache = false;

    const ValuationResult with_cache = seal_shap(oracle, data.source_sizes(), cached);
    const ValuationResult without = seal_shap(oracle, data.source_sizes(), uncached);

    check.note("trainings: " + std::to_string(with_cache.oracle_trainings) + " cached vs " +
               std::to_string(without.oracle_trainings) + " uncached; wall " +
               std::to_string(with_cache.wall_ms) + " / " + std::to_string(without.wall_ms) +
               " ms");
    check.require(with_cache.values == without.values,
                  "cache changed the value matrix");
    check.require(with_cache.oracle_trainings <=
                      static_cast<std::uint64_t>(
                          0.7 * static_cast<double>(without.oracle_trainings)),
                  "cache saved less than 30% of trainings");
    check.require(with_cache.wall_ms < without.wall_ms, "cache did not reduce wall time");
}

// --- 6: multi-target amortization ----------------------------------------------

void multi_target_amortization(Checker& check) {
    const std::size_t m = 6;
    const std::vector<std::size_t> sizes(m, 1);
    const EngineConfig cfg = plain_config(150, 33);

    TabularOracle one(fixtures::random_game_multi(m, 1, 808));
    TabularOracle ten(fixtures::random_game_multi(m, 10, 808));
    const ValuationResult r1 = seal_shap(one, sizes, cfg);
    const ValuationResult r10 = seal_shap(ten, sizes, cfg);

    check.note("trainings: " + std::to_string(r1.oracle_trainings) + " with 1 target, " +
               std::to_string(r10.oracle_trainings) + " with 10");
    check.require(r1.oracle_trainings == r10.oracle_trainings,
                  "trainings differ between 1 and 10 targets");
    check.require(r10.values.size() == 10, "ten-target run must value every target");
}

// --- 7: end-to-end noisy-source selection ----------------------------------------

void noisy_source_selection(Checker& check) {
    const auto start = std::chrono::steady_clock::now();

    // Sparse discriminative evidence over a large noisy background makes
    // the counting classifier margin-limited, so directionally flipped
    // labels in one source cost real accuracy.
    fixtures::TextProblemSpec spec;
    spec.n_classes = 3;
    spec.n_sources = 6;
    spec.instances_per_source = 500;
    spec.target_instances = 500;
    spec.doc_len = 10;
    spec.class_vocab = 8;
    spec.shared_vocab = 1500;
    spec.discriminative_rate = 0.12;
    spec.noisy_source = 2;
    spec.flip_rate = 0.5;
    spec.flip_directional = true;
    spec.seed = 11;
    CorpusSet data = fixtures::make_text_problem(spec);

    // Separate dev and test targets drawn from the same task.
    fixtures::TextProblemSpec test_spec = spec;
    test_spec.seed = 12;
    const CorpusSet test_data = fixtures::make_text_problem(test_spec);
    data.targets.push_back(TargetCorpus{"test", test_data.targets[0].instances});
    data.targets[0].name = "dev";

    BuiltinOracle oracle(BuiltinKind::CountingClassifier, data);
    const auto sizes = data.source_sizes();

    int noisy_is_min = 0;
    std::vector<double> last_values;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        EngineConfig cfg = plain_config(120, seed);
        cfg.sample.rate = 0.5;
        const ValuationResult result = seal_shap(oracle, sizes, cfg);
        const auto& dev_values = result.values[0];
        const std::size_t argmin =
            std::min_element(dev_values.begin(), dev_values.end()) - dev_values.begin();
        if (argmin == spec.noisy_source) ++noisy_is_min;
        last_values = dev_values;
    }
    check.note("noisy source was argmin in " + std::to_string(noisy_is_min) + "/10 seeds");
    check.require(noisy_is_min >= 9, "noisy source not the minimum in at least 9/10 seeds");

    const SelectionReport selection = tune_threshold(
        last_values, std::vector<double>{1e-2, 5e-3, 1e-3}, oracle, sizes, 0, SampleSpec{0.5, 1});
    check.require(!selection.chosen.empty(), "empty selection");
    bool noisy_chosen = false;
    for (auto j : selection.chosen)
        if (j == spec.noisy_source) noisy_chosen = true;
    check.require(!noisy_chosen, "selection kept the noisy source");

    // Full-data retrain on the chosen subset vs all sources, on the test target.
    const SampleSpec full{1.0, 0};
    SubsetKey chosen_key = make_subset_key(selection.chosen, sizes.size());
    const double chosen_acc =
        oracle.score(stratified_sample(chosen_key, sizes, full))[1];
    const double all_acc =
        oracle.score(stratified_sample(SubsetKey::full(sizes.size()), sizes, full))[1];
    check.note("test accuracy: chosen " + std::to_string(chosen_acc) + " vs all " +
               std::to_string(all_acc));
    check.require(chosen_acc >= all_acc + 0.02,
                  "chosen subset does not beat all-sources by 2 points");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.require(secs < 300.0, "runtime " + std::to_string(secs) + "s exceeds 5 minutes");
}

// --- 8: baseline contrast ------------------------------------------------------------

void baseline_contrast(Checker& check) {
    // Sources 0 and 1 pay off only jointly; 2 and 3 are individually decent.
    const TabularGame game = TabularGame::from_function(4, 1, [](std::uint32_t mask) {
        double v = 0.0;
        if ((mask & 1u) && (mask & 2u)) v += 0.9;
        if (mask & 4u) v += 0.25;
        if (mask & 8u) v += 0.20;
        return ScoreVector{std::min(v, 1.0)};
    });
    TabularOracle oracle(game);
    const std::vector<std::size_t> sizes(4, 1);

    const ValuationResult shap = seal_shap(oracle, sizes, plain_config(2000, 3));
    const auto shap_top2 = select_topk(shap.values[0], 2);

    const auto single = baseline_single(oracle, sizes, SampleSpec{1.0, 0});
    const auto single_top2 = select_topk(single[0], 2);

    SubsetKey shap_key = make_subset_key(shap_top2, 4);
    SubsetKey single_key = make_subset_key(single_top2, 4);
    const double shap_score = game.value(shap_key)[0];
    const double single_score = game.value(single_key)[0];
    check.note("top-2 score: ours " + std::to_string(shap_score) + " vs single-source " +
               std::to_string(single_score));
    check.require(shap_score > single_score,
                  "complementary pair not preferred over singleton ranking");
}

// --- 9: ranker recovery ---------------------------------------------------------------

void ranker_recovery(Checker& check) {
    // Six corpora; per-(target, source) features map linearly and noiselessly
    // to the additive game weight of the source in that fold.
    const std::size_t m = 6;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back("c" + std::to_string(j));
    const std::vector<std::size_t> sizes(m, 1);

    SplitMix64 rng(909);
    FeatureTable features;
    std::map<std::pair<std::string, std::string>, double> true_weight;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t x = 0; x < m; ++x) {
            if (j == x) continue;
            const double f1 = rng.uniform01();
            const double f2 = rng.uniform01();
            features.add(names[j], names[x], {f1, f2});
            true_weight[{names[j], names[x]}] = 0.05 + 0.3 * f1 + 0.2 * f2;
        }

    FoldOracleFactory factory = [&](std::size_t held_out,
                                    const std::vector<std::size_t>& fold_sources) {
        std::vector<double> weights;
        for (std::size_t x : fold_sources)
            weights.push_back(true_weight.at({names[held_out], names[x]}));
        return std::make_unique<TabularOracle>(TabularGame::additive(weights));
    };

    EngineConfig cfg = plain_config(80, 17);
    const auto dataset = build_ranker_dataset(names, sizes, features, cfg, factory);
    check.require(dataset.size() == m * (m - 1), "dataset row count");

    // For each held-out target: train on the other folds, predict its
    // sources, compare top-3 with the engine's own valuation of that fold.
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<RankerRow> train;
        for (const auto& row : dataset)
            if (row.target != names[j]) train.push_back(row);
        const RankerModel model = train_ranker(train, 1e-8);

        std::vector<std::vector<double>> fold_features;
        std::vector<double> engine_values;
        for (const auto& row : dataset) {
            if (row.target != names[j]) continue;
            fold_features.push_back(row.features);
            engine_values.push_back(row.value);
        }
        const auto predicted = predict_source_values(model, fold_features);
        const auto predicted_top3 = select_topk(predicted, 3);
        const auto engine_top3 = select_topk(engine_values, 3);
        check.require(predicted_top3 == engine_top3,
                      "top-3 mismatch for held-out target " + names[j]);
    }
}

// --- 10: paired bootstrap correctness ---------------------------------------------------

double exact_bootstrap_p(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    const std::size_t n = a.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= n;
    std::size_t le_count = 0;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        int sum_a = 0, sum_b = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_a += a[rest % n];
            sum_b += b[rest % n];
            rest /= n;
        }
        if (sum_a <= sum_b) ++le_count;
    }
    return static_cast<double>(le_count) / static_cast<double>(total);
}

void bootstrap_correctness(Checker& check) {
    const std::vector<std::uint8_t> dominant{1, 1, 1, 1};
    const std::vector<std::uint8_t> dominated{0, 0, 0, 0};
    check.require(paired_bootstrap(dominant, dominated, 10000, 1) == 0.0,
                  "dominant fixture must give p = 0");
    check.require(paired_bootstrap(dominant, dominant, 10000, 1) == 1.0,
                  "identical fixture must give p = 1");

    const std::vector<std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>> fixtures{
        {{1, 1, 1, 0}, {1, 1, 0, 1}},  // one discordant pair
        {{1, 0, 1, 0}, {0, 1, 1, 0}},
        {{1, 1, 0, 0}, {0, 1, 1, 0}},
    };
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        const double exact = exact_bootstrap_p(fixtures[i].first, fixtures[i].second);
        const double sampled = paired_bootstrap(fixtures[i].first, fixtures[i].second, 10000, 7);
        check.note("fixture " + std::to_string(i) + ": exact " + std::to_string(exact) +
                   ", sampled " + std::to_string(sampled));
        check.require(std::abs(sampled - exact) <= 0.02,
                      "fixture " + std::to_string(i) + " off by more than 0.02");
    }
}

// --- 11: worker determinism through the CLI ----------------------------------------------

void worker_determinism(Checker& check) {
    fixtures::TextProblemSpec spec;
    spec.n_sources = 6;
    spec.instances_per_source = 80;
    spec.target_instances = 100;
    spec.seed = 29;
    const CorpusSet data = fixtures::make_text_problem(spec);

    const std::string dir = fixtures::scratch_dir("acceptance_workers");
    std::string sources = "[";
    for (std::size_t s = 0; s < data.sources.size(); ++s) {
        const std::string path = dir + "/src" + std::to_string(s) + ".jsonl";
        fixtures::write_jsonl(path, data.sources[s].instances, data.labels);
        sources += (s ? ", \"" : "\"") + path + "\"";
    }
    sources += "]";
    fixtures::write_jsonl(dir + "/target.jsonl", data.targets[0].instances, data.labels);
    {
        std::ofstream out(dir + "/run.toml");
        out << "[problem]\nsources = " << sources << "\ntargets = [\"" << dir
            << "/target.jsonl\"]\n[engine]\nnepoch = 50\nseed = 5\neta = 0.4\n"
               "convergence_epsilon = 0.0\n[output]\ndir = \""
            << dir << "/out\"\n";
    }

    auto run = [&](int workers) -> std::string {
        const std::string cmd = std::string(SHAPSRC_CLI_PATH) + " value --config " + dir +
                                "/run.toml --workers " + std::to_string(workers) + " > " + dir +
                                "/log.txt 2>&1";
        const int rc = std::system(cmd.c_str());
        if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) return "";
        std::ifstream in(dir + "/out/values.csv", std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    const std::string one = run(1);
    const std::string eight = run(8);
    check.require(!one.empty(), "workers=1 run failed");
    check.require(!eight.empty(), "workers=8 run failed");
    check.require(one == eight, "value matrices differ between 1 and 8 workers");
    std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
    run_criterion(1, "exact-oracle axiom suite (200 games, 1e-10)", axiom_suite);
    run_criterion(2, "monte-carlo convergence to exact values", mc_convergence);
    run_criterion(3, "seed stability (pearson >= 0.9 after convergence)", seed_stability);
    run_criterion(4, "truncation fidelity (spearman >= 0.9, >= 20% fewer trainings)",
                  truncation_fidelity);
    run_criterion(5, "caching ablation (>= 30% fewer trainings, identical values)",
                  caching_ablation);
    run_criterion(6, "multi-target amortization (trainings keyed by subset)",
                  multi_target_amortization);
    run_criterion(7, "end-to-end noisy-source selection (>= 2 point gain)",
                  noisy_source_selection);
    run_criterion(8, "baseline contrast on a complementary pair", baseline_contrast);
    run_criterion(9, "ranker recovery from noiseless linear features", ranker_recovery);
    run_criterion(10, "paired bootstrap vs exhaustive enumeration", bootstrap_correctness);
    run_criterion(11, "worker-count determinism through the CLI", worker_determinism);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
