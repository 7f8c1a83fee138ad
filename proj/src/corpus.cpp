#include "shapsrc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace shapsrc {

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

RawCorpus load_raw_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open corpus file: " + path);

    RawCorpus out;
    out.name = std::filesystem::path(path).stem().string();

    std::string line;
    std::size_t lineno = 0;
    bool saw_text = false, saw_vec = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": bad JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("label") || !obj["label"].is_string())
            throw InvalidInput(path + ":" + std::to_string(lineno) +
                               ": expected an object with a string \"label\"");
        if (obj.contains("text") && obj["text"].is_string()) {
            saw_text = true;
            out.token_rows.push_back(split_tokens(obj["text"].get<std::string>()));
            out.vec_rows.emplace_back();
        } else if (obj.contains("vec") && obj["vec"].is_array()) {
            saw_vec = true;
            std::vector<double> v;
            for (const auto& x : obj["vec"]) {
                if (!x.is_number())
                    throw InvalidInput(path + ":" + std::to_string(lineno) +
                                       ": \"vec\" entries must be numbers");
                v.push_back(x.get<double>());
            }
            out.vec_rows.push_back(std::move(v));
            out.token_rows.emplace_back();
        } else {
            throw InvalidInput(path + ":" + std::to_string(lineno) +
                               ": need either \"text\" (string) or \"vec\" (array)");
        }
        out.label_rows.push_back(obj["label"].get<std::string>());
    }
    if (out.label_rows.empty()) throw InvalidInput("corpus is empty: " + path);
    if (saw_text && saw_vec)
        throw InvalidInput(path + ": mixes \"text\" and \"vec\" instances in one corpus");
    out.kind = saw_vec ? FeatureKind::Dense : FeatureKind::Text;
    return out;
}

CorpusSet load_corpus_set(const std::vector<std::string>& source_paths,
                          const std::vector<std::string>& target_paths) {
    if (source_paths.empty()) throw InvalidInput("no source corpora configured");
    // An empty target list is legal: the ranker pipeline values sources
    // without any evaluation corpus.

    std::vector<RawCorpus> raw_sources, raw_targets;
    for (const auto& p : source_paths) raw_sources.push_back(load_raw_corpus(p));
    for (const auto& p : target_paths) raw_targets.push_back(load_raw_corpus(p));

    FeatureKind kind = raw_sources.front().kind;
    std::size_t dim = 0;
    std::map<std::string, int> label_ids;
    auto scan = [&](const RawCorpus& rc, const std::string& path) {
        if (rc.kind != kind)
            throw InvalidInput(path + ": mixes text and dense corpora in one problem");
        for (const auto& l : rc.label_rows) label_ids.emplace(l, 0);
        if (rc.kind == FeatureKind::Dense) {
            for (const auto& v : rc.vec_rows) {
                if (dim == 0) dim = v.size();
                if (v.size() != dim)
                    throw InvalidInput(path + ": inconsistent vector dimensionality (" +
                                       std::to_string(v.size()) + " vs " + std::to_string(dim) + ")");
                for (double x : v)
                    if (!std::isfinite(x)) throw InvalidInput(path + ": non-finite feature value");
            }
        }
    };
    for (std::size_t i = 0; i < raw_sources.size(); ++i) scan(raw_sources[i], source_paths[i]);
    for (std::size_t i = 0; i < raw_targets.size(); ++i) scan(raw_targets[i], target_paths[i]);

    CorpusSet out;
    out.feature_kind = kind;
    out.dense_dim = dim;
    // std::map iterates in sorted label order, so ids follow lexicographic order.
    int next_id = 0;
    for (auto& [name, id] : label_ids) {
        id = next_id++;
        out.labels.push_back(name);
    }

    auto convert = [&](const RawCorpus& rc) {
        std::vector<Instance> instances;
        instances.reserve(rc.label_rows.size());
        for (std::size_t i = 0; i < rc.label_rows.size(); ++i) {
            Instance inst;
            inst.tokens = rc.token_rows[i];
            inst.vec = rc.vec_rows[i];
            inst.label = label_ids.at(rc.label_rows[i]);
            instances.push_back(std::move(inst));
        }
        return instances;
    };

    std::map<std::string, int> seen_names;
    for (std::size_t i = 0; i < raw_sources.size(); ++i) {
        if (++seen_names[raw_sources[i].name] > 1)
            throw InvalidInput("duplicate source corpus name: " + raw_sources[i].name);
        SourceCorpus sc;
        sc.id = SourceId{static_cast<std::uint32_t>(i), raw_sources[i].name};
        sc.instances = convert(raw_sources[i]);
        out.sources.push_back(std::move(sc));
    }
    for (auto& rt : raw_targets) {
        TargetCorpus tc;
        tc.name = rt.name;
        tc.instances = convert(rt);
        out.targets.push_back(std::move(tc));
    }
    return out;
}

}  // namespace shapsrc
