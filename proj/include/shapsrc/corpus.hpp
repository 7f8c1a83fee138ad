#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapsrc/types.hpp"

namespace shapsrc {

enum class FeatureKind { Text, Dense };

// One labeled training or evaluation example. Text instances hold the
// whitespace-split token sequence; dense instances hold a real vector.
struct Instance {
    std::vector<std::string> tokens;
    std::vector<double> vec;
    int label = 0;
};

// One labeled source dataset. Instance order is load order and is stable,
// which makes index-based sampling reproducible.
struct SourceCorpus {
    SourceId id;
    std::vector<Instance> instances;
};

struct TargetCorpus {
    std::string name;
    std::vector<Instance> instances;
};

// Instances selected from each source of a subset, in subset order.
struct TrainBundle {
    struct Part {
        std::uint32_t source = 0;
        std::vector<std::uint32_t> indices;  // ascending, duplicate-free
    };
    std::vector<Part> per_source;

    bool empty() const noexcept { return per_source.empty(); }

    std::size_t total_instances() const noexcept {
        std::size_t n = 0;
        for (const auto& p : per_source) n += p.indices.size();
        return n;
    }

    SubsetKey subset() const {
        SubsetKey key;
        for (const auto& p : per_source) key = key.with(p.source);
        return key;
    }
};

// A loaded valuation problem: sources, targets, and the shared label set.
// Label ids are positions in `labels`, which is sorted so that the id
// order (and thus prediction tie-breaking) does not depend on file order.
struct CorpusSet {
    std::vector<SourceCorpus> sources;
    std::vector<TargetCorpus> targets;
    std::vector<std::string> labels;
    FeatureKind feature_kind = FeatureKind::Text;
    std::size_t dense_dim = 0;

    std::vector<std::size_t> source_sizes() const {
        std::vector<std::size_t> out;
        out.reserve(sources.size());
        for (const auto& s : sources) out.push_back(s.instances.size());
        return out;
    }

    std::vector<std::string> source_names() const {
        std::vector<std::string> out;
        out.reserve(sources.size());
        for (const auto& s : sources) out.push_back(s.id.name);
        return out;
    }

    std::vector<std::string> target_names() const {
        std::vector<std::string> out;
        out.reserve(targets.size());
        for (const auto& t : targets) out.push_back(t.name);
        return out;
    }
};

// Loads a problem from JSONL files, one object per line:
//   {"text": "...", "label": "..."}   or   {"vec": [..], "label": "..."}
// Mixing text and dense forms within one problem is an error. Corpus names
// default to the file stem. Errors name the offending path and line.
CorpusSet load_corpus_set(const std::vector<std::string>& source_paths,
                          const std::vector<std::string>& target_paths);

// Parses one corpus file; label ids are assigned later by the caller.
// Exposed for the loader's tests.
struct RawCorpus {
    std::string name;
    std::vector<std::vector<std::string>> token_rows;
    std::vector<std::vector<double>> vec_rows;
    std::vector<std::string> label_rows;
    FeatureKind kind = FeatureKind::Text;
};
RawCorpus load_raw_corpus(const std::string& path);

}  // namespace shapsrc
