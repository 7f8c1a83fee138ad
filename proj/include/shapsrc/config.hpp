#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shapsrc/engine.hpp"
#include "shapsrc/oracle.hpp"

namespace shapsrc {

// Config or schema problem; the message carries file and line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Minimal TOML-style file: [section] headers, key = value pairs, # comments.
// Values: "string", number, true/false, or a flat array of those.
class ConfigFile {
public:
    struct Value {
        enum class Kind { String, Number, Bool, Array };
        Kind kind = Kind::String;
        std::string str;
        double num = 0.0;
        bool boolean = false;
        std::vector<Value> array;
        int line = 0;
    };

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& name);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_number(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_string_array(const std::string& key) const;
    std::vector<double> get_number_array(const std::string& key) const;

    std::string require_string(const std::string& key) const;
    std::vector<std::string> require_string_array(const std::string& key) const;

    const std::string& name() const noexcept { return name_; }

private:
    const Value* find(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

    std::string name_;
    std::map<std::string, Value> values_;  // "section.key"
};

enum class OracleKind { Counting, Centroid, Tabular, External };

// Everything a run needs, assembled from one declarative config file.
struct RunConfig {
    // problem
    std::vector<std::string> source_paths;
    std::vector<std::string> target_paths;
    // oracle
    OracleKind oracle = OracleKind::Counting;
    std::string endpoint;      // external
    std::string table_path;    // tabular
    double delay_ms = 0.0;
    double timeout_sec = 60.0;
    // engine
    EngineConfig engine;
    // cache
    std::string cache_path;
    bool cache_enabled = true;
    // output
    std::string out_dir = "out";
    // select
    std::vector<double> theta_candidates{1e-2, 5e-3, 1e-3};
    std::string values_path;
    std::string dev_target;
    std::string test_target;
    std::size_t topk = 0;  // 0 = use threshold tuning
    // rank
    std::string feature_csv;
    double lambda = 1e-3;
    std::string rank_target;
    std::vector<double> lambda_sweep;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_config(const ConfigFile& file);
};

// Tabular game fixture file (JSON): closed-form kinds or a full table.
struct TabularGameFile {
    TabularGame game;
    std::vector<std::string> source_names;
    std::vector<std::string> target_names;
};
TabularGameFile load_tabular_game(const std::string& path);

}  // namespace shapsrc
