#include "shapsrc/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace shapsrc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + what);
}

ConfigFile::Value parse_scalar(const std::string& raw, const std::string& name, int line) {
    ConfigFile::Value v;
    v.line = line;
    if (raw.empty()) parse_fail(name, line, "empty value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            parse_fail(name, line, "unterminated string");
        v.kind = ConfigFile::Value::Kind::String;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = ConfigFile::Value::Kind::Bool;
        v.boolean = (raw == "true");
        return v;
    }
    try {
        std::size_t used = 0;
        v.num = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        v.kind = ConfigFile::Value::Kind::Number;
        return v;
    } catch (const std::exception&) {
        parse_fail(name, line, "cannot parse value '" + raw + "'");
    }
}

std::vector<std::string> split_array_items(const std::string& body, const std::string& name,
                                           int line) {
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_str) parse_fail(name, line, "unterminated string in array");
    const std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    return items;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
    ConfigFile out;
    out.name_ = name;
    std::istringstream in(text);
    std::string raw_line;
    std::string section;
    int line = 0;
    while (std::getline(in, raw_line)) {
        ++line;
        std::string s = trim(strip_comment(raw_line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') parse_fail(name, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) parse_fail(name, line, "empty section name");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) parse_fail(name, line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) parse_fail(name, line, "empty key");
        const int value_line = line;

        // Arrays may span lines; keep reading until the bracket closes
        // outside of string literals.
        if (!val.empty() && val.front() == '[') {
            auto closed = [](const std::string& text) {
                bool in_str = false;
                int depth = 0;
                for (char c : text) {
                    if (c == '"') in_str = !in_str;
                    if (in_str) continue;
                    if (c == '[') ++depth;
                    if (c == ']') --depth;
                }
                return depth == 0;
            };
            std::string continuation;
            while (!closed(val) && std::getline(in, continuation)) {
                ++line;
                val += " " + trim(strip_comment(continuation));
            }
            if (!closed(val)) parse_fail(name, value_line, "unterminated array");
        }

        Value v;
        if (!val.empty() && val.front() == '[') {
            if (val.back() != ']') parse_fail(name, value_line, "unterminated array");
            v.kind = Value::Kind::Array;
            v.line = value_line;
            for (const auto& item :
                 split_array_items(val.substr(1, val.size() - 2), name, value_line))
                v.array.push_back(parse_scalar(item, name, value_line));
        } else {
            v = parse_scalar(val, name, value_line);
        }
        const std::string full_key = section.empty() ? key : section + "." + key;
        if (out.values_.count(full_key))
            parse_fail(name, value_line, "duplicate key " + full_key);
        out.values_.emplace(full_key, std::move(v));
    }
    return out;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

const ConfigFile::Value* ConfigFile::find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

void ConfigFile::fail(const std::string& key, const std::string& what) const {
    const Value* v = find(key);
    const std::string where =
        v ? name_ + ":" + std::to_string(v->line) : name_;
    throw ConfigError(where + ": key '" + key + "' " + what);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::String) fail(key, "must be a string");
    return v->str;
}

double ConfigFile::get_number(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Number) fail(key, "must be a number");
    return v->num;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::Bool) fail(key, "must be true or false");
    return v->boolean;
}

std::vector<std::string> ConfigFile::get_string_array(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return {};
    if (v->kind != Value::Kind::Array) fail(key, "must be an array");
    std::vector<std::string> out;
    for (const auto& item : v->array) {
        if (item.kind != Value::Kind::String) fail(key, "must contain only strings");
        out.push_back(item.str);
    }
    return out;
}

std::vector<double> ConfigFile::get_number_array(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return {};
    if (v->kind != Value::Kind::Array) fail(key, "must be an array");
    std::vector<double> out;
    for (const auto& item : v->array) {
        if (item.kind != Value::Kind::Number) fail(key, "must contain only numbers");
        out.push_back(item.num);
    }
    return out;
}

std::string ConfigFile::require_string(const std::string& key) const {
    if (!has(key)) throw ConfigError(name_ + ": missing required key '" + key + "'");
    return get_string(key, "");
}

std::vector<std::string> ConfigFile::require_string_array(const std::string& key) const {
    if (!has(key)) throw ConfigError(name_ + ": missing required key '" + key + "'");
    return get_string_array(key);
}

namespace {

RhoSpec parse_rho(const ConfigFile& f) {
    RhoSpec rho;
    const std::string name = f.get_string("engine.rho", "empty");
    if (name == "empty") rho.policy = RhoPolicy::EmptyScore;
    else if (name == "random") rho.policy = RhoPolicy::Random;
    else if (name == "frac-single") rho.policy = RhoPolicy::FracSingle;
    else if (name == "const") rho.policy = RhoPolicy::Const;
    else if (name == "all-half") rho.policy = RhoPolicy::AllHalf;
    else if (name == "all") rho.policy = RhoPolicy::All;
    else if (name == "mu") rho.policy = RhoPolicy::Mu;
    else throw ConfigError(f.name() + ": unknown engine.rho '" + name +
                           "' (expected empty|random|frac-single|const|all-half|all|mu)");
    rho.constant = f.get_number("engine.rho_const", 0.5);
    return rho;
}

OracleKind parse_oracle_kind(const ConfigFile& f) {
    const std::string kind = f.get_string("oracle.kind", "counting");
    if (kind == "counting") return OracleKind::Counting;
    if (kind == "centroid") return OracleKind::Centroid;
    if (kind == "tabular") return OracleKind::Tabular;
    if (kind == "external") return OracleKind::External;
    throw ConfigError(f.name() + ": unknown oracle.kind '" + kind +
                      "' (expected counting|centroid|tabular|external)");
}

}  // namespace

RunConfig RunConfig::from_config(const ConfigFile& f) {
    RunConfig rc;
    rc.source_paths = f.get_string_array("problem.sources");
    rc.target_paths = f.get_string_array("problem.targets");

    rc.oracle = parse_oracle_kind(f);
    rc.endpoint = f.get_string("oracle.endpoint", "");
    rc.table_path = f.get_string("oracle.table", "");
    rc.delay_ms = f.get_number("oracle.delay_ms", 0.0);
    rc.timeout_sec = f.get_number("oracle.timeout_sec", 60.0);
    if (rc.oracle == OracleKind::Tabular && rc.table_path.empty())
        throw ConfigError(f.name() + ": oracle.kind = \"tabular\" needs oracle.table");
    if (rc.oracle == OracleKind::External && rc.endpoint.empty())
        throw ConfigError(f.name() + ": oracle.kind = \"external\" needs oracle.endpoint");
    // Targets stay optional here: the rank pipeline values sources without
    // any evaluation corpus. Commands that need targets check on assembly.
    if (rc.oracle != OracleKind::Tabular && rc.source_paths.empty())
        throw ConfigError(f.name() + ": problem.sources is required");

    auto positive = [&](const char* key, double v) {
        if (!(v > 0)) throw ConfigError(f.name() + ": " + key + " must be positive");
    };

    rc.engine.nepoch = static_cast<std::uint64_t>(f.get_number("engine.nepoch", 100));
    positive("engine.nepoch", static_cast<double>(rc.engine.nepoch));
    rc.engine.tolerance = f.get_number("engine.tolerance", 0.0);
    if (rc.engine.tolerance < 0) throw ConfigError(f.name() + ": engine.tolerance must be >= 0");
    rc.engine.rho = parse_rho(f);
    rc.engine.sample.rate = f.get_number("engine.eta", 1.0);
    if (!(rc.engine.sample.rate > 0) || rc.engine.sample.rate > 1)
        throw ConfigError(f.name() + ": engine.eta must be in (0, 1]");
    rc.engine.seed = static_cast<std::uint64_t>(f.get_number("engine.seed", 42));
    rc.engine.sample.base_seed = rc.engine.seed;
    rc.engine.convergence.window =
        static_cast<std::uint32_t>(f.get_number("engine.convergence_window", 10));
    positive("engine.convergence_window", rc.engine.convergence.window);
    if (f.has("engine.convergence_epsilon"))
        rc.engine.convergence.epsilon = f.get_number("engine.convergence_epsilon", 0.0);
    rc.engine.workers = static_cast<std::uint32_t>(f.get_number("engine.workers", 1));
    positive("engine.workers", rc.engine.workers);
    rc.engine.record_trace = f.get_bool("engine.trace", true);

    rc.cache_path = f.get_string("cache.path", "");
    rc.cache_enabled = f.get_bool("cache.enabled", true);
    rc.engine.use_cache = rc.cache_enabled;
    rc.out_dir = f.get_string("output.dir", "out");

    if (f.has("select.candidates")) rc.theta_candidates = f.get_number_array("select.candidates");
    if (rc.theta_candidates.empty())
        throw ConfigError(f.name() + ": select.candidates must not be empty");
    rc.values_path = f.get_string("select.values", "");
    rc.dev_target = f.get_string("select.dev_target", "");
    rc.test_target = f.get_string("select.test_target", "");
    rc.topk = static_cast<std::size_t>(f.get_number("select.topk", 0));

    rc.feature_csv = f.get_string("rank.features", "");
    rc.lambda = f.get_number("rank.lambda", 1e-3);
    if (rc.lambda < 0) throw ConfigError(f.name() + ": rank.lambda must be >= 0");
    rc.rank_target = f.get_string("rank.target", "");
    rc.lambda_sweep = f.get_number_array("rank.lambda_sweep");
    return rc;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_config(ConfigFile::parse_file(path));
}

TabularGameFile load_tabular_game(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open tabular game file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(path + ": bad JSON: " + e.what());
    }

    TabularGameFile out;
    const std::string kind = doc.value("kind", "table");

    if (kind == "glove") {
        out.game = TabularGame::glove();
    } else if (kind == "additive") {
        if (!doc.contains("weights") || !doc["weights"].is_array())
            throw InvalidInput(path + ": additive game needs a weights array");
        out.game = TabularGame::additive(doc["weights"].get<std::vector<double>>());
    } else if (kind == "table") {
        const auto m = doc.value("m", std::size_t{0});
        if (m == 0 || m > 20) throw InvalidInput(path + ": table game needs m in 1..20");
        std::size_t targets = 1;
        if (doc.contains("targets") && doc["targets"].is_array())
            targets = doc["targets"].size();
        std::vector<ScoreVector> by_mask(std::size_t{1} << m, ScoreVector(targets, 0.0));
        if (doc.contains("empty"))
            by_mask[0] = doc["empty"].get<ScoreVector>();
        if (!doc.contains("entries") || !doc["entries"].is_array())
            throw InvalidInput(path + ": table game needs an entries array");
        for (const auto& e : doc["entries"]) {
            if (!e.contains("subset") || !e.contains("scores"))
                throw InvalidInput(path + ": each entry needs subset and scores");
            const auto subset = e["subset"].get<std::vector<std::uint32_t>>();
            SubsetKey key = make_subset_key(subset, m);
            const auto scores = e["scores"].get<ScoreVector>();
            if (scores.size() != targets)
                throw InvalidInput(path + ": entry score arity does not match targets");
            by_mask[key.mask()] = scores;
        }
        out.game = TabularGame::from_table(m, std::move(by_mask));
    } else {
        throw InvalidInput(path + ": unknown game kind '" + kind + "'");
    }

    if (doc.contains("sources") && doc["sources"].is_array())
        out.source_names = doc["sources"].get<std::vector<std::string>>();
    if (doc.contains("targets") && doc["targets"].is_array())
        out.target_names = doc["targets"].get<std::vector<std::string>>();
    for (std::size_t i = out.source_names.size(); i < out.game.players(); ++i)
        out.source_names.push_back("s" + std::to_string(i));
    for (std::size_t i = out.target_names.size(); i < out.game.targets(); ++i)
        out.target_names.push_back("t" + std::to_string(i));
    if (out.source_names.size() != out.game.players())
        throw InvalidInput(path + ": source name count does not match m");
    if (out.target_names.size() != out.game.targets())
        throw InvalidInput(path + ": target name count does not match game arity");
    return out;
}

}  // namespace shapsrc
