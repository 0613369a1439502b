#pragma once
// Run configuration: an INI-style file with nested sections, overridable
// from the command line. Relative data paths resolve against
// CONFLICTFORGE_DATA_DIR when it is set.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conflictforge/common.hpp"

namespace conflictforge::config {

namespace fs = std::filesystem;

// section.key -> value
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_ini(std::istream& in) {
    KeyValues kv;
    std::string line, section;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw UserError("config: malformed line: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        kv[section.empty() ? key : section + "." + key] = value;
    }
    return kv;
}

struct RunConfig {
    // data inputs
    std::string comments = "mini/comments.jsonl";
    std::string articles = "mini/articles.jsonl";
    std::string threads = "mini/threads.jsonl";
    std::string stopwords = "resources/stopwords.txt";
    std::string polarity = "resources/polarity.tsv";
    std::string controversy = "resources/controversy.txt";
    std::string bias = "resources/bias.txt";
    std::string subjectivity = "resources/subjectivity.tsv";
    std::string embeddings = "resources/embeddings.txt";
    std::string gazetteer = "resources/gazetteer.tsv";
    std::string abbreviations;  // optional
    std::string pretagged;      // optional, bypasses the bundled tagger
    std::string td_scores;      // optional, per (doc, term) overrides

    std::string out_dir = "out";
    std::uint64_t seed = 1;

    // corpus
    std::size_t min_thread_comments = 10;

    // conflict
    double tau = 1.0;

    // sentiment
    int window = 5;

    // graph
    int dis_max = 100;
    int node_cap = 5000;
    std::int64_t snapshot_step = 86400;
    int snapshot_count = 0;  // 0 = derive from the corpus span

    // features
    std::size_t top_sources = 100;

    // training
    double lasso_lambda = 0.01;
    double svr_c = 10.0;
    double svr_epsilon = 0.1;
    int svr_epochs = 1500;
    double svm_c = 5.0;
    double svm_gamma = 0.5;
    int rf_trees = 50;
    int rf_depth = 10;
    int gcn_embed = 64;
    int gcn_h1 = 64;
    int gcn_h2 = 32;
    int gcn_h3 = 16;
    double gcn_lr = 1e-3;
    int gcn_batch = 256;
    int gcn_epochs = 40;
    int gcn_patience = 5;
    int pairs_per_subgraph = 16;
    double test_fraction = 0.2;
    double dev_fraction = 0.15;
    std::size_t min_source_count = 5;

    std::string data_dir;  // from CONFLICTFORGE_DATA_DIR unless overridden

    // raw key/value view for stage fingerprints
    KeyValues raw;

    std::string fingerprint(std::initializer_list<std::string> keys) const {
        std::string fp;
        for (const auto& k : keys) {
            auto it = raw.find(k);
            fp += k + "=" + (it == raw.end() ? "" : it->second) + ";";
        }
        return fp;
    }

    fs::path resolve(const std::string& p) const {
        if (p.empty()) return {};
        fs::path path(p);
        if (path.is_absolute() || data_dir.empty()) return path;
        return fs::path(data_dir) / path;
    }

    fs::path out() const { return fs::path(out_dir); }
};

namespace detail {

inline void assign(RunConfig& c, const std::string& key, const std::string& value) {
    auto to_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
    auto to_i = [&] { return std::stoi(value); };
    auto to_d = [&] { return std::stod(value); };
    if (key == "seed") c.seed = to_u64();
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "data_dir") c.data_dir = value;
    else if (key == "data.comments") c.comments = value;
    else if (key == "data.articles") c.articles = value;
    else if (key == "data.threads") c.threads = value;
    else if (key == "data.stopwords") c.stopwords = value;
    else if (key == "data.polarity") c.polarity = value;
    else if (key == "data.controversy") c.controversy = value;
    else if (key == "data.bias") c.bias = value;
    else if (key == "data.subjectivity") c.subjectivity = value;
    else if (key == "data.embeddings") c.embeddings = value;
    else if (key == "data.gazetteer") c.gazetteer = value;
    else if (key == "data.abbreviations") c.abbreviations = value;
    else if (key == "data.pretagged") c.pretagged = value;
    else if (key == "data.td_scores") c.td_scores = value;
    else if (key == "corpus.min_thread_comments") c.min_thread_comments = to_u64();
    else if (key == "conflict.tau") c.tau = to_d();
    else if (key == "sentiment.window") c.window = to_i();
    else if (key == "graph.dis_max") c.dis_max = to_i();
    else if (key == "graph.node_cap") c.node_cap = to_i();
    else if (key == "graph.snapshot_step") c.snapshot_step = std::stoll(value);
    else if (key == "graph.snapshot_count") c.snapshot_count = to_i();
    else if (key == "features.top_sources") c.top_sources = to_u64();
    else if (key == "train.lasso_lambda") c.lasso_lambda = to_d();
    else if (key == "train.svr_c") c.svr_c = to_d();
    else if (key == "train.svr_epsilon") c.svr_epsilon = to_d();
    else if (key == "train.svr_epochs") c.svr_epochs = to_i();
    else if (key == "train.svm_c") c.svm_c = to_d();
    else if (key == "train.svm_gamma") c.svm_gamma = to_d();
    else if (key == "train.rf_trees") c.rf_trees = to_i();
    else if (key == "train.rf_depth") c.rf_depth = to_i();
    else if (key == "train.gcn_embed") c.gcn_embed = to_i();
    else if (key == "train.gcn_h1") c.gcn_h1 = to_i();
    else if (key == "train.gcn_h2") c.gcn_h2 = to_i();
    else if (key == "train.gcn_h3") c.gcn_h3 = to_i();
    else if (key == "train.gcn_lr") c.gcn_lr = to_d();
    else if (key == "train.gcn_batch") c.gcn_batch = to_i();
    else if (key == "train.gcn_epochs") c.gcn_epochs = to_i();
    else if (key == "train.gcn_patience") c.gcn_patience = to_i();
    else if (key == "train.pairs_per_subgraph") c.pairs_per_subgraph = to_i();
    else if (key == "train.test_fraction") c.test_fraction = to_d();
    else if (key == "train.dev_fraction") c.dev_fraction = to_d();
    else if (key == "train.min_source_count") c.min_source_count = to_u64();
    else throw UserError("config: unknown key: " + key);
}

}  // namespace detail

inline RunConfig load(const std::string& config_path) {
    RunConfig cfg;
    if (const char* env = std::getenv("CONFLICTFORGE_DATA_DIR")) cfg.data_dir = env;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw UserError("cannot open config file: " + config_path);
        cfg.raw = parse_ini(in);
        for (const auto& [key, value] : cfg.raw) {
            try {
                detail::assign(cfg, key, value);
            } catch (const UserError&) {
                throw;
            } catch (const std::exception&) {
                throw UserError("config: bad value for " + key + ": " + value);
            }
        }
    }
    return cfg;
}

// Applies a command-line override and records it in the raw view so stage
// fingerprints notice the change.
inline void override_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    detail::assign(cfg, key, value);
    cfg.raw[key] = value;
}

}  // namespace conflictforge::config
