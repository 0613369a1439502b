#pragma once
// Train and predict stages: news-conflict regression (lasso / SVR / random
// forest), the three masked pair SVMs, and the graph-convolution pair
// scorer. Models are persisted as versioned JSON tensor dumps.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "conflictforge/gcn.hpp"
#include "conflictforge/pipeline.hpp"
#include "conflictforge/regress.hpp"
#include "conflictforge/samples.hpp"
#include "conflictforge/svm.hpp"
#include "conflictforge/synthetic.hpp"

namespace conflictforge::pipeline {

// ---------------------------------------------------------------------------
// JSON tensor helpers

inline nlohmann::json json_of(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json json_of(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

inline Eigen::MatrixXd matrix_from(const nlohmann::json& j) {
    if (j.empty()) return {};
    Eigen::MatrixXd m(j.size(), j[0].size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(i, k) = j[i][k].get<double>();
    return m;
}

inline Eigen::VectorXd vector_from(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

// ---------------------------------------------------------------------------
// News-conflict regression

struct NewsDataset {
    std::vector<std::string> article_ids;
    std::vector<std::string> sources;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

inline NewsDataset load_news_dataset(const RunConfig& cfg) {
    io::require_artifact(cfg.out(), kArticleFeatures, "features");
    io::require_artifact(cfg.out(), kNewsConflict, "conflict");
    auto feats = io::read_csv(cfg.out() / kArticleFeatures);
    auto scores = io::read_csv(cfg.out() / kNewsConflict);
    std::unordered_map<std::string, std::pair<std::string, double>> nc;  // id -> (source, nc)
    for (const auto& r : scores.rows) nc[r[0]] = {r[1], std::stod(r[2])};

    NewsDataset data;
    std::vector<std::vector<double>> rows;
    for (const auto& r : feats.rows) {
        auto it = nc.find(r[0]);
        if (it == nc.end()) continue;
        data.article_ids.push_back(r[0]);
        data.sources.push_back(it->second.first);
        std::vector<double> row;
        for (std::size_t j = 1; j < r.size(); ++j) row.push_back(std::stod(r[j]));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw UserError("no articles with both features and conflict scores");
    data.x.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows[0].size()));
    data.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        data.y(static_cast<Eigen::Index>(i)) = nc[data.article_ids[i]].second;
    }
    return data;
}

// Stratified by source so train and test keep the same source mix.
struct SplitIndices {
    std::vector<int> train, test;
};

inline SplitIndices stratified_split(const std::vector<std::string>& sources,
                                     double test_fraction, std::size_t min_per_source,
                                     std::uint64_t seed) {
    std::map<std::string, std::vector<int>> by_source;
    for (std::size_t i = 0; i < sources.size(); ++i)
        by_source[sources[i]].push_back(static_cast<int>(i));
    std::vector<std::string> starved;
    for (const auto& [s, idx] : by_source)
        if (idx.size() < min_per_source) starved.push_back(s);
    if (!starved.empty()) {
        std::string msg = "too few articles per source for a stratified split:";
        for (const auto& s : starved) msg += " " + s;
        throw UserError(msg);
    }
    SplitIndices split;
    Rng rng(seed);
    for (auto& [s, idx] : by_source) {
        rng.shuffle(idx);
        std::size_t n_test = std::max<std::size_t>(
            1, static_cast<std::size_t>(test_fraction * static_cast<double>(idx.size())));
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k < n_test ? split.test : split.train).push_back(idx[k]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace detail {

inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

inline Eigen::VectorXd take(const Eigen::VectorXd& y, const std::vector<int>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
    return out;
}

inline std::vector<nlohmann::json> regression_records(const std::string& task,
                                                      const Eigen::VectorXd& truth,
                                                      const Eigen::VectorXd& pred) {
    std::vector<double> t(truth.data(), truth.data() + truth.size());
    std::vector<double> p(pred.data(), pred.data() + pred.size());
    auto m = eval::regression_metrics(t, p);
    return {metric_record(task, "mse", m.mse, t.size()),
            metric_record(task, "rmse", m.rmse, t.size()),
            metric_record(task, "smape", m.smape, t.size())};
}

inline std::vector<regress::FeatureGroup> article_feature_groups(std::size_t n_terms,
                                                                 int latent_dim) {
    int t = static_cast<int>(n_terms);
    return {
        {"td_sentiment", 0, t},
        {"polarity_counts", t, 3},
        {"entropy", t + 3, 1},
        {"controversy_bias", t + 4, 2},
        {"latent_semantics", t + 6, latent_dim},
        {"lix", t + 6 + latent_dim, 1},
        {"fog", t + 7 + latent_dim, 1},
        {"subjectivity", t + 8 + latent_dim, 1},
    };
}

}  // namespace detail

inline int train_news_regress(const RunConfig& cfg, const std::string& synthetic) {
    NewsDataset data;
    std::vector<regress::FeatureGroup> groups;
    if (synthetic == "linear") {
        auto gen = synthetic::linear_regression_data(400, 20, 3, 10.0, cfg.seed, 8.0);
        data.x = gen.x;
        data.y = gen.y;
        for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
            data.article_ids.push_back("synthetic" + std::to_string(i));
            data.sources.push_back("synthetic" + std::to_string(i % 4));
        }
        for (int j = 0; j < 20; ++j) groups.push_back({"x" + std::to_string(j), j, 1});
    } else {
        data = load_news_dataset(cfg);
        auto ts = load_ts(cfg);
        int latent_dim = static_cast<int>(data.x.cols() - ts.n_terms) - 9;
        groups = detail::article_feature_groups(ts.n_terms, latent_dim);
    }

    auto split = stratified_split(data.sources, cfg.test_fraction, cfg.min_source_count, cfg.seed);
    Eigen::MatrixXd x_train = detail::take_rows(data.x, split.train);
    Eigen::VectorXd y_train = detail::take(data.y, split.train);
    Eigen::MatrixXd x_test = detail::take_rows(data.x, split.test);
    Eigen::VectorXd y_test = detail::take(data.y, split.test);

    const std::string prefix = synthetic == "linear" ? "news-regress-synthetic" : "news-regress";
    std::vector<nlohmann::json> records;

    auto lasso = regress::lasso_fit(x_train, y_train, cfg.lasso_lambda, 1e-8, 2000);
    auto lasso_records =
        detail::regression_records(prefix + "/lasso", y_test, lasso.model.predict_rows(x_test));
    records.insert(records.end(), lasso_records.begin(), lasso_records.end());
    nlohmann::json lasso_json;
    lasso_json["format"] = "conflictforge.model.v1";
    lasso_json["kind"] = "lasso";
    lasso_json["dims"] = {{"features", data.x.cols()}};
    lasso_json["coef"] = json_of(lasso.model.coef);
    lasso_json["intercept"] = lasso.model.intercept;
    io::write_json(cfg.out() / "model_news_lasso.json", lasso_json);

    regress::SvrConfig svr_cfg{.c = cfg.svr_c, .epsilon = cfg.svr_epsilon,
                               .epochs = cfg.svr_epochs, .lr = 0.05, .seed = cfg.seed};
    auto svr = regress::svr_fit(x_train, y_train, svr_cfg);
    auto svr_records = detail::regression_records(prefix + "/svr", y_test, svr.predict_rows(x_test));
    records.insert(records.end(), svr_records.begin(), svr_records.end());
    nlohmann::json svr_json;
    svr_json["format"] = "conflictforge.model.v1";
    svr_json["kind"] = "svr";
    svr_json["dims"] = {{"features", data.x.cols()}};
    svr_json["coef"] = json_of(svr.coef);
    svr_json["intercept"] = svr.intercept;
    io::write_json(cfg.out() / "model_news_svr.json", svr_json);

    regress::RfConfig rf_cfg{.n_trees = cfg.rf_trees, .max_depth = cfg.rf_depth, .min_leaf = 2,
                             .seed = cfg.seed};
    auto forest = regress::rf_fit(x_train, y_train, rf_cfg);
    auto rf_records =
        detail::regression_records(prefix + "/rf", y_test, forest.predict_rows(x_test));
    records.insert(records.end(), rf_records.begin(), rf_records.end());
    nlohmann::json rf_json;
    rf_json["format"] = "conflictforge.model.v1";
    rf_json["kind"] = "rf";
    rf_json["dims"] = {{"features", data.x.cols()}, {"trees", forest.trees.size()}};
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : forest.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        trees.push_back(std::move(nodes));
    }
    rf_json["trees"] = std::move(trees);
    io::write_json(cfg.out() / "model_news_rf.json", rf_json);

    // feature-group importance: coefficient mass for the linear models,
    // permutation degradation for the forest
    io::CsvWriter imp(cfg.out() / "feature_importance.csv",
                      "conflictforge.feature_importance.v1", "model,feature_group,score");
    for (const auto& g : regress::coefficient_importance(lasso.model, groups))
        imp.row({"lasso", g.name, fmt_double(g.score, 9)});
    for (const auto& g : regress::permutation_importance(
             [&](const Eigen::VectorXd& row) { return svr.predict(row); }, x_test, y_test,
             groups, cfg.seed))
        imp.row({"svr", g.name, fmt_double(g.score, 9)});
    for (const auto& g : regress::permutation_importance(
             [&](const Eigen::VectorXd& row) { return forest.predict(row); }, x_test, y_test,
             groups, cfg.seed))
        imp.row({"rf", g.name, fmt_double(g.score, 9)});

    append_metrics(cfg, records);
    for (const auto& r : records)
        std::cout << r["task"].get<std::string>() << " " << r["metric"].get<std::string>()
                  << " = " << fmt_double(r["value"].get<double>(), 6) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Pair harness shared by the SVM and GCN tasks

struct PairContext {
    corpus::CorpusStore store;
    TsTable ts;
    features::SourceIndex source_index;
    std::vector<graph::ScoredInteraction> events;
    graph::EngagementGraph full_graph;

    struct CommentRef {
        std::int64_t time = 0;
        std::string comment_id;
        std::string thread_id;
        std::string article_id;
        std::string source;
    };
    std::map<std::string, std::vector<CommentRef>> timeline;  // user -> time-ordered comments
    std::unordered_map<std::string, std::unordered_map<std::string, int>> grams;  // per comment
    std::unordered_map<std::string, std::vector<double>> comment_flat;  // article-style features
    terms::DocFreq gram_stats;
    std::size_t flat_len = 0;

    std::vector<std::int64_t> snapshot_times;
};

inline PairContext build_pair_context(const RunConfig& cfg, bool with_node_features) {
    PairContext ctx;
    ctx.store = load_corpus(cfg);
    ctx.ts = load_ts(cfg);
    ctx.events = load_scored_interactions(cfg);
    if (ctx.events.empty()) throw UserError("no scored interactions; run `conflict` first");
    ctx.full_graph = graph::build_graph(ctx.events);

    io::require_artifact(cfg.out(), kSourceIndex, "features");
    auto src = io::read_csv(cfg.out() / kSourceIndex);
    for (const auto& r : src.rows) {
        ctx.source_index.index[r[1]] = std::stoi(r[0]);
        ctx.source_index.sources.push_back(r[1]);
    }

    auto tagger = make_tagger(cfg);
    auto prepared = prepare_docs(ctx.store, tagger, cfg);
    auto stopwords = load_stopwords(cfg);
    std::optional<features::TextResources> res;
    if (with_node_features) res = load_resources(cfg, prepared);

    std::unordered_map<std::string, const text::TokenizedDoc*> doc_by_id;
    for (const auto& d : prepared) doc_by_id[d.id] = &d.doc;

    ctx.flat_len = features::ArticleFeatures::flat_length(
        ctx.ts.n_terms, with_node_features ? res->embeddings.dim : 0);

    std::set<std::string> gram_seen;
    int gram_docs = 0;
    for (const auto& c : ctx.store.comments()) {
        const corpus::Thread* thread = ctx.store.thread(c.thread_id);
        PairContext::CommentRef ref;
        ref.time = c.created_utc;
        ref.comment_id = c.id;
        ref.thread_id = c.thread_id;
        if (thread && thread->article_linked) {
            ref.article_id = thread->article_id;
            ref.source = ctx.store.article(thread->article_id)->source;
        }
        ctx.timeline[c.author].push_back(ref);

        auto doc_it = doc_by_id.find(c.id);
        if (doc_it == doc_by_id.end()) continue;
        std::unordered_map<std::string, int> grams;
        features::accumulate_grams(*doc_it->second, stopwords, grams);
        ++gram_docs;
        for (const auto& [g, n] : grams) ++ctx.gram_stats.df[g];
        ctx.grams[c.id] = std::move(grams);

        if (with_node_features) {
            const auto* cts = ctx.ts.of(c.id);
            if (!cts) continue;
            bool empty = true;
            for (const auto& s : doc_it->second->sentences)
                if (!s.tokens.empty()) empty = false;
            if (empty) {
                ctx.comment_flat[c.id] = std::vector<double>(ctx.flat_len, 0.0);
            } else {
                auto f = features::article_features(*doc_it->second, *cts, *res);
                ctx.comment_flat[c.id] = f.flatten();
            }
        }
    }
    ctx.gram_stats.n_docs = gram_docs;
    for (auto& [user, refs] : ctx.timeline)
        std::sort(refs.begin(), refs.end(), [](const auto& a, const auto& b) {
            if (a.time != b.time) return a.time < b.time;
            return a.comment_id < b.comment_id;
        });

    std::int64_t start = ctx.events.front().time;
    std::int64_t span = ctx.events.back().time - start;
    int count = cfg.snapshot_count > 0 ? cfg.snapshot_count
                                       : static_cast<int>(span / cfg.snapshot_step) + 1;
    for (int k = 1; k <= count; ++k)
        ctx.snapshot_times.push_back(start + static_cast<std::int64_t>(k) * cfg.snapshot_step);
    return ctx;
}

// History of one user from comments at or before as_of.
inline features::UserHistory user_history(const PairContext& ctx, const std::string& user,
                                          std::int64_t as_of) {
    features::UserHistory h;
    auto it = ctx.timeline.find(user);
    if (it == ctx.timeline.end()) return h;
    for (const auto& ref : it->second) {
        if (ref.time > as_of) break;
        if (const auto* ts = ctx.ts.of(ref.comment_id)) h.comment_ts.push_back(ts);
        auto g = ctx.grams.find(ref.comment_id);
        if (g != ctx.grams.end())
            for (const auto& [gram, n] : g->second) h.grams[gram] += n;
        h.discussions.insert(ref.thread_id);
        if (!ref.source.empty()) h.articles_by_source[ref.source].insert(ref.article_id);
    }
    return h;
}

// Mean article-style features over the user's past comments plus engaged
// source flags.
inline Eigen::VectorXd node_feature_vector(const PairContext& ctx, const std::string& user,
                                           std::int64_t as_of) {
    std::vector<std::vector<double>> past;
    std::set<std::string> sources;
    auto it = ctx.timeline.find(user);
    if (it != ctx.timeline.end()) {
        for (const auto& ref : it->second) {
            if (ref.time > as_of) break;
            auto f = ctx.comment_flat.find(ref.comment_id);
            if (f != ctx.comment_flat.end()) past.push_back(f->second);
            if (!ref.source.empty()) sources.insert(ref.source);
        }
    }
    auto flat = features::user_node_features(past, sources, ctx.source_index, ctx.flat_len);
    return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

// Time-ordered split of labeled pairs: the last test_fraction of snapshot
// times becomes the test set.
inline void time_ordered_split(const std::vector<samples::LabeledPair>& pairs,
                               const std::vector<std::int64_t>& snapshot_times,
                               double test_fraction, std::vector<std::size_t>& train,
                               std::vector<std::size_t>& test) {
    if (snapshot_times.empty()) throw UserError("no snapshots available");
    std::size_t cut_index = static_cast<std::size_t>(
        (1.0 - test_fraction) * static_cast<double>(snapshot_times.size()));
    if (cut_index >= snapshot_times.size()) cut_index = snapshot_times.size() - 1;
    std::int64_t cut_time = snapshot_times[cut_index];
    for (std::size_t i = 0; i < pairs.size(); ++i)
        (pairs[i].as_of < cut_time ? train : test).push_back(i);
}

// ---------------------------------------------------------------------------
// Pair SVMs

struct PairSvmModel {
    features::FeatureMask mask = features::FeatureMask::All;
    regress::Standardizer standardizer;
    svm::SvmModel model;

    // Degenerate all-zero inputs (never-met pairs under the text mask) fall
    // back to the majority training label.
    double decision(const std::vector<double>& raw) const {
        bool all_zero = true;
        for (double v : raw)
            if (v != 0.0) { all_zero = false; break; }
        if (all_zero) return model.majority_label > 0 ? 1.0 : -1.0;
        Eigen::Map<const Eigen::VectorXd> x(raw.data(), static_cast<Eigen::Index>(raw.size()));
        Eigen::VectorXd std_x =
            (x - standardizer.mean).array() / standardizer.scale.array();
        return model.decision(std_x);
    }
};

inline const char* mask_name(features::FeatureMask m) {
    switch (m) {
        case features::FeatureMask::Text: return "text";
        case features::FeatureMask::Net: return "net";
        default: return "all";
    }
}

namespace detail {

struct PairDataset {
    std::vector<samples::LabeledPair> pairs;
    std::vector<std::vector<double>> flat;  // unmasked pair features
    std::size_t n_terms = 0, n_sources = 0;
};

inline PairDataset build_pair_dataset(const RunConfig& cfg, PairContext& ctx) {
    samples::HarnessConfig hc;
    hc.tau = cfg.tau;
    hc.dis_max = cfg.dis_max;
    hc.node_cap = cfg.node_cap;
    hc.pairs_per_subgraph = cfg.pairs_per_subgraph;
    hc.seed = cfg.seed;
    PairDataset data;
    data.pairs = samples::candidate_pairs(ctx.events, ctx.snapshot_times, hc);
    data.n_terms = ctx.ts.n_terms;
    data.n_sources = ctx.source_index.size();
    std::map<std::int64_t, graph::EngagementGraph> snapshots;
    for (const auto& p : data.pairs) {
        auto snap = snapshots.find(p.as_of);
        if (snap == snapshots.end())
            snap = snapshots.emplace(p.as_of, ctx.full_graph.snapshot(p.as_of)).first;
        const auto& g = snap->second;
        terms::TermSet shim;  // only the size matters for the profile length
        shim.terms.resize(ctx.ts.n_terms);
        auto hist_i = user_history(ctx, p.user_i, p.as_of);
        auto hist_j = user_history(ctx, p.user_j, p.as_of);
        auto pf = features::pair_features(hist_i, hist_j, g, g.user_index(p.user_i),
                                          g.user_index(p.user_j), shim, ctx.source_index,
                                          ctx.gram_stats, cfg.tau);
        data.flat.push_back(pf.flatten());
    }
    return data;
}

struct PairEvalRecords {
    std::vector<nlohmann::json> records;
};

inline void pair_classification_records(std::vector<nlohmann::json>& records,
                                        const std::string& task, const std::vector<int>& labels,
                                        const std::vector<double>& scores,
                                        const std::vector<bool>& never_met, double threshold) {
    auto overall = eval::classification_metrics(labels, scores, threshold);
    records.push_back(metric_record(task, "accuracy", overall.accuracy, labels.size()));
    if (overall.auc) records.push_back(metric_record(task, "auc", *overall.auc, labels.size()));
    std::vector<int> nl;
    std::vector<double> ns;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!never_met[i]) continue;
        nl.push_back(labels[i]);
        ns.push_back(scores[i]);
    }
    if (nl.size() >= 2) {
        auto fresh = eval::classification_metrics(nl, ns, threshold);
        records.push_back(metric_record(task, "accuracy_new", fresh.accuracy, nl.size()));
        if (fresh.auc) records.push_back(metric_record(task, "auc_new", *fresh.auc, nl.size()));
    }
}

}  // namespace detail

inline int train_pair_svm(const RunConfig& cfg) {
    auto ctx = build_pair_context(cfg, /*with_node_features=*/false);
    auto data = detail::build_pair_dataset(cfg, ctx);
    if (data.pairs.size() < 4) throw UserError("not enough labeled pairs to train");

    std::vector<std::size_t> train_idx, test_idx;
    time_ordered_split(data.pairs, ctx.snapshot_times, cfg.test_fraction, train_idx, test_idx);
    if (train_idx.empty() || test_idx.empty())
        throw UserError("time-ordered split left an empty train or test set");

    std::vector<nlohmann::json> records;
    nlohmann::json bundle;
    bundle["format"] = "conflictforge.model.v1";
    bundle["kind"] = "pair-svm";
    bundle["n_terms"] = data.n_terms;
    bundle["n_sources"] = data.n_sources;

    for (auto mask : {features::FeatureMask::All, features::FeatureMask::Text,
                      features::FeatureMask::Net}) {
        auto masked = [&](std::size_t i) {
            return features::apply_mask(data.flat[i], data.n_terms, data.n_sources, mask);
        };
        Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_idx.size()),
                                static_cast<Eigen::Index>(masked(train_idx[0]).size()));
        Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_idx.size()));
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            auto row = masked(train_idx[i]);
            for (std::size_t j = 0; j < row.size(); ++j)
                x_train(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
            y_train(static_cast<Eigen::Index>(i)) = data.pairs[train_idx[i]].label == 1 ? 1 : -1;
        }

        PairSvmModel pm;
        pm.mask = mask;
        pm.standardizer = regress::Standardizer::fit(x_train);
        Eigen::MatrixXd x_std = pm.standardizer.transform(x_train);
        auto fit = svm::svm_fit(x_std, y_train, {.c = cfg.svm_c, .gamma = cfg.svm_gamma});
        pm.model = fit.model;

        std::vector<int> labels;
        std::vector<double> scores;
        std::vector<bool> fresh;
        for (std::size_t i : test_idx) {
            labels.push_back(data.pairs[i].label);
            scores.push_back(pm.decision(masked(i)));
            fresh.push_back(data.pairs[i].never_met);
        }
        detail::pair_classification_records(records,
                                            std::string("pair-svm-") + mask_name(mask), labels,
                                            scores, fresh, 0.0);

        nlohmann::json mj;
        mj["gamma"] = pm.model.gamma;
        mj["bias"] = pm.model.bias;
        mj["majority_label"] = pm.model.majority_label;
        mj["alpha_y"] = json_of(pm.model.alpha_y);
        mj["support_vectors"] = json_of(pm.model.support_vectors);
        mj["standardizer_mean"] = json_of(pm.standardizer.mean);
        mj["standardizer_scale"] = json_of(pm.standardizer.scale);
        bundle[mask_name(mask)] = std::move(mj);
    }
    io::write_json(cfg.out() / "model_pair_svm.json", bundle);
    append_metrics(cfg, records);
    for (const auto& r : records)
        std::cout << r["task"].get<std::string>() << " " << r["metric"].get<std::string>()
                  << " = " << fmt_double(r["value"].get<double>(), 6) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Pair GCN

inline nlohmann::json gcn_params_json(const gcn::GcnParams& p) {
    nlohmann::json j;
    j["dims"] = {{"input", p.dims.input}, {"embed", p.dims.embed}, {"h1", p.dims.h1},
                 {"h2", p.dims.h2},       {"h3", p.dims.h3}};
    j["k_f"] = json_of(p.k_f);
    j["b_f"] = json_of(p.b_f);
    j["k_g1"] = json_of(p.k_g1);
    j["k_g2"] = json_of(p.k_g2);
    j["k_g3"] = json_of(p.k_g3);
    j["k_c"] = json_of(p.k_c);
    j["b_c"] = p.b_c;
    return j;
}

inline gcn::GcnParams gcn_params_from(const nlohmann::json& j) {
    gcn::GcnParams p;
    p.dims.input = j["dims"]["input"].get<int>();
    p.dims.embed = j["dims"]["embed"].get<int>();
    p.dims.h1 = j["dims"]["h1"].get<int>();
    p.dims.h2 = j["dims"]["h2"].get<int>();
    p.dims.h3 = j["dims"]["h3"].get<int>();
    p.k_f = matrix_from(j["k_f"]);
    p.b_f = vector_from(j["b_f"]);
    p.k_g1 = matrix_from(j["k_g1"]);
    p.k_g2 = matrix_from(j["k_g2"]);
    p.k_g3 = matrix_from(j["k_g3"]);
    p.k_c = vector_from(j["k_c"]);
    p.b_c = j["b_c"].get<double>();
    return p;
}

namespace detail {

struct GcnDatasets {
    std::vector<gcn::GcnSample> train, test;
};

// Samples from the real corpus artifacts.
inline GcnDatasets build_gcn_dataset(const RunConfig& cfg, PairContext& ctx) {
    samples::HarnessConfig hc;
    hc.tau = cfg.tau;
    hc.dis_max = cfg.dis_max;
    hc.node_cap = cfg.node_cap;
    hc.seed = cfg.seed;
    auto pairs = samples::candidate_pairs(ctx.events, ctx.snapshot_times, hc);
    std::vector<std::size_t> train_idx, test_idx;
    time_ordered_split(pairs, ctx.snapshot_times, cfg.test_fraction, train_idx, test_idx);

    int feature_dim = static_cast<int>(ctx.flat_len + ctx.source_index.size());
    std::map<std::int64_t, graph::EngagementGraph> snapshots;
    auto to_sample = [&](const samples::LabeledPair& p) {
        auto snap = snapshots.find(p.as_of);
        if (snap == snapshots.end())
            snap = snapshots.emplace(p.as_of, ctx.full_graph.snapshot(p.as_of)).first;
        return samples::make_gcn_sample(
            snap->second, p, hc,
            [&](const std::string& user) { return node_feature_vector(ctx, user, p.as_of); },
            feature_dim);
    };
    GcnDatasets out;
    for (std::size_t i : train_idx) out.train.push_back(to_sample(pairs[i]));
    for (std::size_t i : test_idx) out.test.push_back(to_sample(pairs[i]));
    return out;
}

// Samples from the planted-camp generator.
inline GcnDatasets build_planted_dataset(const RunConfig& cfg) {
    synthetic::PlantedConfig pc;
    pc.seed = cfg.seed;
    auto world = synthetic::planted_conflict_world(pc);
    graph::EngagementGraph g = graph::build_graph(world.events);

    samples::HarnessConfig hc;
    hc.tau = 1.0;
    hc.dis_max = cfg.dis_max;
    hc.node_cap = std::min(cfg.node_cap, 64);
    hc.seed = cfg.seed;

    std::vector<std::int64_t> times;
    for (int day = 5; day < pc.days - 1; ++day)
        times.push_back(world.start_time + static_cast<std::int64_t>(day + 1) * 86400);
    auto pairs = samples::candidate_pairs(world.events, times, hc);

    std::vector<std::size_t> train_idx, test_idx;
    time_ordered_split(pairs, times, cfg.test_fraction, train_idx, test_idx);

    std::map<std::int64_t, graph::EngagementGraph> snapshots;
    auto to_sample = [&](const samples::LabeledPair& p) {
        auto snap = snapshots.find(p.as_of);
        if (snap == snapshots.end())
            snap = snapshots.emplace(p.as_of, g.snapshot(p.as_of)).first;
        return samples::make_gcn_sample(
            snap->second, p, hc,
            [&](const std::string& user) {
                int u = std::stoi(user.substr(1));
                return Eigen::VectorXd(world.node_features.row(u).transpose());
            },
            pc.feature_dim);
    };
    GcnDatasets out;
    for (std::size_t i : train_idx) out.train.push_back(to_sample(pairs[i]));
    for (std::size_t i : test_idx) out.test.push_back(to_sample(pairs[i]));
    return out;
}

}  // namespace detail

inline int train_pair_gcn(const RunConfig& cfg, const std::string& synthetic_mode) {
    detail::GcnDatasets data;
    int input_dim = 0;
    if (synthetic_mode == "planted") {
        data = detail::build_planted_dataset(cfg);
    } else {
        auto ctx = build_pair_context(cfg, /*with_node_features=*/true);
        data = detail::build_gcn_dataset(cfg, ctx);
    }
    if (data.train.empty() || data.test.empty())
        throw UserError("not enough labeled pairs for the graph model");
    input_dim = static_cast<int>(data.train.front().x.cols());

    gcn::TrainConfig tc;
    tc.dims = gcn::GcnDims{.input = input_dim, .embed = cfg.gcn_embed, .h1 = cfg.gcn_h1,
                           .h2 = cfg.gcn_h2, .h3 = cfg.gcn_h3};
    tc.lr = cfg.gcn_lr;
    tc.batch_size = cfg.gcn_batch;
    tc.max_epochs = cfg.gcn_epochs;
    tc.patience = cfg.gcn_patience;
    tc.dev_fraction = cfg.dev_fraction;
    tc.seed = cfg.seed;
    auto result = gcn::gcn_train(data.train, tc);

    io::CsvWriter log(cfg.out() / "train_log.csv", "conflictforge.train_log.v1",
                      "step,split,loss,auc");
    for (const auto& row : result.log)
        log.row({std::to_string(row.step), row.split, fmt_double(row.loss, 9),
                 fmt_double(row.auc, 9)});

    std::vector<int> labels;
    std::vector<double> scores;
    std::vector<bool> fresh;
    for (const auto& s : data.test) {
        labels.push_back(s.label);
        scores.push_back(gcn::gcn_forward(s.a_hat, s.x, result.params, s.anchor_i, s.anchor_j));
        fresh.push_back(s.never_met);
    }
    std::vector<nlohmann::json> records;
    const std::string task =
        synthetic_mode == "planted" ? "pair-gcn-synthetic" : "pair-gcn";
    detail::pair_classification_records(records, task, labels, scores, fresh, 0.5);
    records.push_back(metric_record(task, "dev_auc", result.best_dev_auc, data.train.size()));

    nlohmann::json model = gcn_params_json(result.params);
    model["format"] = "conflictforge.model.v1";
    model["kind"] = "gcn";
    io::write_json(cfg.out() / "model_pair_gcn.json", model);

    append_metrics(cfg, records);
    for (const auto& r : records)
        std::cout << r["task"].get<std::string>() << " " << r["metric"].get<std::string>()
                  << " = " << fmt_double(r["value"].get<double>(), 6) << "\n";
    return 0;
}

inline int run_train(const RunConfig& cfg, const std::string& task,
                     const std::string& synthetic_mode) {
    if (task == "news-regress") return train_news_regress(cfg, synthetic_mode);
    if (task == "pair-svm") {
        if (!synthetic_mode.empty() && synthetic_mode != "none")
            throw UserError("pair-svm has no synthetic mode");
        return train_pair_svm(cfg);
    }
    if (task == "pair-gcn") return train_pair_gcn(cfg, synthetic_mode);
    throw UserError("unknown train task: " + task +
                    " (expected news-regress, pair-svm or pair-gcn)");
}

// ---------------------------------------------------------------------------
// Predict

inline int run_predict(const RunConfig& cfg, const std::string& task) {
    if (task == "news-regress") {
        auto data = load_news_dataset(cfg);
        io::CsvWriter csv(cfg.out() / "predictions_news.csv", "conflictforge.predictions.v1",
                          "article_id,model,prediction");
        auto emit_linear = [&](const char* file, const char* name) {
            fs::path p = cfg.out() / file;
            if (!fs::exists(p)) return;
            auto j = io::read_json(p);
            regress::LinearModel m;
            m.coef = vector_from(j["coef"]);
            m.intercept = j["intercept"].get<double>();
            for (std::size_t i = 0; i < data.article_ids.size(); ++i)
                csv.row({data.article_ids[i], name,
                         fmt_double(m.predict(Eigen::VectorXd(data.x.row(i).transpose())), 9)});
        };
        emit_linear("model_news_lasso.json", "lasso");
        emit_linear("model_news_svr.json", "svr");
        fs::path rf_path = cfg.out() / "model_news_rf.json";
        if (fs::exists(rf_path)) {
            auto j = io::read_json(rf_path);
            regress::Forest forest;
            for (const auto& tj : j["trees"]) {
                regress::Tree tree;
                for (const auto& nj : tj)
                    tree.nodes.push_back({nj[0].get<int>(), nj[1].get<double>(),
                                          nj[2].get<int>(), nj[3].get<int>(),
                                          nj[4].get<double>()});
                forest.trees.push_back(std::move(tree));
            }
            for (std::size_t i = 0; i < data.article_ids.size(); ++i)
                csv.row({data.article_ids[i], "rf",
                         fmt_double(forest.predict(Eigen::VectorXd(data.x.row(i).transpose())), 9)});
        }
        std::cout << "predict news-regress: wrote predictions for " << data.article_ids.size()
                  << " articles\n";
        return 0;
    }
    if (task == "pair-svm" || task == "pair-gcn") {
        const char* model_file =
            task == "pair-svm" ? "model_pair_svm.json" : "model_pair_gcn.json";
        io::require_artifact(cfg.out(), model_file, "train " + task);
        auto ctx = build_pair_context(cfg, /*with_node_features=*/task == "pair-gcn");
        samples::HarnessConfig hc;
        hc.tau = cfg.tau;
        hc.dis_max = cfg.dis_max;
        hc.node_cap = cfg.node_cap;
        hc.seed = cfg.seed;
        // score the pairs of the final snapshot window
        std::vector<std::int64_t> last = {ctx.snapshot_times.back()};
        auto pairs = samples::candidate_pairs(ctx.events, last, hc);
        auto snapshot = ctx.full_graph.snapshot(last.front());

        std::string out_name = std::string("predictions_") +
                               (task == "pair-svm" ? "pair_svm.csv" : "pair_gcn.csv");
        if (task == "pair-svm") {
            auto j = io::read_json(cfg.out() / model_file);
            std::map<std::string, PairSvmModel> models;
            for (const char* name : {"all", "text", "net"}) {
                PairSvmModel m;
                m.mask = std::string(name) == "text"
                             ? features::FeatureMask::Text
                             : (std::string(name) == "net" ? features::FeatureMask::Net
                                                           : features::FeatureMask::All);
                const auto& mj = j[name];
                m.model.gamma = mj["gamma"].get<double>();
                m.model.bias = mj["bias"].get<double>();
                m.model.majority_label = mj["majority_label"].get<int>();
                m.model.alpha_y = vector_from(mj["alpha_y"]);
                m.model.support_vectors = matrix_from(mj["support_vectors"]);
                m.standardizer.mean = vector_from(mj["standardizer_mean"]);
                m.standardizer.scale = vector_from(mj["standardizer_scale"]);
                models[name] = std::move(m);
            }
            std::size_t n_terms = j["n_terms"].get<std::size_t>();
            std::size_t n_sources = j["n_sources"].get<std::size_t>();
            io::CsvWriter csv(cfg.out() / out_name, "conflictforge.predictions.v1",
                              "user_a,user_b,as_of,score_all,score_text,score_net,label");
            terms::TermSet shim;
            shim.terms.resize(n_terms);
            for (const auto& p : pairs) {
                auto hist_i = user_history(ctx, p.user_i, p.as_of);
                auto hist_j = user_history(ctx, p.user_j, p.as_of);
                auto pf = features::pair_features(hist_i, hist_j, snapshot,
                                                  snapshot.user_index(p.user_i),
                                                  snapshot.user_index(p.user_j), shim,
                                                  ctx.source_index, ctx.gram_stats, cfg.tau);
                auto flat = pf.flatten();
                csv.row({p.user_i, p.user_j, std::to_string(p.as_of),
                         fmt_double(models["all"].decision(features::apply_mask(
                                        flat, n_terms, n_sources, features::FeatureMask::All)), 9),
                         fmt_double(models["text"].decision(features::apply_mask(
                                        flat, n_terms, n_sources, features::FeatureMask::Text)), 9),
                         fmt_double(models["net"].decision(features::apply_mask(
                                        flat, n_terms, n_sources, features::FeatureMask::Net)), 9),
                         std::to_string(p.label)});
            }
            std::cout << "predict pair-svm: scored " << pairs.size() << " pairs\n";
        } else {
            auto params = gcn_params_from(io::read_json(cfg.out() / model_file));
            int feature_dim = static_cast<int>(ctx.flat_len + ctx.source_index.size());
            io::CsvWriter csv(cfg.out() / out_name, "conflictforge.predictions.v1",
                              "user_a,user_b,as_of,score,label");
            for (const auto& p : pairs) {
                auto sample = samples::make_gcn_sample(
                    snapshot, p, hc,
                    [&](const std::string& user) {
                        return node_feature_vector(ctx, user, p.as_of);
                    },
                    feature_dim);
                double score = gcn::gcn_forward(sample.a_hat, sample.x, params, sample.anchor_i,
                                                sample.anchor_j);
                csv.row({p.user_i, p.user_j, std::to_string(p.as_of), fmt_double(score, 9),
                         std::to_string(p.label)});
            }
            std::cout << "predict pair-gcn: scored " << pairs.size() << " pairs\n";
        }
        return 0;
    }
    throw UserError("unknown predict task: " + task);
}

}  // namespace conflictforge::pipeline
