#pragma once
// Pipeline stages behind the CLI: each stage reads its predecessor's
// artifacts from the output directory, writes schema-versioned files and a
// stamp that makes identical reruns a no-op.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "conflictforge/config.hpp"
#include "conflictforge/conflict.hpp"
#include "conflictforge/corpus.hpp"
#include "conflictforge/dynamics.hpp"
#include "conflictforge/eval.hpp"
#include "conflictforge/features.hpp"
#include "conflictforge/graph.hpp"
#include "conflictforge/io.hpp"
#include "conflictforge/sentiment.hpp"
#include "conflictforge/terms.hpp"
#include "conflictforge/text.hpp"

namespace conflictforge::pipeline {

namespace fs = std::filesystem;
using config::RunConfig;

// ---------------------------------------------------------------------------
// Shared context builders

inline corpus::CorpusStore load_corpus(const RunConfig& cfg) {
    std::ifstream comments(cfg.resolve(cfg.comments));
    std::ifstream articles(cfg.resolve(cfg.articles));
    std::ifstream threads(cfg.resolve(cfg.threads));
    if (!comments) throw UserError("cannot open comments file: " + cfg.resolve(cfg.comments).string());
    if (!articles) throw UserError("cannot open articles file: " + cfg.resolve(cfg.articles).string());
    if (!threads) throw UserError("cannot open threads file: " + cfg.resolve(cfg.threads).string());
    return corpus::ingest(comments, articles, threads,
                          corpus::IngestOptions{cfg.min_thread_comments});
}

inline text::RuleTagger make_tagger(const RunConfig& cfg) {
    text::RuleTagger tagger;
    fs::path gaz = cfg.resolve(cfg.gazetteer);
    if (!cfg.gazetteer.empty() && fs::exists(gaz)) {
        std::ifstream in(gaz);
        tagger.load_gazetteer(in);
    }
    return tagger;
}

inline std::unordered_set<std::string> load_stopwords(const RunConfig& cfg) {
    std::ifstream in(cfg.resolve(cfg.stopwords));
    if (!in) throw UserError("cannot open stopwords file: " + cfg.resolve(cfg.stopwords).string());
    return text::load_word_list(in);
}

inline std::optional<std::unordered_set<std::string>> load_abbreviations(const RunConfig& cfg) {
    if (cfg.abbreviations.empty()) return std::nullopt;
    std::ifstream in(cfg.resolve(cfg.abbreviations));
    if (!in) throw UserError("cannot open abbreviations file: " +
                             cfg.resolve(cfg.abbreviations).string());
    return text::load_word_list(in);
}

struct PreparedDoc {
    std::string id;
    bool is_article = false;
    text::TokenizedDoc doc;  // tagged and pronoun-resolved
};

namespace detail {

inline text::Pos pos_from_string(const std::string& s) {
    std::string u = to_lower(s);
    if (u == "noun") return text::Pos::Noun;
    if (u == "propn" || u == "proper_noun") return text::Pos::ProperNoun;
    if (u == "verb") return text::Pos::Verb;
    if (u == "adj" || u == "adjective") return text::Pos::Adjective;
    if (u == "adv" || u == "adverb") return text::Pos::Adverb;
    if (u == "det") return text::Pos::Determiner;
    if (u == "adp" || u == "prep") return text::Pos::Preposition;
    if (u == "pron") return text::Pos::Pronoun;
    if (u == "num") return text::Pos::Number;
    return text::Pos::Unknown;
}

inline text::Entity ent_from_string(const std::string& s) {
    std::string u = to_lower(s);
    if (u == "person") return text::Entity::Person;
    if (u.empty() || u == "-" || u == "none" || u == "o") return text::Entity::None;
    return text::Entity::Other;
}

// pretagged rows bypass the bundled tagger entirely
inline std::unordered_map<std::string, text::TokenizedDoc> load_pretagged(const RunConfig& cfg) {
    std::unordered_map<std::string, text::TokenizedDoc> out;
    if (cfg.pretagged.empty()) return out;
    std::ifstream in(cfg.resolve(cfg.pretagged));
    if (!in) throw UserError("cannot open pretagged file: " + cfg.resolve(cfg.pretagged).string());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("comment_id") || !j.contains("tokens")) continue;
        text::TokenizedDoc doc;
        text::Sentence sentence;
        for (const auto& t : j["tokens"]) {
            std::string surface = t.value("text", "");
            if (surface == "." || surface == "!" || surface == "?") {
                if (!sentence.tokens.empty()) {
                    sentence.terminator = surface;
                    doc.sentences.push_back(std::move(sentence));
                    sentence = {};
                }
                continue;
            }
            text::Token token;
            token.text = surface;
            token.lower = to_lower(surface);
            token.lemma = to_lower(t.value("lemma", token.lower));
            token.pos = pos_from_string(t.value("pos", ""));
            token.ent = ent_from_string(t.value("ent", ""));
            sentence.tokens.push_back(std::move(token));
        }
        if (!sentence.tokens.empty()) doc.sentences.push_back(std::move(sentence));
        out[j["comment_id"].get<std::string>()] = std::move(doc);
    }
    return out;
}

}  // namespace detail

// Tokenizes, tags and pronoun-resolves every comment and article.
inline std::vector<PreparedDoc> prepare_docs(const corpus::CorpusStore& store,
                                             const text::RuleTagger& tagger,
                                             const RunConfig& cfg) {
    auto abbr = load_abbreviations(cfg);
    auto pretagged = detail::load_pretagged(cfg);
    std::vector<PreparedDoc> docs;
    docs.reserve(store.comments().size() + store.articles().size());
    for (const auto& c : store.comments()) {
        PreparedDoc d;
        d.id = c.id;
        auto it = pretagged.find(c.id);
        if (it != pretagged.end()) {
            d.doc = it->second;
        } else {
            d.doc = terms::resolve_pronouns(
                text::tokenize(c.body, abbr ? &*abbr : nullptr), tagger);
        }
        docs.push_back(std::move(d));
    }
    for (const auto& a : store.articles()) {
        PreparedDoc d;
        d.id = a.id;
        d.is_article = true;
        d.doc = terms::resolve_pronouns(
            text::tokenize(a.title + ". " + a.text, abbr ? &*abbr : nullptr), tagger);
        docs.push_back(std::move(d));
    }
    return docs;
}

// ---------------------------------------------------------------------------
// Artifact names

constexpr const char* kSummary = "corpus_summary.json";
constexpr const char* kInteractions = "interactions.csv";
constexpr const char* kTerms = "terms.csv";
constexpr const char* kTsVectors = "ts_vectors.jsonl";
constexpr const char* kPairConflict = "pair_conflict.csv";
constexpr const char* kNewsConflict = "news_conflict.csv";
constexpr const char* kGraph = "graph.csv";
constexpr const char* kArticleFeatures = "article_features.csv";
constexpr const char* kSourceIndex = "node_sources.csv";

// ---------------------------------------------------------------------------
// Stage: ingest

inline int run_ingest(const RunConfig& cfg) {
    fs::create_directories(cfg.out());
    std::vector<fs::path> inputs = {cfg.resolve(cfg.comments), cfg.resolve(cfg.articles),
                                    cfg.resolve(cfg.threads)};
    std::uint64_t h = io::hash_files_and_config(
        inputs, cfg.fingerprint({"corpus.min_thread_comments"}));
    if (io::stage_up_to_date(cfg.out(), "ingest", h, {kSummary, kInteractions})) {
        std::cout << "ingest: up to date\n";
        return 0;
    }

    auto store = load_corpus(cfg);
    const auto& st = store.stats();
    nlohmann::json summary;
    summary["format"] = "conflictforge.summary.v1";
    summary["comments"] = st.comments;
    summary["articles"] = st.articles;
    summary["threads"] = st.threads;
    summary["skipped_lines"] = st.skipped_lines;
    summary["duplicate_ids"] = st.duplicate_ids;
    summary["dropped_threads"] = st.dropped_threads;
    summary["dropped_comments"] = st.dropped_comments;
    summary["unlinked_threads"] = st.unlinked_threads;
    summary["comments_without_thread"] = st.comments_without_thread;
    std::size_t orphans = 0;
    auto interactions = corpus::all_interactions(store, &orphans);
    summary["orphan_comments"] = orphans;
    summary["interactions"] = interactions.size();
    io::write_json(cfg.out() / kSummary, summary);

    io::CsvWriter csv(cfg.out() / kInteractions, "conflictforge.interactions.v1",
                      "user_a,user_b,comment_a,comment_b,time_utc,depth");
    for (const auto& i : interactions)
        csv.row({i.user_a, i.user_b, i.comment_a_id, i.comment_b_id,
                 std::to_string(i.time_utc), std::to_string(i.depth)});

    io::write_stamp(cfg.out(), "ingest", h, {kSummary, kInteractions});
    std::cout << "ingest: " << st.comments << " comments, " << st.articles << " articles, "
              << st.threads << " threads, " << interactions.size() << " interactions\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Stage: terms

inline int run_terms(const RunConfig& cfg) {
    fs::create_directories(cfg.out());
    io::require_artifact(cfg.out(), kSummary, "ingest");
    std::vector<fs::path> inputs = {cfg.resolve(cfg.comments), cfg.resolve(cfg.articles),
                                    cfg.resolve(cfg.threads), cfg.resolve(cfg.stopwords),
                                    cfg.resolve(cfg.gazetteer)};
    if (!cfg.abbreviations.empty()) inputs.push_back(cfg.resolve(cfg.abbreviations));
    if (!cfg.pretagged.empty()) inputs.push_back(cfg.resolve(cfg.pretagged));
    std::uint64_t h = io::hash_files_and_config(
        inputs, cfg.fingerprint({"corpus.min_thread_comments"}));
    if (io::stage_up_to_date(cfg.out(), "terms", h, {kTerms})) {
        std::cout << "terms: up to date\n";
        return 0;
    }

    auto store = load_corpus(cfg);
    auto tagger = make_tagger(cfg);
    auto stopwords = load_stopwords(cfg);
    auto prepared = prepare_docs(store, tagger, cfg);
    std::vector<text::TokenizedDoc> docs;
    docs.reserve(prepared.size());
    for (auto& d : prepared) docs.push_back(d.doc);
    auto term_set = terms::build_term_set(docs, stopwords);

    io::CsvWriter csv(cfg.out() / kTerms, "conflictforge.terms.v1 docs=" +
                      std::to_string(term_set.corpus_doc_count),
                      "index,term,is_entity,doc_freq");
    for (std::size_t i = 0; i < term_set.size(); ++i)
        csv.row({std::to_string(i), term_set.terms[i],
                 std::to_string(static_cast<int>(term_set.is_named_entity[i])),
                 std::to_string(term_set.doc_freq[i])});

    io::write_stamp(cfg.out(), "terms", h, {kTerms});
    std::cout << "terms: " << term_set.size() << " keywords over "
              << term_set.corpus_doc_count << " documents\n";
    return 0;
}

inline terms::TermSet load_term_set(const RunConfig& cfg) {
    io::require_artifact(cfg.out(), kTerms, "terms");
    std::ifstream in(cfg.out() / kTerms);
    terms::TermSet ts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# conflictforge.terms", 0) == 0) {
            auto at = line.find("docs=");
            if (at != std::string::npos) ts.corpus_doc_count = std::stoi(line.substr(at + 5));
            continue;
        }
        if (line.empty() || line[0] == '#' || line.rfind("index,", 0) == 0) continue;
        auto cells = split(line, ',');
        if (cells.size() != 4) continue;
        ts.terms.push_back(cells[1]);
        ts.is_named_entity.push_back(static_cast<char>(std::stoi(cells[2])));
        ts.doc_freq.push_back(std::stoi(cells[3]));
    }
    ts.rebuild_index();
    return ts;
}

// ---------------------------------------------------------------------------
// Stage: sentiment

namespace detail {

struct TdOverrides {
    // doc id -> lemma -> probability triple
    std::unordered_map<std::string, std::unordered_map<std::string, sentiment::TdProbability>> map;
};

inline TdOverrides load_td_scores(const RunConfig& cfg) {
    TdOverrides out;
    if (cfg.td_scores.empty()) return out;
    std::ifstream in(cfg.resolve(cfg.td_scores));
    if (!in) throw UserError("cannot open td_scores file: " + cfg.resolve(cfg.td_scores).string());
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        sentiment::TdProbability p{j.value("p_neg", 0.0), j.value("p_neu", 1.0),
                                   j.value("p_pos", 0.0)};
        out.map[j.value("doc_id", "")][to_lower(j.value("term", ""))] = p;
    }
    return out;
}

}  // namespace detail

inline sentiment::PolarityLexicon load_polarity(const RunConfig& cfg) {
    std::ifstream in(cfg.resolve(cfg.polarity));
    if (!in) throw UserError("cannot open polarity lexicon: " + cfg.resolve(cfg.polarity).string());
    return sentiment::PolarityLexicon::from_tsv(in);
}

inline int run_sentiment(const RunConfig& cfg) {
    fs::create_directories(cfg.out());
    io::require_artifact(cfg.out(), kTerms, "terms");
    std::vector<fs::path> inputs = {cfg.resolve(cfg.comments), cfg.resolve(cfg.articles),
                                    cfg.resolve(cfg.threads), cfg.resolve(cfg.polarity),
                                    cfg.out() / kTerms};
    if (!cfg.td_scores.empty()) inputs.push_back(cfg.resolve(cfg.td_scores));
    std::uint64_t h = io::hash_files_and_config(
        inputs, cfg.fingerprint({"corpus.min_thread_comments", "sentiment.window"}));
    if (io::stage_up_to_date(cfg.out(), "sentiment", h, {kTsVectors})) {
        std::cout << "sentiment: up to date\n";
        return 0;
    }

    auto store = load_corpus(cfg);
    auto tagger = make_tagger(cfg);
    auto term_set = load_term_set(cfg);
    auto prepared = prepare_docs(store, tagger, cfg);
    auto lexicon = load_polarity(cfg);
    auto overrides = detail::load_td_scores(cfg);
    sentiment::LexiconTdProvider base(lexicon, cfg.window);

    std::ofstream out(cfg.out() / kTsVectors, std::ios::binary);
    if (!out) throw UserError("cannot write ts vectors");
    out << R"({"format":"conflictforge.ts.v1","terms":)" << term_set.size() << "}\n";
    for (const auto& d : prepared) {
        sentiment::TargetSentimentVector ts;
        auto ov = overrides.map.find(d.id);
        if (ov != overrides.map.end()) {
            sentiment::OverridingProvider provider(base);
            for (const auto& [lemma, p] : ov->second) provider.set_override(lemma, p);
            ts = sentiment::aggregate_sentiment(d.doc, term_set, provider);
        } else {
            ts = sentiment::aggregate_sentiment(d.doc, term_set, base);
        }
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i] != 0) entries.push_back({i, ts[i]});
        nlohmann::json row;
        row["doc"] = d.id;
        row["kind"] = d.is_article ? "article" : "comment";
        row["entries"] = entries;
        out << row.dump() << "\n";
    }
    out.close();

    io::write_stamp(cfg.out(), "sentiment", h, {kTsVectors});
    std::cout << "sentiment: wrote target sentiment vectors for " << prepared.size()
              << " documents\n";
    return 0;
}

struct TsTable {
    std::size_t n_terms = 0;
    std::unordered_map<std::string, sentiment::TargetSentimentVector> by_doc;

    const sentiment::TargetSentimentVector* of(const std::string& id) const {
        auto it = by_doc.find(id);
        return it == by_doc.end() ? nullptr : &it->second;
    }
};

inline TsTable load_ts(const RunConfig& cfg) {
    io::require_artifact(cfg.out(), kTsVectors, "sentiment");
    std::ifstream in(cfg.out() / kTsVectors);
    TsTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("format")) {
            table.n_terms = j.value("terms", 0);
            continue;
        }
        sentiment::TargetSentimentVector ts(table.n_terms, 0);
        for (const auto& e : j["entries"])
            ts[e[0].get<std::size_t>()] = static_cast<std::uint8_t>(e[1].get<int>());
        table.by_doc[j["doc"].get<std::string>()] = std::move(ts);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Stage: conflict

inline int run_conflict(const RunConfig& cfg) {
    fs::create_directories(cfg.out());
    io::require_artifact(cfg.out(), kTsVectors, "sentiment");
    io::require_artifact(cfg.out(), kInteractions, "ingest");
    std::vector<fs::path> inputs = {cfg.out() / kTsVectors, cfg.out() / kInteractions,
                                    cfg.resolve(cfg.comments), cfg.resolve(cfg.articles),
                                    cfg.resolve(cfg.threads)};
    std::uint64_t h = io::hash_files_and_config(
        inputs, cfg.fingerprint({"conflict.tau", "corpus.min_thread_comments"}));
    if (io::stage_up_to_date(cfg.out(), "conflict", h, {kPairConflict, kNewsConflict, kGraph})) {
        std::cout << "conflict: up to date\n";
        return 0;
    }

    auto store = load_corpus(cfg);
    auto ts = load_ts(cfg);
    auto interactions = corpus::all_interactions(store);

    io::CsvWriter pair_csv(cfg.out() / kPairConflict, "conflictforge.pair_conflict.v1",
                           "doc_a,doc_b,cf,common_terms,cf_normalized");
    graph::EngagementGraph g;
    for (const auto& i : interactions) {
        const auto* a = ts.of(i.comment_a_id);
        const auto* b = ts.of(i.comment_b_id);
        if (!a || !b) continue;
        auto cs = conflict::conflict_factor(*a, *b);
        auto norm = conflict::normalized_pair_conflict(*a, *b);
        pair_csv.row({i.comment_a_id, i.comment_b_id, fmt_double(cs.value, 9),
                      std::to_string(cs.common_terms), fmt_double(norm.value, 9)});
        g.add_interaction(i.user_a, i.user_b, i.time_utc, cs.value);
    }

    io::CsvWriter news_csv(cfg.out() / kNewsConflict, "conflictforge.news_conflict.v1",
                           "article_id,source,nc,n_comments");
    std::vector<const corpus::Article*> articles;
    for (const auto& a : store.articles()) articles.push_back(&a);
    std::sort(articles.begin(), articles.end(),
              [](const corpus::Article* a, const corpus::Article* b) { return a->id < b->id; });
    for (const auto* a : articles) {
        const auto* ats = ts.of(a->id);
        if (!ats) continue;
        std::vector<sentiment::TargetSentimentVector> comment_ts;
        for (const auto& t : store.threads()) {
            if (t.article_id != a->id) continue;
            for (const auto& cid : t.comment_ids)
                if (const auto* cts = ts.of(cid)) comment_ts.push_back(*cts);
        }
        if (comment_ts.empty()) continue;
        double nc = conflict::news_conflict_score(*ats, comment_ts);
        news_csv.row({a->id, a->source, fmt_double(nc, 9), std::to_string(comment_ts.size())});
    }

    io::CsvWriter graph_csv(cfg.out() / kGraph, "conflictforge.graph.v1",
                            "user_a,user_b,weight,n_interactions,first_time,last_time,label");
    std::vector<const graph::Edge*> edges;
    for (const auto& e : g.edges()) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [&](const graph::Edge* a, const graph::Edge* b) {
        if (g.users()[a->a] != g.users()[b->a]) return g.users()[a->a] < g.users()[b->a];
        return g.users()[a->b] < g.users()[b->b];
    });
    for (const auto* e : edges) {
        double w = e->weight();
        graph_csv.row({g.users()[e->a], g.users()[e->b], fmt_double(w, 9),
                       std::to_string(e->events.size()), std::to_string(e->first_time()),
                       std::to_string(e->last_time()),
                       w >= cfg.tau ? "conflicting" : "non-conflicting"});
    }

    io::write_stamp(cfg.out(), "conflict", h, {kPairConflict, kNewsConflict, kGraph});
    std::cout << "conflict: scored " << interactions.size() << " interactions, "
              << g.edge_count() << " user pairs\n";
    return 0;
}

// Scored interactions joined back from the persisted artifacts.
inline std::vector<graph::ScoredInteraction> load_scored_interactions(const RunConfig& cfg) {
    io::require_artifact(cfg.out(), kInteractions, "ingest");
    io::require_artifact(cfg.out(), kPairConflict, "conflict");
    auto inter = io::read_csv(cfg.out() / kInteractions);
    auto pairs = io::read_csv(cfg.out() / kPairConflict);
    std::map<std::pair<std::string, std::string>, double> cf_by_comments;
    for (const auto& row : pairs.rows)
        cf_by_comments[{row[0], row[1]}] = std::stod(row[2]);
    std::vector<graph::ScoredInteraction> out;
    for (const auto& row : inter.rows) {
        auto it = cf_by_comments.find({row[2], row[3]});
        if (it == cf_by_comments.end()) continue;
        graph::ScoredInteraction s;
        s.user_a = row[0];
        s.user_b = row[1];
        s.time = std::stoll(row[4]);
        s.cf = it->second;
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.user_a != b.user_a) return a.user_a < b.user_a;
        return a.user_b < b.user_b;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Stage: features

inline features::TextResources load_resources(const RunConfig& cfg,
                                              const std::vector<PreparedDoc>& prepared) {
    features::TextResources res;
    res.polarity = load_polarity(cfg);
    auto load_list = [&](const std::string& rel, const char* what) {
        std::ifstream in(cfg.resolve(rel));
        if (!in) throw UserError(std::string("cannot open ") + what + " list: " +
                                 cfg.resolve(rel).string());
        return text::load_word_list(in);
    };
    res.controversy_words = load_list(cfg.controversy, "controversy");
    res.bias_words = load_list(cfg.bias, "bias");
    {
        std::ifstream in(cfg.resolve(cfg.subjectivity));
        if (!in) throw UserError("cannot open subjectivity lexicon: " +
                                 cfg.resolve(cfg.subjectivity).string());
        res.subjectivity_lexicon = features::load_weighted_lexicon(in);
    }
    {
        std::ifstream in(cfg.resolve(cfg.embeddings));
        if (!in) throw UserError("cannot open embeddings file: " +
                                 cfg.resolve(cfg.embeddings).string());
        res.embeddings = features::EmbeddingTable::load(in);
    }
    res.token_stats.n_docs = static_cast<int>(prepared.size());
    std::set<std::string> vocabulary;
    for (const auto& d : prepared) {
        std::set<std::string> seen;
        for (const auto& s : d.doc.sentences)
            for (const auto& t : s.tokens) {
                seen.insert(t.lower);
                vocabulary.insert(t.lower);
            }
        for (const auto& tok : seen) ++res.token_stats.df[tok];
    }
    res.corpus_unique_tokens = static_cast<int>(vocabulary.size());
    return res;
}

inline int run_features(const RunConfig& cfg) {
    fs::create_directories(cfg.out());
    io::require_artifact(cfg.out(), kTsVectors, "sentiment");
    std::vector<fs::path> inputs = {
        cfg.out() / kTsVectors,        cfg.resolve(cfg.comments),
        cfg.resolve(cfg.articles),     cfg.resolve(cfg.threads),
        cfg.resolve(cfg.polarity),     cfg.resolve(cfg.controversy),
        cfg.resolve(cfg.bias),         cfg.resolve(cfg.subjectivity),
        cfg.resolve(cfg.embeddings)};
    std::uint64_t h = io::hash_files_and_config(
        inputs, cfg.fingerprint({"features.top_sources", "corpus.min_thread_comments"}));
    if (io::stage_up_to_date(cfg.out(), "features", h, {kArticleFeatures, kSourceIndex})) {
        std::cout << "features: up to date\n";
        return 0;
    }

    auto store = load_corpus(cfg);
    auto tagger = make_tagger(cfg);
    auto prepared = prepare_docs(store, tagger, cfg);
    auto res = load_resources(cfg, prepared);
    auto ts = load_ts(cfg);

    std::unordered_map<std::string, const text::TokenizedDoc*> doc_by_id;
    for (const auto& d : prepared) doc_by_id[d.id] = &d.doc;

    std::vector<const corpus::Article*> articles;
    for (const auto& a : store.articles()) articles.push_back(&a);
    std::sort(articles.begin(), articles.end(),
              [](const corpus::Article* a, const corpus::Article* b) { return a->id < b->id; });

    std::size_t flat_len =
        features::ArticleFeatures::flat_length(ts.n_terms, res.embeddings.dim);
    std::string header = "article_id";
    for (std::size_t i = 0; i < flat_len; ++i) header += ",f" + std::to_string(i);
    io::CsvWriter csv(cfg.out() / kArticleFeatures, "conflictforge.article_features.v1", header);
    for (const auto* a : articles) {
        const auto* ats = ts.of(a->id);
        auto it = doc_by_id.find(a->id);
        if (!ats || it == doc_by_id.end()) continue;
        auto feats = features::article_features(*it->second, *ats, res);
        auto flat = feats.flatten();
        std::vector<std::string> row{a->id};
        for (double v : flat) row.push_back(fmt_double(v, 9));
        csv.row(row);
    }

    std::vector<std::string> article_sources;
    for (const auto* a : articles) article_sources.push_back(a->source);
    auto source_index = features::SourceIndex::build(article_sources, cfg.top_sources);
    io::CsvWriter src_csv(cfg.out() / kSourceIndex, "conflictforge.sources.v1", "index,source");
    for (std::size_t i = 0; i < source_index.size(); ++i)
        src_csv.row({std::to_string(i), source_index.sources[i]});

    io::write_stamp(cfg.out(), "features", h, {kArticleFeatures, kSourceIndex});
    std::cout << "features: " << articles.size() << " article vectors of length " << flat_len
              << ", " << source_index.size() << " indexed sources\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Stage: analyze

inline int run_analyze(const RunConfig& cfg, const std::string& task) {
    fs::create_directories(cfg.out());
    if (task == "sources") {
        io::require_artifact(cfg.out(), kNewsConflict, "conflict");
        auto store = load_corpus(cfg);
        auto rows = io::read_csv(cfg.out() / kNewsConflict);
        std::vector<std::pair<const corpus::Article*, double>> scored;
        for (const auto& r : rows.rows) {
            const auto* a = store.article(r[0]);
            if (a) scored.emplace_back(a, std::stod(r[2]));
        }
        auto series = dynamics::source_conflict_series(scored, cfg.snapshot_step);
        io::CsvWriter csv(cfg.out() / "sources.csv", "conflictforge.sources_series.v1",
                          "source,window_start,mean_nc,n_articles");
        for (const auto& r : series.rows)
            csv.row({r.source, std::to_string(r.window_start),
                     r.mean_nc ? fmt_double(*r.mean_nc, 9) : "",
                     std::to_string(r.n_articles)});
        io::CsvWriter sum(cfg.out() / "sources_summary.csv", "conflictforge.sources_summary.v1",
                          "source,max_nc,min_nc,mean_nc,n_articles");
        for (const auto& s : series.summaries)
            sum.row({s.source, fmt_double(s.max_nc, 9), fmt_double(s.min_nc, 9),
                     fmt_double(s.mean_nc, 9), std::to_string(s.n_articles)});
        std::cout << "analyze sources: " << series.rows.size() << " windows, "
                  << series.summaries.size() << " sources\n";
        return 0;
    }
    if (task == "depth") {
        auto store = load_corpus(cfg);
        auto ts = load_ts(cfg);
        auto profile = dynamics::depth_conflict_profile(
            store, [&](const std::string& id) { return ts.of(id); });
        io::CsvWriter csv(cfg.out() / "depth_profile.csv", "conflictforge.depth_profile.v1",
                          "depth,mean,variance,count");
        for (const auto& [d, st] : profile)
            csv.row({std::to_string(d), fmt_double(st.mean, 9), fmt_double(st.variance, 9),
                     std::to_string(st.count)});
        std::cout << "analyze depth: " << profile.size() << " depth buckets\n";
        return 0;
    }
    if (task == "clusters") {
        auto events = load_scored_interactions(cfg);
        if (events.empty()) throw UserError("no scored interactions; run `conflict` first");
        auto store = load_corpus(cfg);
        graph::EngagementGraph g = graph::build_graph(events);
        std::int64_t start = events.front().time;
        std::int64_t span = events.back().time - start;
        int count = cfg.snapshot_count > 0
                        ? cfg.snapshot_count
                        : static_cast<int>(span / cfg.snapshot_step) + 1;
        auto series = graph::snapshots(g, start + cfg.snapshot_step, cfg.snapshot_step, count);
        io::CsvWriter csv(cfg.out() / "clusters.csv", "conflictforge.clusters.v1",
                          "snapshot_t,cluster_id,user,type");
        for (std::size_t k = 0; k < series.graphs.size(); ++k) {
            auto report = dynamics::cluster_report(series.graphs[k], cfg.tau);
            for (const auto& row : report)
                for (int m : row.members)
                    csv.row({std::to_string(series.times[k]), std::to_string(row.cluster_id),
                             series.graphs[k].users()[m], dynamics::cluster_type_name(row.type)});
        }
        std::cout << "analyze clusters: " << series.graphs.size() << " snapshots\n";
        return 0;
    }
    if (task == "states") {
        auto events = load_scored_interactions(cfg);
        graph::EngagementGraph g = graph::build_graph(events);
        std::map<conflict::PairState, std::size_t> histogram = {
            {conflict::PairState::NoEngagement, 0},
            {conflict::PairState::NonConflicting, 0},
            {conflict::PairState::Conflicting, 0},
            {conflict::PairState::Mixed, 0},
        };
        for (const auto& e : g.edges()) {
            std::vector<double> history;
            for (const auto& ev : e.events) history.push_back(ev.cf);
            ++histogram[conflict::pair_state(history, cfg.tau)];
        }
        io::CsvWriter csv(cfg.out() / "states.csv", "conflictforge.states.v1", "state,n_pairs");
        for (const auto& [state, n] : histogram)
            csv.row({std::to_string(static_cast<int>(state)), std::to_string(n)});
        std::cout << "analyze states: " << g.edge_count() << " pairs\n";
        return 0;
    }
    throw UserError("unknown analyze task: " + task +
                    " (expected sources, depth, clusters or states)");
}

// ---------------------------------------------------------------------------
// Stage: eval (metrics over externally supplied files)

inline void append_metrics(const RunConfig& cfg,
                           const std::vector<nlohmann::json>& records) {
    fs::path path = cfg.out() / "metrics.json";
    nlohmann::json all = nlohmann::json::array();
    if (fs::exists(path)) {
        try {
            all = io::read_json(path);
        } catch (...) {
            all = nlohmann::json::array();
        }
    }
    for (const auto& r : records) all.push_back(r);
    io::write_json(path, all);
}

inline nlohmann::json metric_record(const std::string& task, const std::string& metric,
                                    double value, std::size_t n) {
    nlohmann::json j;
    j["task"] = task;
    j["metric"] = metric;
    j["value"] = value;
    j["n"] = n;
    return j;
}

inline int run_eval(const RunConfig& cfg, const std::string& task, const std::string& file) {
    fs::create_directories(cfg.out());
    if (file.empty()) throw UserError("eval: --input file required");
    std::vector<nlohmann::json> records;
    if (task == "regress" || task == "classify") {
        auto csv = io::read_csv(file);
        std::vector<double> truth, pred;
        for (const auto& r : csv.rows) {
            if (r.size() < 2) continue;
            truth.push_back(std::stod(r[0]));
            pred.push_back(std::stod(r[1]));
        }
        if (truth.empty()) throw UserError("eval: no usable rows in " + file);
        if (task == "regress") {
            auto m = eval::regression_metrics(truth, pred);
            records.push_back(metric_record("eval-regress", "mse", m.mse, truth.size()));
            records.push_back(metric_record("eval-regress", "rmse", m.rmse, truth.size()));
            records.push_back(metric_record("eval-regress", "smape", m.smape, truth.size()));
        } else {
            std::vector<int> labels(truth.size());
            for (std::size_t i = 0; i < truth.size(); ++i) labels[i] = truth[i] >= 0.5 ? 1 : 0;
            auto m = eval::classification_metrics(labels, pred);
            if (m.auc)
                records.push_back(metric_record("eval-classify", "auc", *m.auc, labels.size()));
            records.push_back(
                metric_record("eval-classify", "accuracy", m.accuracy, labels.size()));
        }
    } else if (task == "rank") {
        std::ifstream in(file);
        if (!in) throw UserError("eval: cannot open " + file);
        std::vector<eval::RankedList> lists;
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("relevance")) continue;
            eval::RankedList list;
            for (const auto& r : j["relevance"]) list.relevance.push_back(r.get<int>() ? 1 : 0);
            lists.push_back(std::move(list));
        }
        auto m = eval::ranking_metrics(lists);
        records.push_back(metric_record("eval-rank", "map", m.map, m.lists_used));
        records.push_back(metric_record("eval-rank", "mrr", m.mrr, m.lists_used));
        if (m.lists_skipped > 0)
            std::cerr << "eval: skipped " << m.lists_skipped << " lists without relevant items\n";
    } else if (task == "kappa") {
        auto csv = io::read_csv(file);
        std::vector<std::vector<int>> counts;
        for (const auto& r : csv.rows) {
            std::vector<int> row;
            for (const auto& cell : r) row.push_back(std::stoi(cell));
            counts.push_back(std::move(row));
        }
        double kappa = eval::fleiss_kappa(counts);
        records.push_back(metric_record("eval-kappa", "fleiss_kappa", kappa, counts.size()));
    } else {
        throw UserError("unknown eval task: " + task +
                        " (expected regress, classify, rank or kappa)");
    }
    append_metrics(cfg, records);
    for (const auto& r : records)
        std::cout << r["task"].get<std::string>() << " " << r["metric"].get<std::string>()
                  << " = " << fmt_double(r["value"].get<double>(), 6) << " (n="
                  << r["n"].get<std::size_t>() << ")\n";
    return 0;
}

}  // namespace conflictforge::pipeline
