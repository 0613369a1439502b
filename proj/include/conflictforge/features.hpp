#pragma once
// Feature extraction: the eight article feature groups, per-user node
// features for the graph model, and the seven user-pair feature groups.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conflictforge/common.hpp"
#include "conflictforge/conflict.hpp"
#include "conflictforge/graph.hpp"
#include "conflictforge/sentiment.hpp"
#include "conflictforge/terms.hpp"

namespace conflictforge::features {

using sentiment::PolarityLexicon;
using sentiment::TargetSentimentVector;
using terms::DocFreq;
using terms::TermSet;
using text::TokenizedDoc;

// --------------------------------------------------------------------------
// Lexical resources

struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    // rows: word v1 ... vd, space separated, constant d
    static EmbeddingTable load(std::istream& in) {
        EmbeddingTable table;
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            auto parts = split(line, ' ');
            if (parts.size() < 2) throw UserError("embeddings: malformed row: " + line);
            int d = static_cast<int>(parts.size()) - 1;
            if (table.dim == 0) table.dim = d;
            else if (d != table.dim)
                throw UserError("embeddings: dimension mismatch at word " + parts[0]);
            std::vector<double> v(d);
            for (int i = 0; i < d; ++i) v[i] = std::stod(parts[i + 1]);
            table.vectors[to_lower(parts[0])] = std::move(v);
        }
        return table;
    }

    const std::vector<double>* get(const std::string& lower) const {
        auto it = vectors.find(lower);
        return it == vectors.end() ? nullptr : &it->second;
    }
};

inline std::unordered_map<std::string, double> load_weighted_lexicon(std::istream& in) {
    std::unordered_map<std::string, double> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto parts = split(line, '\t');
        if (parts.size() < 2) continue;
        out[to_lower(trim(parts[0]))] = std::stod(trim(parts[1]));
    }
    return out;
}

// --------------------------------------------------------------------------
// Scalar text features

// (positives, negatives, rest). A token in both lists counts as positive.
inline std::array<int, 3> polarity_counts(const std::vector<std::string>& tokens_lower,
                                          const PolarityLexicon& lexicon) {
    int pos = 0, neg = 0;
    for (const auto& t : tokens_lower) {
        if (lexicon.is_positive(t)) ++pos;
        else if (lexicon.is_negative(t)) ++neg;
    }
    return {pos, neg, static_cast<int>(tokens_lower.size()) - pos - neg};
}

// (1/|T|) * sum over present tokens of tf * (ln|T| - ln tf), |T| being the
// corpus-wide unique token count.
inline double cumulative_entropy(const std::unordered_map<std::string, int>& doc_tf,
                                 int corpus_unique_tokens) {
    if (corpus_unique_tokens < 1) return 0.0;
    double sum = 0.0;
    const double log_t = std::log(static_cast<double>(corpus_unique_tokens));
    for (const auto& [token, tf] : doc_tf) {
        if (tf <= 0) continue;
        sum += static_cast<double>(tf) * (log_t - std::log(static_cast<double>(tf)));
    }
    return sum / static_cast<double>(corpus_unique_tokens);
}

inline double lexicon_fraction(const std::vector<std::string>& tokens_lower,
                               const std::unordered_set<std::string>& word_list) {
    if (word_list.empty()) throw std::invalid_argument("lexicon_fraction: empty word list");
    if (tokens_lower.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& t : tokens_lower) hits += word_list.count(t);
    return static_cast<double>(hits) / static_cast<double>(tokens_lower.size());
}

// tf-idf weighted average of in-vocabulary embeddings; zero vector when none
// are in vocabulary, uniform weights when every weight vanishes.
inline std::vector<double> latent_semantics(const std::vector<std::string>& tokens_lower,
                                            const EmbeddingTable& table, const DocFreq& stats) {
    std::vector<double> acc(table.dim, 0.0);
    std::unordered_map<std::string, int> tf;
    for (const auto& t : tokens_lower) ++tf[t];
    double weight_sum = 0.0;
    std::size_t in_vocab = 0;
    for (const auto& [token, count] : tf) {
        const std::vector<double>* v = table.get(token);
        if (!v) continue;
        ++in_vocab;
        int df = stats.of(token);
        double w = df > 0 ? count * std::log(static_cast<double>(stats.n_docs) / df) : 0.0;
        weight_sum += w;
        for (int i = 0; i < table.dim; ++i) acc[i] += w * (*v)[i];
    }
    if (in_vocab == 0) return acc;
    if (weight_sum <= 0.0) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const auto& [token, count] : tf) {
            const std::vector<double>* v = table.get(token);
            if (!v) continue;
            for (int i = 0; i < table.dim; ++i) acc[i] += (*v)[i];
        }
        for (double& a : acc) a /= static_cast<double>(in_vocab);
        return acc;
    }
    for (double& a : acc) a /= weight_sum;
    return acc;
}

struct Readability {
    double lix = 0.0;
    double fog = 0.0;
};

inline int vowel_groups(const std::string& lower) {
    auto is_vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    };
    int groups = 0;
    bool in_group = false;
    for (char c : lower) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    return groups;
}

// LIX: words/sentences + 100 * fraction of words longer than six characters.
// Fog: 0.4 * (average sentence length + percentage of words with three or
// more vowel groups).
inline Readability readability(const TokenizedDoc& doc) {
    std::size_t words = 0, long_words = 0, complex_words = 0;
    std::size_t sentences = 0;
    for (const auto& s : doc.sentences) {
        if (s.tokens.empty()) continue;
        ++sentences;
        for (const auto& t : s.tokens) {
            ++words;
            if (t.text.size() > 6) ++long_words;
            if (vowel_groups(t.lower) >= 3) ++complex_words;
        }
    }
    if (words == 0 || sentences == 0) throw std::invalid_argument("readability: empty text");
    Readability r;
    const double w = static_cast<double>(words);
    r.lix = w / static_cast<double>(sentences) + 100.0 * static_cast<double>(long_words) / w;
    double asl = w / static_cast<double>(sentences);
    double pcw = 100.0 * static_cast<double>(complex_words) / w;
    r.fog = 0.4 * (asl + pcw);
    return r;
}

// Mean lexicon weight over in-lexicon tokens; 0 when none match.
inline double subjectivity(const std::vector<std::string>& tokens_lower,
                           const std::unordered_map<std::string, double>& lexicon) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (const auto& t : tokens_lower) {
        auto it = lexicon.find(t);
        if (it == lexicon.end()) continue;
        sum += it->second;
        ++hits;
    }
    return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

// --------------------------------------------------------------------------
// Article features

struct TextResources {
    PolarityLexicon polarity;
    std::unordered_set<std::string> controversy_words;
    std::unordered_set<std::string> bias_words;
    std::unordered_map<std::string, double> subjectivity_lexicon;
    EmbeddingTable embeddings;
    DocFreq token_stats;        // lowercased unigram df over the corpus
    int corpus_unique_tokens = 0;
};

struct ArticleFeatures {
    TargetSentimentVector td_vector;
    int pos_count = 0, neg_count = 0, neu_count = 0;
    double entropy = 0.0;
    double controversy_frac = 0.0, bias_frac = 0.0;
    std::vector<double> latent;
    double lix = 0.0, fog = 0.0;
    double subjectivity = 0.0;

    // fixed layout: td | counts | entropy | fractions | latent | lix fog | subj
    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(td_vector.size() + latent.size() + 9);
        for (auto v : td_vector) out.push_back(static_cast<double>(v));
        out.push_back(pos_count);
        out.push_back(neg_count);
        out.push_back(neu_count);
        out.push_back(entropy);
        out.push_back(controversy_frac);
        out.push_back(bias_frac);
        out.insert(out.end(), latent.begin(), latent.end());
        out.push_back(lix);
        out.push_back(fog);
        out.push_back(subjectivity);
        return out;
    }

    static std::size_t flat_length(std::size_t n_terms, int latent_dim) {
        return n_terms + static_cast<std::size_t>(latent_dim) + 9;
    }
};

inline std::vector<std::string> lower_tokens(const TokenizedDoc& doc) {
    std::vector<std::string> out;
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens) out.push_back(t.lower);
    return out;
}

inline std::unordered_map<std::string, int> token_counts(const std::vector<std::string>& tokens) {
    std::unordered_map<std::string, int> tf;
    for (const auto& t : tokens) ++tf[t];
    return tf;
}

// The document must be tagged and pronoun-resolved; its target sentiment
// vector is supplied by the caller.
inline ArticleFeatures article_features(const TokenizedDoc& doc, TargetSentimentVector td,
                                        const TextResources& res) {
    ArticleFeatures f;
    f.td_vector = std::move(td);
    auto tokens = lower_tokens(doc);
    auto counts = polarity_counts(tokens, res.polarity);
    f.pos_count = counts[0];
    f.neg_count = counts[1];
    f.neu_count = counts[2];
    f.entropy = cumulative_entropy(token_counts(tokens), res.corpus_unique_tokens);
    f.controversy_frac = lexicon_fraction(tokens, res.controversy_words);
    f.bias_frac = lexicon_fraction(tokens, res.bias_words);
    f.latent = latent_semantics(tokens, res.embeddings, res.token_stats);
    Readability r = readability(doc);
    f.lix = r.lix;
    f.fog = r.fog;
    f.subjectivity = subjectivity(tokens, res.subjectivity_lexicon);
    return f;
}

// --------------------------------------------------------------------------
// User node features: mean article-style feature vector over the user's past
// comments plus a binary engaged-source vector.

struct SourceIndex {
    std::vector<std::string> sources;  // most frequent first, capped at K
    std::unordered_map<std::string, int> index;

    static SourceIndex build(const std::vector<std::string>& all_sources, std::size_t k) {
        std::unordered_map<std::string, std::size_t> counts;
        for (const auto& s : all_sources) ++counts[s];
        std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        SourceIndex out;
        for (const auto& [s, n] : ranked) {
            if (out.sources.size() >= k) break;
            out.index[s] = static_cast<int>(out.sources.size());
            out.sources.push_back(s);
        }
        return out;
    }

    int of(const std::string& source) const {
        auto it = index.find(source);
        return it == index.end() ? -1 : it->second;
    }
    std::size_t size() const { return sources.size(); }
};

inline std::vector<double> user_node_features(
    const std::vector<std::vector<double>>& past_comment_features,
    const std::set<std::string>& engaged_sources, const SourceIndex& source_index,
    std::size_t flat_length) {
    std::vector<double> out(flat_length + source_index.size(), 0.0);
    if (!past_comment_features.empty()) {
        for (const auto& fv : past_comment_features)
            for (std::size_t i = 0; i < flat_length; ++i) out[i] += fv[i];
        for (std::size_t i = 0; i < flat_length; ++i)
            out[i] /= static_cast<double>(past_comment_features.size());
    }
    for (const auto& s : engaged_sources) {
        int k = source_index.of(s);
        if (k >= 0) out[flat_length + static_cast<std::size_t>(k)] = 1.0;
    }
    return out;
}

// --------------------------------------------------------------------------
// Pair features

// Mean sentiment toward term k over the comments where it occurs; 0 when the
// user never used the term.
inline double user_target_sentiment(const std::vector<const TargetSentimentVector*>& history,
                                    std::size_t k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto* ts : history) {
        if ((*ts)[k] == 0) continue;
        sum += static_cast<double>((*ts)[k]);
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline std::vector<double> user_sentiment_profile(
    const std::vector<const TargetSentimentVector*>& history, std::size_t n_terms) {
    std::vector<double> out(n_terms, 0.0);
    for (std::size_t k = 0; k < n_terms; ++k) out[k] = user_target_sentiment(history, k);
    return out;
}

// Everything known about one user strictly before the prediction instant.
struct UserHistory {
    std::vector<const TargetSentimentVector*> comment_ts;
    std::unordered_map<std::string, int> grams;            // uni+bigram counts
    std::unordered_set<std::string> discussions;           // thread ids
    std::map<std::string, std::set<std::string>> articles_by_source;
};

// Adjacent lowercased token pairs after stopword removal.
inline void accumulate_grams(const TokenizedDoc& doc,
                             const std::unordered_set<std::string>& stopwords,
                             std::unordered_map<std::string, int>& grams) {
    std::vector<std::string> kept;
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens)
            if (!stopwords.count(t.lower)) kept.push_back(t.lower);
    for (const auto& t : kept) ++grams[t];
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) ++grams[kept[i] + " " + kept[i + 1]];
}

struct PairFeatures {
    double common_token_weight = 0.0;
    std::vector<double> conflict_vector;  // |T|, entries in [0, 3]
    std::vector<double> common_sources;   // K counts
    double common_discussions = 0.0;
    double mutual_engagements = 0.0;
    double previous_conflict = 0.0;
    std::array<double, 4> neighbor_counts{};  // conflicting/non-conflicting per user

    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(1 + conflict_vector.size() + common_sources.size() + 7);
        out.push_back(common_token_weight);
        out.insert(out.end(), conflict_vector.begin(), conflict_vector.end());
        out.insert(out.end(), common_sources.begin(), common_sources.end());
        out.push_back(common_discussions);
        out.push_back(mutual_engagements);
        out.push_back(previous_conflict);
        for (double v : neighbor_counts) out.push_back(v);
        return out;
    }
};

enum class FeatureMask { All, Text, Net };

// Text keeps groups 1-2 (token weight + conflict vector), Net keeps groups
// 3-5 (sources, discussions, engagements). All keeps everything.
inline std::vector<double> apply_mask(const std::vector<double>& flat, std::size_t n_terms,
                                      std::size_t n_sources, FeatureMask mask) {
    if (mask == FeatureMask::All) return flat;
    const std::size_t text_len = 1 + n_terms;
    if (mask == FeatureMask::Text)
        return std::vector<double>(flat.begin(), flat.begin() + static_cast<long>(text_len));
    // net: sources vector + common discussions + mutual engagements
    std::vector<double> out(flat.begin() + static_cast<long>(text_len),
                            flat.begin() + static_cast<long>(text_len + n_sources + 2));
    return out;
}

// The graph must be a snapshot containing only events up to the prediction
// instant; conflicting engagements are those with cf >= tau.
inline PairFeatures pair_features(const UserHistory& hist_i, const UserHistory& hist_j,
                                  const graph::EngagementGraph& g, int node_i, int node_j,
                                  const TermSet& term_set, const SourceIndex& source_index,
                                  const DocFreq& gram_stats, double tau) {
    PairFeatures f;

    // 1. summed tf-idf of shared uni/bigrams (combined tf times idf)
    for (const auto& [gram, tf_i] : hist_i.grams) {
        auto it = hist_j.grams.find(gram);
        if (it == hist_j.grams.end()) continue;
        int df = gram_stats.of(gram);
        if (df <= 0) continue;
        double idf = std::log(static_cast<double>(gram_stats.n_docs) / df);
        f.common_token_weight += static_cast<double>(tf_i + it->second) * idf;
    }

    // 2. element-wise |TS_ui - TS_uj|
    auto prof_i = user_sentiment_profile(hist_i.comment_ts, term_set.size());
    auto prof_j = user_sentiment_profile(hist_j.comment_ts, term_set.size());
    f.conflict_vector.resize(term_set.size());
    for (std::size_t k = 0; k < term_set.size(); ++k)
        f.conflict_vector[k] = std::abs(prof_i[k] - prof_j[k]);

    // 3. common news sources (shared articles per source)
    f.common_sources.assign(source_index.size(), 0.0);
    for (const auto& [source, arts_i] : hist_i.articles_by_source) {
        int k = source_index.of(source);
        if (k < 0) continue;
        auto it = hist_j.articles_by_source.find(source);
        if (it == hist_j.articles_by_source.end()) continue;
        std::size_t shared = 0;
        for (const auto& a : arts_i) shared += it->second.count(a);
        f.common_sources[static_cast<std::size_t>(k)] = static_cast<double>(shared);
    }

    // 4. common discussions
    for (const auto& d : hist_i.discussions)
        if (hist_j.discussions.count(d)) f.common_discussions += 1.0;

    // 5-6. mutual engagement count and mean prior conflict
    if (node_i >= 0 && node_j >= 0) {
        const graph::Edge* e = g.edge_between(node_i, node_j);
        if (e) {
            f.mutual_engagements = static_cast<double>(e->events.size());
            f.previous_conflict = e->weight();
        }
    }

    // 7. conflicting / non-conflicting engagement counts per user
    auto count_neighbors = [&](int node, int slot) {
        if (node < 0) return;
        for (auto [v, ei] : g.neighbors(node)) {
            for (const auto& ev : g.edges()[ei].events) {
                if (ev.cf >= tau) f.neighbor_counts[slot] += 1.0;
                else f.neighbor_counts[slot + 1] += 1.0;
            }
        }
    };
    count_neighbors(node_i, 0);
    count_neighbors(node_j, 2);
    return f;
}

}  // namespace conflictforge::features
