#pragma once
// Corpus-wide keyword set: pronoun substitution, noun candidates, tf-idf
// ranking. Named entities are always kept; the rest is cut at the top 60%.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conflictforge/common.hpp"
#include "conflictforge/text.hpp"

namespace conflictforge::terms {

using text::Entity;
using text::Pos;
using text::Sentence;
using text::Tagger;
using text::Token;
using text::TokenizedDoc;

// Document frequencies for a token universe; shared by keyword ranking and
// downstream feature weighting.
struct DocFreq {
    int n_docs = 0;
    std::unordered_map<std::string, int> df;

    int of(const std::string& token) const {
        auto it = df.find(token);
        return it == df.end() ? 0 : it->second;
    }
};

// tf * ln(N/df). Zero when the term is absent from the document; a term that
// was never observed (df == 0) is an error.
inline double tfidf(const std::string& term, const std::unordered_map<std::string, int>& doc_tf,
                    const DocFreq& stats) {
    int df = stats.of(term);
    if (df == 0) throw std::invalid_argument("tfidf: term never observed: " + term);
    auto it = doc_tf.find(term);
    if (it == doc_tf.end() || it->second == 0) return 0.0;
    return static_cast<double>(it->second) * std::log(static_cast<double>(stats.n_docs) / df);
}

struct TermSet {
    std::vector<std::string> terms;       // lexicographic, index = vector position
    std::vector<char> is_named_entity;    // parallel to terms
    std::vector<int> doc_freq;            // parallel to terms
    int corpus_doc_count = 0;

    std::unordered_map<std::string, int> index;

    std::size_t size() const { return terms.size(); }

    int index_of(const std::string& term) const {
        auto it = index.find(term);
        return it == index.end() ? -1 : it->second;
    }

    void rebuild_index() {
        index.clear();
        for (std::size_t i = 0; i < terms.size(); ++i) index[terms[i]] = static_cast<int>(i);
    }
};

// Replaces each standalone "he"/"she" with the surface form of the most
// recent preceding Person entity span. Tokens with no antecedent are left
// alone. The document must not be tagged yet; tagging happens here.
inline TokenizedDoc resolve_pronouns(TokenizedDoc doc, const Tagger& tagger) {
    tagger.tag(doc);
    std::vector<Token> antecedent;  // last Person span seen so far
    for (auto& sentence : doc.sentences) {
        std::vector<Token> out;
        std::size_t i = 0;
        auto& toks = sentence.tokens;
        while (i < toks.size()) {
            if (toks[i].ent == Entity::Person) {
                std::size_t j = i;
                while (j < toks.size() && toks[j].ent == Entity::Person) ++j;
                antecedent.assign(toks.begin() + i, toks.begin() + j);
                for (std::size_t k = i; k < j; ++k) out.push_back(toks[k]);
                i = j;
                continue;
            }
            if ((toks[i].lower == "he" || toks[i].lower == "she") && !antecedent.empty()) {
                for (const auto& t : antecedent) out.push_back(t);
            } else {
                out.push_back(toks[i]);
            }
            ++i;
        }
        sentence.tokens = std::move(out);
    }
    tagger.tag(doc);  // retag substituted tokens
    return doc;
}

// Lemmatized noun multiset of a tagged, pronoun-resolved document.
inline std::unordered_map<std::string, int> candidate_terms(
    const TokenizedDoc& doc, const std::unordered_set<std::string>& stopwords) {
    std::unordered_map<std::string, int> counts;
    for (const auto& s : doc.sentences) {
        for (const auto& t : s.tokens) {
            if (!text::is_noun(t.pos)) continue;
            if (stopwords.count(t.lower) || stopwords.count(t.lemma)) continue;
            ++counts[t.lemma];
        }
    }
    return counts;
}

// Entity lemmas of a tagged document.
inline std::unordered_set<std::string> entity_lemmas(const TokenizedDoc& doc) {
    std::unordered_set<std::string> out;
    for (const auto& s : doc.sentences)
        for (const auto& t : s.tokens)
            if (t.ent != Entity::None) out.insert(t.lemma);
    return out;
}

// Builds the keyword set from tagged, pronoun-resolved documents (comments
// and articles pooled). All named entities are kept; the remaining
// candidates are ranked by max-over-documents tf-idf and cut at
// ceil(0.6 * n), ties broken lexicographically. The final term list is
// sorted lexicographically so construction is permutation-invariant.
inline TermSet build_term_set(const std::vector<TokenizedDoc>& docs,
                              const std::unordered_set<std::string>& stopwords) {
    if (docs.empty()) throw std::invalid_argument("build_term_set: empty corpus");

    DocFreq stats;
    stats.n_docs = static_cast<int>(docs.size());
    std::vector<std::unordered_map<std::string, int>> per_doc;
    per_doc.reserve(docs.size());
    std::unordered_set<std::string> entities;
    for (const auto& doc : docs) {
        auto counts = candidate_terms(doc, stopwords);
        for (const auto& [term, n] : counts) ++stats.df[term];
        for (const auto& lemma : entity_lemmas(doc))
            if (counts.count(lemma)) entities.insert(lemma);
        per_doc.push_back(std::move(counts));
    }

    std::unordered_map<std::string, double> best_score;
    for (const auto& counts : per_doc) {
        for (const auto& [term, n] : counts) {
            if (entities.count(term)) continue;
            double score = tfidf(term, counts, stats);
            auto [it, inserted] = best_score.emplace(term, score);
            if (!inserted && score > it->second) it->second = score;
        }
    }

    std::vector<std::pair<std::string, double>> ranked(best_score.begin(), best_score.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::size_t keep = static_cast<std::size_t>(
        std::ceil(0.6 * static_cast<double>(ranked.size())));

    std::vector<std::string> final_terms(entities.begin(), entities.end());
    for (std::size_t i = 0; i < keep && i < ranked.size(); ++i)
        final_terms.push_back(ranked[i].first);
    std::sort(final_terms.begin(), final_terms.end());

    TermSet ts;
    ts.corpus_doc_count = stats.n_docs;
    ts.terms = std::move(final_terms);
    ts.is_named_entity.resize(ts.terms.size());
    ts.doc_freq.resize(ts.terms.size());
    for (std::size_t i = 0; i < ts.terms.size(); ++i) {
        ts.is_named_entity[i] = entities.count(ts.terms[i]) ? 1 : 0;
        ts.doc_freq[i] = stats.of(ts.terms[i]);
    }
    ts.rebuild_index();
    return ts;
}

}  // namespace conflictforge::terms
