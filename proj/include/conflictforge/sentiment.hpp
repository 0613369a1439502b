#pragma once
// Target-dependent sentiment: per-occurrence three-class probabilities and
// their aggregation into a per-document target sentiment vector.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conflictforge/common.hpp"
#include "conflictforge/terms.hpp"
#include "conflictforge/text.hpp"

namespace conflictforge::sentiment {

using terms::TermSet;
using text::Sentence;
using text::Token;
using text::TokenizedDoc;

struct TdProbability {
    double p_negative = 0.0;
    double p_neutral = 1.0;
    double p_positive = 0.0;
};

// Entry coding: 0 absent, 1 negative, 2 neutral, 3 positive.
using TargetSentimentVector = std::vector<std::uint8_t>;

constexpr std::uint8_t kAbsent = 0;
constexpr std::uint8_t kNegative = 1;
constexpr std::uint8_t kNeutral = 2;
constexpr std::uint8_t kPositive = 3;

// Maps (sentence, target occurrence) to a probability triple. Must be
// deterministic.
class TdProvider {
public:
    virtual ~TdProvider() = default;
    virtual TdProbability score(const Sentence& sentence, std::size_t target_index) const = 0;
};

struct PolarityLexicon {
    std::unordered_set<std::string> positive;
    std::unordered_set<std::string> negative;

    // TSV rows: token<TAB>polarity, polarity in {pos, neg}.
    static PolarityLexicon from_tsv(std::istream& in) {
        PolarityLexicon lex;
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            auto parts = split(line, '\t');
            if (parts.size() < 2) continue;
            std::string token = to_lower(trim(parts[0]));
            std::string pol = to_lower(trim(parts[1]));
            if (pol == "pos") lex.positive.insert(token);
            else if (pol == "neg") lex.negative.insert(token);
        }
        return lex;
    }

    bool is_positive(const std::string& lower) const { return positive.count(lower) > 0; }
    bool is_negative(const std::string& lower) const { return negative.count(lower) > 0; }
};

inline bool is_negation(const std::string& lower) {
    return lower == "not" || lower == "never" || lower == "no" ||
           (lower.size() > 3 && text::ends_with(lower, "n't"));
}

// Window-based lexicon scorer: counts polar words within `window` tokens of
// the target; a negation within two tokens before a hit flips it. Counts are
// additively smoothed, and a unit of neutral evidence is added when no polar
// word is in range.
inline TdProbability lexicon_td_sentiment(std::span<const Token> sentence_tokens,
                                          std::size_t target_index,
                                          const PolarityLexicon& lexicon, int window = 5) {
    if (sentence_tokens.empty())
        throw std::invalid_argument("lexicon_td_sentiment: empty sentence");
    if (target_index >= sentence_tokens.size())
        throw std::invalid_argument("lexicon_td_sentiment: target index out of range");
    if (window < 1) throw std::invalid_argument("lexicon_td_sentiment: window must be >= 1");

    int pos_hits = 0, neg_hits = 0;
    const std::size_t n = sentence_tokens.size();
    std::size_t lo = target_index >= static_cast<std::size_t>(window)
                         ? target_index - static_cast<std::size_t>(window) : 0;
    std::size_t hi = std::min(n - 1, target_index + static_cast<std::size_t>(window));
    for (std::size_t i = lo; i <= hi; ++i) {
        if (i == target_index) continue;
        const std::string& w = sentence_tokens[i].lower;
        int polarity = 0;
        if (lexicon.is_positive(w)) polarity = 1;
        else if (lexicon.is_negative(w)) polarity = -1;
        if (polarity == 0) continue;
        for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
            if (is_negation(sentence_tokens[i - back].lower)) {
                polarity = -polarity;
                break;
            }
        }
        if (polarity > 0) ++pos_hits; else ++neg_hits;
    }

    const double alpha = 0.1;
    double neutral_evidence = (pos_hits + neg_hits == 0) ? 1.0 : 0.0;
    double z = pos_hits + neg_hits + neutral_evidence + 3 * alpha;
    return TdProbability{(neg_hits + alpha) / z, (neutral_evidence + alpha) / z,
                         (pos_hits + alpha) / z};
}

class LexiconTdProvider : public TdProvider {
public:
    explicit LexiconTdProvider(PolarityLexicon lexicon, int window = 5)
        : lexicon_(std::move(lexicon)), window_(window) {}

    TdProbability score(const Sentence& sentence, std::size_t target_index) const override {
        return lexicon_td_sentiment(sentence.tokens, target_index, lexicon_, window_);
    }

private:
    PolarityLexicon lexicon_;
    int window_;
};

// Argmax with ties broken toward neutral, then negative.
inline std::uint8_t argmax_label(double p_neg, double p_neu, double p_pos) {
    double m = std::max(p_neg, std::max(p_neu, p_pos));
    if (p_neu >= m) return kNeutral;
    if (p_neg >= m) return kNegative;
    return kPositive;
}

// Aggregates occurrence probabilities per term (mean, then argmax) into the
// document's target sentiment vector. Occurrences are tokens whose lemma
// matches a term of the set. Terms without occurrences stay 0.
inline TargetSentimentVector aggregate_sentiment(const TokenizedDoc& doc, const TermSet& term_set,
                                                 const TdProvider& provider) {
    std::vector<double> sum_neg(term_set.size(), 0.0), sum_neu(term_set.size(), 0.0),
        sum_pos(term_set.size(), 0.0);
    std::vector<int> occurrences(term_set.size(), 0);

    for (const auto& sentence : doc.sentences) {
        for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
            int idx = term_set.index_of(sentence.tokens[i].lemma);
            if (idx < 0) continue;
            TdProbability p = provider.score(sentence, i);
            sum_neg[idx] += p.p_negative;
            sum_neu[idx] += p.p_neutral;
            sum_pos[idx] += p.p_positive;
            ++occurrences[idx];
        }
    }

    TargetSentimentVector ts(term_set.size(), kAbsent);
    for (std::size_t k = 0; k < term_set.size(); ++k) {
        if (occurrences[k] == 0) continue;
        double n = occurrences[k];
        ts[k] = argmax_label(sum_neg[k] / n, sum_neu[k] / n, sum_pos[k] / n);
    }
    return ts;
}

// Per-(document, term) probability overrides, e.g. scores produced by an
// external target-dependent classifier.
class OverridingProvider : public TdProvider {
public:
    OverridingProvider(const TdProvider& base) : base_(base) {}

    void set_override(const std::string& lemma, TdProbability p) { overrides_[lemma] = p; }

    TdProbability score(const Sentence& sentence, std::size_t target_index) const override {
        auto it = overrides_.find(sentence.tokens[target_index].lemma);
        if (it != overrides_.end()) return it->second;
        return base_.score(sentence, target_index);
    }

private:
    const TdProvider& base_;
    std::unordered_map<std::string, TdProbability> overrides_;
};

}  // namespace conflictforge::sentiment
