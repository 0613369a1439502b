#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "conflictforge/rng.hpp"
#include "conflictforge/sentiment.hpp"

using namespace conflictforge;
using sentiment::PolarityLexicon;
using sentiment::TdProbability;
using text::RuleTagger;

namespace {

PolarityLexicon small_lexicon() {
    PolarityLexicon lex;
    lex.positive = {"good", "great", "praise"};
    lex.negative = {"bad", "awful", "blame"};
    return lex;
}

text::Sentence sentence_of(const std::string& s) {
    auto doc = text::tokenize(s);
    RuleTagger tagger;
    tagger.tag(doc);
    return doc.sentences.at(0);
}

terms::TermSet term_set_of(std::vector<std::string> words) {
    terms::TermSet ts;
    std::sort(words.begin(), words.end());
    ts.terms = std::move(words);
    ts.is_named_entity.assign(ts.terms.size(), 0);
    ts.doc_freq.assign(ts.terms.size(), 1);
    ts.corpus_doc_count = 1;
    ts.rebuild_index();
    return ts;
}

// provider returning a fixed probability triple for every occurrence
struct ConstProvider : sentiment::TdProvider {
    TdProbability p;
    explicit ConstProvider(TdProbability prob) : p(prob) {}
    TdProbability score(const text::Sentence&, std::size_t) const override { return p; }
};

// provider replaying a scripted sequence of triples in occurrence order
struct ScriptProvider : sentiment::TdProvider {
    mutable std::vector<TdProbability> script;
    explicit ScriptProvider(std::vector<TdProbability> s) : script(std::move(s)) {}
    TdProbability score(const text::Sentence&, std::size_t) const override {
        TdProbability p = script.front();
        script.erase(script.begin());
        return p;
    }
};

}  // namespace

TEST_CASE("no polar word in the window means neutral") {
    auto s = sentence_of("the weather report mentions the city");
    auto p = sentiment::lexicon_td_sentiment(s.tokens, 2, small_lexicon());
    CHECK(p.p_neutral > p.p_negative);
    CHECK(p.p_neutral > p.p_positive);
    CHECK(p.p_negative + p.p_neutral + p.p_positive == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("one positive hit without negation is positive") {
    auto s = sentence_of("a good policy");
    auto p = sentiment::lexicon_td_sentiment(s.tokens, 2, small_lexicon());
    CHECK(p.p_positive > p.p_neutral);
    CHECK(p.p_positive > p.p_negative);
}

TEST_CASE("negation within two tokens flips polarity") {
    auto s = sentence_of("not good policy");
    auto p = sentiment::lexicon_td_sentiment(s.tokens, 2, small_lexicon());
    CHECK(p.p_negative > p.p_positive);
    CHECK(p.p_negative > p.p_neutral);
}

TEST_CASE("empty sentence is an error") {
    std::vector<text::Token> none;
    CHECK_THROWS_AS(sentiment::lexicon_td_sentiment(none, 0, small_lexicon()),
                    std::invalid_argument);
}

TEST_CASE("absent terms stay zero") {
    auto ts = term_set_of({"policy", "economy"});
    ConstProvider provider({0.1, 0.8, 0.1});
    RuleTagger tagger;
    auto doc = text::tokenize("the policy works");
    tagger.tag(doc);
    auto v = sentiment::aggregate_sentiment(doc, ts, provider);
    CHECK(v[ts.index_of("economy")] == sentiment::kAbsent);
    CHECK(v[ts.index_of("policy")] == sentiment::kNeutral);
}

TEST_CASE("mean of occurrence probabilities decides the label") {
    // two occurrences: (0.6,0.3,0.1) and (0.2,0.2,0.6) average to
    // (0.4,0.25,0.35), so the aggregate is negative
    auto ts = term_set_of({"policy"});
    ScriptProvider provider({{0.6, 0.3, 0.1}, {0.2, 0.2, 0.6}});
    RuleTagger tagger;
    auto doc = text::tokenize("the policy. the policy.");
    tagger.tag(doc);
    auto v = sentiment::aggregate_sentiment(doc, ts, provider);
    CHECK(v[0] == sentiment::kNegative);
}

TEST_CASE("single neutral occurrence aggregates to neutral") {
    auto ts = term_set_of({"policy"});
    ConstProvider provider({0.2, 0.6, 0.2});
    RuleTagger tagger;
    auto doc = text::tokenize("the policy stands");
    tagger.tag(doc);
    CHECK(sentiment::aggregate_sentiment(doc, ts, provider)[0] == sentiment::kNeutral);
}

TEST_CASE("argmax ties break toward neutral then negative") {
    CHECK(sentiment::argmax_label(0.4, 0.4, 0.2) == sentiment::kNeutral);
    CHECK(sentiment::argmax_label(0.4, 0.2, 0.4) == sentiment::kNegative);
    CHECK(sentiment::argmax_label(0.3, 0.4, 0.3) == sentiment::kNeutral);
    CHECK(sentiment::argmax_label(1.0 / 3, 1.0 / 3, 1.0 / 3) == sentiment::kNeutral);
}

TEST_CASE("support equals the occurring terms exactly") {
    auto ts = term_set_of({"budget", "policy", "market"});
    ConstProvider provider({0.5, 0.3, 0.2});
    RuleTagger tagger;
    auto doc = text::tokenize("the budget debate. the policy stands. budgets rise.");
    tagger.tag(doc);
    auto v = sentiment::aggregate_sentiment(doc, ts, provider);
    CHECK(v[ts.index_of("budget")] != sentiment::kAbsent);
    CHECK(v[ts.index_of("policy")] != sentiment::kAbsent);
    CHECK(v[ts.index_of("market")] == sentiment::kAbsent);
}

TEST_CASE("constant provider labels every occurring term identically") {
    auto ts = term_set_of({"tax", "rent", "wage"});
    ConstProvider provider({0.7, 0.2, 0.1});
    RuleTagger tagger;
    auto doc = text::tokenize("tax and rent and wage. the tax again.");
    tagger.tag(doc);
    auto v = sentiment::aggregate_sentiment(doc, ts, provider);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (v[i] != sentiment::kAbsent) CHECK(v[i] == sentiment::kNegative);
    }
}

TEST_CASE("aggregation is order-invariant over occurrences") {
    // averaging commutes, so feeding the occurrence scores in reverse must
    // give the same label
    auto ts = term_set_of({"policy"});
    std::vector<TdProbability> probs = {{0.5, 0.1, 0.4}, {0.1, 0.2, 0.7}, {0.3, 0.4, 0.3}};
    RuleTagger tagger;
    auto doc = text::tokenize("policy. policy. policy.");
    tagger.tag(doc);
    ScriptProvider forward(probs);
    auto v1 = sentiment::aggregate_sentiment(doc, ts, forward);
    std::reverse(probs.begin(), probs.end());
    ScriptProvider backward(probs);
    auto v2 = sentiment::aggregate_sentiment(doc, ts, backward);
    CHECK(v1 == v2);
}

TEST_CASE("polarity lexicon TSV loader") {
    std::istringstream in("good\tpos\nbad\tneg\n# comment\nshiny\tpos\n");
    auto lex = PolarityLexicon::from_tsv(in);
    CHECK(lex.is_positive("good"));
    CHECK(lex.is_positive("shiny"));
    CHECK(lex.is_negative("bad"));
    CHECK_FALSE(lex.is_positive("bad"));
}
