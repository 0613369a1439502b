#pragma once
// Tokenization, sentence splitting, lemmatization and the bundled rule
// tagger. Everything here is deterministic and needs no external model.

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conflictforge/common.hpp"

namespace conflictforge::text {

enum class Pos : std::uint8_t {
    Unknown,
    Noun,
    ProperNoun,
    Verb,
    Adjective,
    Adverb,
    Determiner,
    Preposition,
    Conjunction,
    Pronoun,
    Auxiliary,
    Number,
};

enum class Entity : std::uint8_t { None, Person, Other };

struct Token {
    std::string text;   // surface form
    std::string lower;  // lowercased surface
    std::string lemma;  // lowercased lemma (filled by the tagger)
    Pos pos = Pos::Unknown;
    Entity ent = Entity::None;
};

struct Sentence {
    std::vector<Token> tokens;
    std::string terminator;  // ".", "!", "?" or empty
};

struct TokenizedDoc {
    std::vector<Sentence> sentences;

    std::string joined() const {
        std::string out;
        for (const auto& s : sentences) {
            for (std::size_t i = 0; i < s.tokens.size(); ++i) {
                if (!out.empty() && out.back() != ' ') out.push_back(' ');
                out += s.tokens[i].text;
            }
            out += s.terminator;
            out.push_back(' ');
        }
        if (!out.empty() && out.back() == ' ') out.pop_back();
        return out;
    }
};

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

inline bool is_noun(Pos p) { return p == Pos::Noun || p == Pos::ProperNoun; }

// Default abbreviation list; a file can extend it.
inline const std::unordered_set<std::string>& default_abbreviations() {
    static const std::unordered_set<std::string> abbr = {
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "inc",
        "ltd", "co", "gen", "sen", "rep", "gov", "dept", "univ", "approx",
        "e.g", "i.e", "u.s", "u.k", "a.m", "p.m", "no", "fig", "jan", "feb",
        "mar", "apr", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    };
    return abbr;
}

// Splits raw text into sentences of word tokens. Boundaries are ., ! or ?
// followed by whitespace, unless the preceding word is a known abbreviation
// or a single initial. Blank lines also break sentences.
inline TokenizedDoc tokenize(std::string_view raw,
                             const std::unordered_set<std::string>* abbreviations = nullptr) {
    const auto& abbr = abbreviations ? *abbreviations : default_abbreviations();
    TokenizedDoc doc;
    Sentence cur;
    std::size_t i = 0;
    const std::size_t n = raw.size();
    auto flush = [&](std::string term) {
        if (!cur.tokens.empty()) {
            cur.terminator = std::move(term);
            doc.sentences.push_back(std::move(cur));
            cur = Sentence{};
        }
    };
    while (i < n) {
        char c = raw[i];
        if (is_word_char(c)) {
            std::size_t start = i;
            while (i < n && is_word_char(raw[i])) ++i;
            std::string_view word = raw.substr(start, i - start);
            // strip stray leading/trailing apostrophes and hyphens
            while (!word.empty() && (word.front() == '\'' || word.front() == '-')) word.remove_prefix(1);
            while (!word.empty() && (word.back() == '\'' || word.back() == '-')) word.remove_suffix(1);
            if (!word.empty()) {
                Token t;
                t.text = std::string(word);
                t.lower = to_lower(word);
                cur.tokens.push_back(std::move(t));
            }
            continue;
        }
        if (c == '.' || c == '!' || c == '?') {
            std::size_t start = i;
            while (i < n && (raw[i] == '.' || raw[i] == '!' || raw[i] == '?')) ++i;
            bool at_break = (i >= n) || std::isspace(static_cast<unsigned char>(raw[i]));
            bool abbreviated = false;
            if (c == '.' && !cur.tokens.empty()) {
                const std::string& prev = cur.tokens.back().lower;
                abbreviated = abbr.count(prev) > 0 || prev.size() == 1;
            }
            if (at_break && !abbreviated) {
                flush(std::string(raw.substr(start, std::min<std::size_t>(1, i - start))));
            }
            continue;
        }
        if (c == '\n' && i + 1 < n && raw[i + 1] == '\n') {
            flush("");
        }
        ++i;
    }
    flush("");
    return doc;
}

// ---------------------------------------------------------------------------
// Lemmatizer: exception table plus suffix stripping, nouns only in practice.

inline const std::unordered_map<std::string, std::string>& lemma_exceptions() {
    static const std::unordered_map<std::string, std::string> m = {
        {"men", "man"},         {"women", "woman"},   {"children", "child"},
        {"people", "person"},   {"feet", "foot"},     {"teeth", "tooth"},
        {"geese", "goose"},     {"mice", "mouse"},    {"lives", "life"},
        {"wives", "wife"},      {"knives", "knife"},  {"leaves", "leaf"},
        {"halves", "half"},     {"shelves", "shelf"}, {"thieves", "thief"},
        {"loaves", "loaf"},     {"wolves", "wolf"},   {"oxen", "ox"},
        {"media", "medium"},    {"crises", "crisis"}, {"analyses", "analysis"},
        {"theses", "thesis"},   {"data", "data"},     {"series", "series"},
        {"species", "species"}, {"news", "news"},     {"police", "police"},
        {"economics", "economics"}, {"politics", "politics"},
    };
    return m;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Input must be lowercased.
inline std::string lemmatize(const std::string& word) {
    const auto& exc = lemma_exceptions();
    if (auto it = exc.find(word); it != exc.end()) return it->second;
    const std::size_t n = word.size();
    if (n >= 5 && ends_with(word, "ies")) return word.substr(0, n - 3) + "y";
    if (n >= 5 && ends_with(word, "oes")) return word.substr(0, n - 2);
    if (n >= 5 && (ends_with(word, "ches") || ends_with(word, "shes") ||
                   ends_with(word, "sses") || ends_with(word, "xes") || ends_with(word, "zes")))
        return word.substr(0, n - 2);
    if (n >= 4 && ends_with(word, "s") && !ends_with(word, "ss") && !ends_with(word, "us") &&
        !ends_with(word, "is"))
        return word.substr(0, n - 1);
    return word;
}

// ---------------------------------------------------------------------------
// Rule tagger

// Per-token part-of-speech and named-entity tags. Deterministic on identical
// input.
class Tagger {
public:
    virtual ~Tagger() = default;
    virtual void tag(Sentence& sentence) const = 0;

    void tag(TokenizedDoc& doc) const {
        for (auto& s : doc.sentences) tag(s);
    }
};

// Gazetteer-driven entity category.
enum class GazetteerKind { Person, Other };

// Closed-class lookups, entity gazetteer, suffix heuristics and a short
// left-to-right context pass. Unknown words default to noun.
class RuleTagger : public Tagger {
public:
    RuleTagger() = default;

    using Tagger::tag;

    void add_entity(std::string name, GazetteerKind kind) {
        gazetteer_[to_lower(name)] = kind;
    }

    // TSV rows: name<TAB>category, category "person" or anything else.
    void load_gazetteer(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            auto parts = split(line, '\t');
            GazetteerKind kind = GazetteerKind::Other;
            if (parts.size() > 1 && to_lower(trim(parts[1])) == "person") kind = GazetteerKind::Person;
            add_entity(trim(parts[0]), kind);
        }
    }

    void tag(Sentence& sentence) const override {
        auto& toks = sentence.tokens;
        // entity pass
        for (std::size_t i = 0; i < toks.size(); ++i) {
            Token& t = toks[i];
            t.ent = Entity::None;
            auto git = gazetteer_.find(t.lower);
            if (git != gazetteer_.end()) {
                t.ent = git->second == GazetteerKind::Person ? Entity::Person : Entity::Other;
                continue;
            }
            bool capitalized = !t.text.empty() && std::isupper(static_cast<unsigned char>(t.text[0]));
            if (capitalized && i > 0 && !is_closed_class(t.lower)) {
                // continue the preceding span's category, else generic entity
                t.ent = toks[i - 1].ent == Entity::Person ? Entity::Person : Entity::Other;
            }
        }
        // pos pass
        Pos prev = Pos::Unknown;
        for (auto& t : toks) {
            t.pos = classify(t, prev);
            t.lemma = is_noun(t.pos) ? lemmatize(t.lower) : t.lower;
            prev = t.pos;
        }
    }

private:
    static bool in(const std::unordered_set<std::string>& set, const std::string& w) {
        return set.count(w) > 0;
    }

    static bool is_closed_class(const std::string& w) {
        return in(determiners(), w) || in(prepositions(), w) || in(conjunctions(), w) ||
               in(pronouns(), w) || in(auxiliaries(), w) || in(adverbs(), w);
    }

    Pos classify(const Token& t, Pos prev) const {
        const std::string& w = t.lower;
        if (t.ent != Entity::None) return Pos::ProperNoun;
        if (in(determiners(), w)) return Pos::Determiner;
        if (in(prepositions(), w)) return Pos::Preposition;
        if (in(conjunctions(), w)) return Pos::Conjunction;
        if (in(pronouns(), w)) return Pos::Pronoun;
        if (in(auxiliaries(), w)) return Pos::Auxiliary;
        if (in(adverbs(), w)) return Pos::Adverb;
        if (std::isdigit(static_cast<unsigned char>(t.text.empty() ? ' ' : t.text[0]))) return Pos::Number;
        if (ends_with(w, "ly") && w.size() > 4) return Pos::Adverb;
        if (has_noun_suffix(w)) return Pos::Noun;
        if (has_adjective_suffix(w)) return Pos::Adjective;
        if ((ends_with(w, "ing") || ends_with(w, "ed")) && w.size() > 4) {
            if (prev == Pos::Determiner || prev == Pos::Adjective) return Pos::Noun;
            return Pos::Verb;
        }
        switch (prev) {
            case Pos::Determiner:
            case Pos::Adjective:
            case Pos::Preposition:
            case Pos::Number:
                return Pos::Noun;
            case Pos::Noun:
            case Pos::ProperNoun:
            case Pos::Pronoun:
            case Pos::Auxiliary:
                return Pos::Verb;
            default:
                return Pos::Noun;
        }
    }

    static bool has_noun_suffix(const std::string& w) {
        static const std::array<std::string_view, 16> suf = {
            "tion", "sion", "ment", "ness", "ity",  "ance", "ence", "ship",
            "ism",  "ist",  "ery",  "age",  "dom",  "hood", "ure",  "cracy",
        };
        if (w.size() < 5) return false;
        for (auto s : suf)
            if (ends_with(w, s)) return true;
        return false;
    }

    static bool has_adjective_suffix(const std::string& w) {
        static const std::array<std::string_view, 9> suf = {
            "ous", "ful", "ive", "able", "ible", "ish", "ical", "less", "ary",
        };
        if (w.size() < 5) return false;
        for (auto s : suf)
            if (ends_with(w, s)) return true;
        return false;
    }

    static const std::unordered_set<std::string>& determiners() {
        static const std::unordered_set<std::string> s = {
            "the", "a", "an", "this", "that", "these", "those", "each", "every",
            "some", "any", "no", "both", "either", "neither", "much", "many",
            "more", "most", "few", "several", "all", "another", "such", "its",
            "his", "her", "their", "our", "my", "your",
        };
        return s;
    }
    static const std::unordered_set<std::string>& prepositions() {
        static const std::unordered_set<std::string> s = {
            "at", "by", "for", "from", "in", "into", "of", "off", "on", "onto",
            "over", "to", "under", "with", "within", "without", "about",
            "against", "between", "through", "during", "before", "after",
            "above", "below", "up", "down", "out", "around", "near", "toward",
            "towards", "upon", "across", "behind", "beyond", "despite", "per",
        };
        return s;
    }
    static const std::unordered_set<std::string>& conjunctions() {
        static const std::unordered_set<std::string> s = {
            "and", "or", "but", "nor", "so", "yet", "because", "although",
            "though", "while", "whereas", "if", "unless", "since", "until",
            "when", "where", "that", "which", "who", "whom", "whose", "as",
        };
        return s;
    }
    static const std::unordered_set<std::string>& pronouns() {
        static const std::unordered_set<std::string> s = {
            "i", "you", "he", "she", "it", "we", "they", "me", "him", "us",
            "them", "myself", "yourself", "himself", "herself", "itself",
            "ourselves", "themselves", "someone", "anyone", "everyone",
            "nobody", "something", "anything", "everything", "nothing", "one",
            "who", "what",
        };
        return s;
    }
    static const std::unordered_set<std::string>& auxiliaries() {
        static const std::unordered_set<std::string> s = {
            "is", "am", "are", "was", "were", "be", "been", "being", "do",
            "does", "did", "have", "has", "had", "will", "would", "shall",
            "should", "can", "could", "may", "might", "must", "won't", "don't",
            "doesn't", "didn't", "isn't", "aren't", "wasn't", "weren't",
            "can't", "cannot", "couldn't", "shouldn't", "wouldn't",
        };
        return s;
    }
    static const std::unordered_set<std::string>& adverbs() {
        static const std::unordered_set<std::string> s = {
            "not", "never", "always", "often", "sometimes", "very", "too",
            "quite", "rather", "here", "there", "now", "then", "just", "only",
            "also", "even", "still", "already", "again", "almost", "really",
        };
        return s;
    }

    std::unordered_map<std::string, GazetteerKind> gazetteer_;
};

inline std::unordered_set<std::string> load_word_list(std::istream& in) {
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#') words.insert(to_lower(line));
    }
    return words;
}

}  // namespace conflictforge::text
