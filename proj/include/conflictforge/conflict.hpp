#pragma once
// Conflict mathematics: the per-pair conflict factor, news conflict score,
// batch normalization and the pair engagement state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "conflictforge/sentiment.hpp"

namespace conflictforge::conflict {

using sentiment::TargetSentimentVector;

struct ConflictScore {
    double value = 0.0;
    int common_terms = 0;
};

// Sum over terms of min(a, b, 1) * |a - b|. The min gate zeroes terms absent
// from either document; each common term contributes 0, 1 or 2.
inline ConflictScore conflict_factor(std::span<const std::uint8_t> ts1,
                                     std::span<const std::uint8_t> ts2) {
    if (ts1.size() != ts2.size())
        throw std::invalid_argument("conflict_factor: vector length mismatch");
    ConflictScore score;
    for (std::size_t i = 0; i < ts1.size(); ++i) {
        int a = ts1[i], b = ts2[i];
        int gate = std::min({a, b, 1});
        if (gate == 0) continue;
        ++score.common_terms;
        score.value += std::abs(a - b);
    }
    return score;
}

// Mean conflict factor between an article and its comments.
inline double news_conflict_score(const TargetSentimentVector& article_ts,
                                  const std::vector<TargetSentimentVector>& comment_ts_list) {
    if (comment_ts_list.empty())
        throw std::invalid_argument("news_conflict_score: no comments");
    double sum = 0.0;
    for (const auto& c : comment_ts_list) sum += conflict_factor(article_ts, c).value;
    return sum / static_cast<double>(comment_ts_list.size());
}

// Affine min-max map of the batch onto [lo, hi]. A constant batch maps to lo.
inline std::vector<double> normalize_scores(std::span<const double> scores, double lo, double hi) {
    if (hi <= lo) throw std::invalid_argument("normalize_scores: hi must exceed lo");
    if (scores.empty()) throw std::invalid_argument("normalize_scores: empty batch");
    double mn = scores[0], mx = scores[0];
    for (double s : scores) {
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    std::vector<double> out(scores.size());
    if (mx == mn) {
        std::fill(out.begin(), out.end(), lo);
        return out;
    }
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = lo + (scores[i] - mn) / (mx - mn) * (hi - lo);
    return out;
}

struct NormalizedConflict {
    double value = 0.0;      // in [0, 2]
    bool has_common = false; // false when the pair shares no terms
};

// Conflict factor averaged per common term.
inline NormalizedConflict normalized_pair_conflict(std::span<const std::uint8_t> ts1,
                                                   std::span<const std::uint8_t> ts2) {
    ConflictScore cs = conflict_factor(ts1, ts2);
    if (cs.common_terms == 0) return {0.0, false};
    return {cs.value / cs.common_terms, true};
}

// Engagement states: 0 no engagement, 1 only non-conflicting, 2 only
// conflicting, 3 mixed (preferential conflict).
enum class PairState : int {
    NoEngagement = 0,
    NonConflicting = 1,
    Conflicting = 2,
    Mixed = 3,
};

inline PairState pair_state(std::span<const double> conflict_history, double tau) {
    if (tau < 0) throw std::invalid_argument("pair_state: negative threshold");
    if (conflict_history.empty()) return PairState::NoEngagement;
    bool any_conflict = false, any_peace = false;
    for (double cf : conflict_history) {
        if (cf >= tau) any_conflict = true;
        else any_peace = true;
    }
    if (any_conflict && any_peace) return PairState::Mixed;
    return any_conflict ? PairState::Conflicting : PairState::NonConflicting;
}

}  // namespace conflictforge::conflict
