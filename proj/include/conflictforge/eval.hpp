#pragma once
// Evaluation metrics: regression errors, ranking quality, classification
// scores and Fleiss' kappa.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace conflictforge::eval {

struct RegressionMetrics {
    double mse = 0.0;
    double rmse = 0.0;
    double smape = 0.0;
};

// sMAPE uses the halved-sum denominator |y - p| / ((|y| + |p|) / 2), with
// 0/0 counted as 0, so a total miss of a zero target scores 2.
inline RegressionMetrics regression_metrics(std::span<const double> y_true,
                                            std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("regression_metrics: length mismatch or empty input");
    double se = 0.0, smape = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        double d = y_true[i] - y_pred[i];
        se += d * d;
        double denom = (std::abs(y_true[i]) + std::abs(y_pred[i])) / 2.0;
        if (denom > 0) smape += std::abs(d) / denom;
    }
    double n = static_cast<double>(y_true.size());
    RegressionMetrics m;
    m.mse = se / n;
    m.rmse = std::sqrt(m.mse);
    m.smape = smape / n;
    return m;
}

// Items already ordered by descending predicted score.
struct RankedList {
    std::vector<char> relevance;  // 1 = relevant
};

struct RankingMetrics {
    double map = 0.0;
    double mrr = 0.0;
    std::size_t lists_used = 0;
    std::size_t lists_skipped = 0;  // no relevant item
};

inline RankingMetrics ranking_metrics(const std::vector<RankedList>& lists) {
    RankingMetrics out;
    double ap_sum = 0.0, rr_sum = 0.0;
    for (const auto& list : lists) {
        int relevant = 0;
        for (char r : list.relevance) relevant += r ? 1 : 0;
        if (relevant == 0) {
            ++out.lists_skipped;
            continue;
        }
        int hits = 0;
        double ap = 0.0;
        double rr = 0.0;
        for (std::size_t k = 0; k < list.relevance.size(); ++k) {
            if (!list.relevance[k]) continue;
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(k + 1);
            if (hits == 1) rr = 1.0 / static_cast<double>(k + 1);
        }
        ap_sum += ap / relevant;
        rr_sum += rr;
        ++out.lists_used;
    }
    if (out.lists_used == 0) throw std::invalid_argument("ranking_metrics: no usable list");
    out.map = ap_sum / static_cast<double>(out.lists_used);
    out.mrr = rr_sum / static_cast<double>(out.lists_used);
    return out;
}

struct ClassificationMetrics {
    std::optional<double> auc;  // absent when only one class is present
    double accuracy = 0.0;
};

// AUC is the probability a positive outscores a negative, ties at half
// credit. Accuracy thresholds at `threshold` (score >= threshold => 1).
inline ClassificationMetrics classification_metrics(std::span<const int> labels,
                                                    std::span<const double> scores,
                                                    double threshold = 0.5) {
    if (labels.size() != scores.size() || labels.empty())
        throw std::invalid_argument("classification_metrics: length mismatch or empty input");
    std::size_t correct = 0;
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int predicted = scores[i] >= threshold ? 1 : 0;
        if (predicted == labels[i]) ++correct;
        (labels[i] == 1 ? pos : neg).push_back(scores[i]);
    }
    ClassificationMetrics m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    if (pos.empty() || neg.empty()) return m;

    // count concordant pairs by merging sorted score lists
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    double concordant = 0.0;
    std::size_t below = 0, tied = 0;
    for (double p : pos) {
        while (below < neg.size() && neg[below] < p) ++below;
        tied = below;
        while (tied < neg.size() && neg[tied] == p) ++tied;
        concordant += static_cast<double>(below) + 0.5 * static_cast<double>(tied - below);
    }
    m.auc = concordant / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
    return m;
}

// Chance-corrected agreement for N items rated into k categories by a
// constant number of raters. rating_counts[i][j] = raters placing item i in
// category j.
inline double fleiss_kappa(const std::vector<std::vector<int>>& rating_counts) {
    if (rating_counts.empty() || rating_counts[0].empty())
        throw std::invalid_argument("fleiss_kappa: empty rating matrix");
    const std::size_t n_items = rating_counts.size();
    const std::size_t n_cats = rating_counts[0].size();
    int raters = 0;
    for (int c : rating_counts[0]) raters += c;
    if (raters < 2) throw std::invalid_argument("fleiss_kappa: need at least two raters");

    std::vector<double> category_mass(n_cats, 0.0);
    double p_bar = 0.0;
    for (const auto& row : rating_counts) {
        if (row.size() != n_cats) throw std::invalid_argument("fleiss_kappa: ragged matrix");
        int total = 0;
        double agree = 0.0;
        for (std::size_t j = 0; j < n_cats; ++j) {
            total += row[j];
            agree += static_cast<double>(row[j]) * (row[j] - 1);
            category_mass[j] += row[j];
        }
        if (total != raters)
            throw std::invalid_argument("fleiss_kappa: rater count varies across items");
        p_bar += agree / (static_cast<double>(raters) * (raters - 1));
    }
    p_bar /= static_cast<double>(n_items);

    double pe = 0.0;
    for (double mass : category_mass) {
        double pj = mass / (static_cast<double>(n_items) * raters);
        pe += pj * pj;
    }
    if (pe >= 1.0) throw std::invalid_argument("fleiss_kappa: degenerate category distribution");
    return (p_bar - pe) / (1.0 - pe);
}

}  // namespace conflictforge::eval
