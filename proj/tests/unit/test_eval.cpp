#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "conflictforge/eval.hpp"
#include "conflictforge/rng.hpp"

using namespace conflictforge;
using eval::RankedList;

namespace {

// trapezoidal ROC integration, the independent route for AUC
double auc_trapezoid(const std::vector<int>& labels, const std::vector<double>& scores) {
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    double p = 0, n = 0;
    for (int l : labels) (l == 1 ? p : n) += 1;
    double tp = 0, fp = 0, prev_tp = 0, prev_fp = 0, area = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        prev_tp = tp;
        prev_fp = fp;
    }
    return area / (p * n);
}

}  // namespace

TEST_CASE("regression metrics on exact predictions are zero") {
    std::vector<double> y = {1.0, 2.0, 3.0};
    auto m = eval::regression_metrics(y, y);
    CHECK(m.mse == 0.0);
    CHECK(m.rmse == 0.0);
    CHECK(m.smape == 0.0);
}

TEST_CASE("smape of a total miss of a zero target is two") {
    std::vector<double> y = {10.0}, p = {0.0};
    CHECK(eval::regression_metrics(y, p).smape == Catch::Approx(2.0));
    std::vector<double> z = {0.0};
    CHECK(eval::regression_metrics(z, z).smape == 0.0);  // 0/0 convention
}

TEST_CASE("rmse squared equals mse") {
    Rng rng(5);
    std::vector<double> y(50), p(50);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = rng.normal();
        p[i] = rng.normal();
    }
    auto m = eval::regression_metrics(y, p);
    CHECK(m.rmse * m.rmse == Catch::Approx(m.mse).epsilon(1e-12));
}

TEST_CASE("perfect rankings score one") {
    std::vector<RankedList> lists = {{{1, 1, 0, 0}}, {{1, 0, 0}}};
    auto m = eval::ranking_metrics(lists);
    CHECK(m.map == 1.0);
    CHECK(m.mrr == 1.0);
}

TEST_CASE("single relevant item at rank two of two") {
    std::vector<RankedList> lists = {{{0, 1}}};
    auto m = eval::ranking_metrics(lists);
    CHECK(m.map == 0.5);
    CHECK(m.mrr == 0.5);
}

TEST_CASE("first relevant at rank three gives reciprocal rank one third") {
    std::vector<RankedList> lists = {{{0, 0, 1, 0}}};
    auto m = eval::ranking_metrics(lists);
    CHECK(m.mrr == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("lists without relevant items are skipped with a count") {
    std::vector<RankedList> lists = {{{0, 0}}, {{1}}};
    auto m = eval::ranking_metrics(lists);
    CHECK(m.lists_used == 1);
    CHECK(m.lists_skipped == 1);
    CHECK(m.map == 1.0);
}

TEST_CASE("map and mrr match a brute-force evaluation") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + rng.index(10);
        RankedList list;
        list.relevance.resize(n);
        bool any = false;
        for (auto& r : list.relevance) {
            r = rng.bernoulli(0.4) ? 1 : 0;
            any |= r == 1;
        }
        if (!any) list.relevance[rng.index(n)] = 1;

        double ap = 0;
        int hits = 0, total = 0;
        double rr = 0;
        for (std::size_t k = 0; k < n; ++k) total += list.relevance[k];
        hits = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!list.relevance[k]) continue;
            ++hits;
            double precision_at_k = double(hits) / double(k + 1);
            ap += precision_at_k;
            if (hits == 1) rr = 1.0 / double(k + 1);
        }
        ap /= total;

        auto m = eval::ranking_metrics({list});
        REQUIRE(m.map == Catch::Approx(ap).epsilon(1e-12));
        REQUIRE(m.mrr == Catch::Approx(rr).epsilon(1e-12));
    }
}

TEST_CASE("classification metrics on separated and tied scores") {
    std::vector<int> labels = {1, 1, 0, 0};
    std::vector<double> separated = {0.9, 0.8, 0.2, 0.1};
    auto m = eval::classification_metrics(labels, separated);
    REQUIRE(m.auc.has_value());
    CHECK(*m.auc == 1.0);
    CHECK(m.accuracy == 1.0);

    std::vector<double> tied = {0.5, 0.5, 0.5, 0.5};
    CHECK(*eval::classification_metrics(labels, tied).auc == 0.5);

    std::vector<int> l2 = {1, 0, 1};
    std::vector<double> s2 = {0.9, 0.8, 0.3};
    CHECK(*eval::classification_metrics(l2, s2).auc == 0.5);
}

TEST_CASE("single-class input yields accuracy but no auc") {
    std::vector<int> labels = {1, 1};
    std::vector<double> scores = {0.9, 0.2};
    auto m = eval::classification_metrics(labels, scores);
    CHECK_FALSE(m.auc.has_value());
    CHECK(m.accuracy == 0.5);
}

TEST_CASE("pairwise auc equals trapezoidal roc auc") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 4 + rng.index(40);
        std::vector<int> labels(n);
        std::vector<double> scores(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = rng.bernoulli(0.5) ? 1 : 0;
            // coarse grid forces plenty of ties
            scores[i] = rng.index(8) / 8.0;
            has_pos |= labels[i] == 1;
            has_neg |= labels[i] == 0;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[1] = 0;
        auto m = eval::classification_metrics(labels, scores);
        REQUIRE(m.auc.has_value());
        REQUIRE(*m.auc == Catch::Approx(auc_trapezoid(labels, scores)).margin(1e-12));
    }
}

TEST_CASE("unanimous raters give kappa one") {
    std::vector<std::vector<int>> counts = {{5, 0}, {0, 5}, {5, 0}};
    CHECK(eval::fleiss_kappa(counts) == Catch::Approx(1.0));
}

TEST_CASE("the published worked example lands near 0.210") {
    std::vector<std::vector<int>> counts = {
        {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
        {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
        {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7},
    };
    CHECK(eval::fleiss_kappa(counts) == Catch::Approx(0.2099).margin(1e-3));
}

TEST_CASE("systematic disagreement drives kappa negative") {
    std::vector<std::vector<int>> counts = {{2, 2}, {2, 2}, {2, 2}};
    CHECK(eval::fleiss_kappa(counts) < 0.0);
}

TEST_CASE("degenerate one-category mass is an error") {
    std::vector<std::vector<int>> counts = {{4, 0}, {4, 0}};
    CHECK_THROWS_AS(eval::fleiss_kappa(counts), std::invalid_argument);
}

TEST_CASE("metrics are invariant under consistent permutation") {
    Rng rng(31);
    std::vector<int> labels;
    std::vector<double> scores;
    for (int i = 0; i < 30; ++i) {
        labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
        scores.push_back(rng.uniform());
    }
    labels[0] = 1;
    labels[1] = 0;
    auto base = eval::classification_metrics(labels, scores);
    std::vector<std::size_t> perm(labels.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<int> pl(labels.size());
    std::vector<double> ps(labels.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        pl[i] = labels[perm[i]];
        ps[i] = scores[perm[i]];
    }
    auto shuffled = eval::classification_metrics(pl, ps);
    CHECK(*base.auc == Catch::Approx(*shuffled.auc).margin(1e-12));
    CHECK(base.accuracy == Catch::Approx(shuffled.accuracy).margin(1e-12));
}
