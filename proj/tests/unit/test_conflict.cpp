#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "conflictforge/conflict.hpp"
#include "conflictforge/rng.hpp"

using namespace conflictforge;
using conflict::conflict_factor;
using conflict::PairState;

namespace {

using Vec = std::vector<std::uint8_t>;

// explicit per-term loop, kept deliberately naive
double conflict_oracle(const Vec& a, const Vec& b, int* common = nullptr) {
    double total = 0.0;
    int shared = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int gate = a[i];
        if (b[i] < gate) gate = b[i];
        if (1 < gate) gate = 1;
        int diff = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
        total += gate * diff;
        if (a[i] >= 1 && b[i] >= 1) ++shared;
    }
    if (common) *common = shared;
    return total;
}

Vec random_vec(Rng& rng, std::size_t n) {
    Vec v(n);
    for (auto& e : v) e = static_cast<std::uint8_t>(rng.index(4));
    return v;
}

}  // namespace

TEST_CASE("identical vectors have zero conflict") {
    Vec v = {3, 0, 2, 1};
    auto cs = conflict_factor(v, v);
    CHECK(cs.value == 0.0);
    CHECK(cs.common_terms == 3);
}

TEST_CASE("neutral against polar contributes one") {
    Vec a = {2}, b = {3};
    auto cs = conflict_factor(a, b);
    CHECK(cs.value == 1.0);
    CHECK(cs.common_terms == 1);
}

TEST_CASE("worked example: gating and opposition") {
    Vec a = {3, 0, 2}, b = {1, 2, 2};
    auto cs = conflict_factor(a, b);
    CHECK(cs.value == 2.0);  // term0 contributes 2, term1 gated out, term2 agrees
    CHECK(cs.common_terms == 2);
}

TEST_CASE("length mismatch is an error") {
    Vec a = {1, 2}, b = {1};
    CHECK_THROWS_AS(conflict_factor(a, b), std::invalid_argument);
}

TEST_CASE("conflict factor equals the explicit loop on random pairs") {
    Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 1 + rng.index(50);
        Vec a = random_vec(rng, n), b = random_vec(rng, n);
        int common = 0;
        double expected = conflict_oracle(a, b, &common);
        auto cs = conflict_factor(a, b);
        REQUIRE(cs.value == expected);
        REQUIRE(cs.common_terms == common);
        // symmetry and bound
        auto rev = conflict_factor(b, a);
        REQUIRE(rev.value == cs.value);
        REQUIRE(cs.value >= 0.0);
        REQUIRE(cs.value <= 2.0 * cs.common_terms);
    }
}

TEST_CASE("zeroing an index never increases conflict") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng.index(20);
        Vec a = random_vec(rng, n), b = random_vec(rng, n);
        double base = conflict_factor(a, b).value;
        std::size_t k = rng.index(n);
        Vec a2 = a;
        a2[k] = 0;
        CHECK(conflict_factor(a2, b).value <= base);
    }
}

TEST_CASE("news conflict score averages the comment conflicts") {
    Vec article = {3, 2};
    std::vector<Vec> one = {{1, 2}};
    CHECK(conflict::news_conflict_score(article, one) == 2.0);

    // comments engineered to give cf 2 and 4: mean 3
    Vec art = {3, 3};
    std::vector<Vec> two = {{3, 1}, {1, 1}};
    CHECK(conflict::news_conflict_score(art, two) == 3.0);

    CHECK_THROWS_AS(conflict::news_conflict_score(article, {}), std::invalid_argument);
}

TEST_CASE("fully opposed comments on 70 terms reach the news score ceiling") {
    Vec article(70, 3), comment(70, 1);
    std::vector<Vec> comments(70, comment);
    CHECK(conflict::news_conflict_score(article, comments) == 140.0);
}

TEST_CASE("score normalization maps a batch onto the interval") {
    std::vector<double> spanning = {0.0, 5.0, 10.0};
    auto out = conflict::normalize_scores(spanning, 0.0, 10.0);
    CHECK(out == std::vector<double>{0.0, 5.0, 10.0});

    std::vector<double> constant = {2.0, 2.0, 2.0};
    CHECK(conflict::normalize_scores(constant, 0.0, 10.0) ==
          std::vector<double>{0.0, 0.0, 0.0});

    std::vector<double> pair = {1.0, 3.0};
    CHECK(conflict::normalize_scores(pair, 0.0, 10.0) == std::vector<double>{0.0, 10.0});
}

TEST_CASE("per-common-term normalization stays within [0,2]") {
    Vec a = {3, 3}, b = {1, 1};
    auto full = conflict::normalized_pair_conflict(a, b);
    CHECK(full.value == 2.0);
    CHECK(full.has_common);

    auto same = conflict::normalized_pair_conflict(a, a);
    CHECK(same.value == 0.0);

    // one neutral-vs-polar plus one agreeing term: (1 + 0) / 2
    Vec c = {2, 3}, d = {3, 3};
    CHECK(conflict::normalized_pair_conflict(c, d).value == 0.5);

    Vec e = {0, 1}, f = {1, 0};
    auto none = conflict::normalized_pair_conflict(e, f);
    CHECK(none.value == 0.0);
    CHECK_FALSE(none.has_common);

    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        Vec g = random_vec(rng, 10), h = random_vec(rng, 10);
        auto nc = conflict::normalized_pair_conflict(g, h);
        CHECK(nc.value >= 0.0);
        CHECK(nc.value <= 2.0);
    }
}

TEST_CASE("pair state follows the engagement history") {
    CHECK(conflict::pair_state({}, 1.0) == PairState::NoEngagement);
    std::vector<double> conflicting = {3.1, 4.0};
    CHECK(conflict::pair_state(conflicting, 1.0) == PairState::Conflicting);
    std::vector<double> mixed = {0.0, 3.1};
    CHECK(conflict::pair_state(mixed, 1.0) == PairState::Mixed);
    std::vector<double> peaceful = {0.0, 0.5};
    CHECK(conflict::pair_state(peaceful, 1.0) == PairState::NonConflicting);
    CHECK_THROWS_AS(conflict::pair_state(mixed, -0.5), std::invalid_argument);
}
