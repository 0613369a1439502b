#include <catch2/catch_amalgamated.hpp>

#include "conflictforge/gcn.hpp"
#include "conflictforge/graph.hpp"
#include "conflictforge/rng.hpp"
#include "conflictforge/samples.hpp"

using namespace conflictforge;
using gcn::GcnDims;
using gcn::GcnParams;
using gcn::gcn_forward;

namespace {

GcnParams random_params(const GcnDims& dims, std::uint64_t seed) {
    Rng rng(seed);
    return GcnParams::glorot(dims, rng);
}

Eigen::MatrixXd random_a_hat(Rng& rng, int n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(0.6)) a(i, j) = a(j, i) = rng.uniform(0.1, 3.0);
    return graph::normalized_adjacency(a);
}

}  // namespace

TEST_CASE("zero adjacency collapses to the classifier bias") {
    GcnDims dims{.input = 4, .embed = 8, .h1 = 8, .h2 = 4, .h3 = 3};
    auto params = random_params(dims, 1);
    params.b_c = 0.37;
    Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd x(3, 4);
    x.setRandom();
    double y = gcn_forward(a_hat, x, params, 0, 1);
    CHECK(y == Catch::Approx(gcn::logistic(0.37)).margin(1e-12));
}

TEST_CASE("dimension chain produces a length 2*h3 pair embedding") {
    GcnDims dims{.input = 10, .embed = 16, .h1 = 16, .h2 = 16, .h3 = 16};
    auto params = random_params(dims, 2);
    Rng rng(3);
    auto a_hat = random_a_hat(rng, 6);
    Eigen::MatrixXd x(6, 10);
    x.setRandom();
    gcn::ForwardCache cache;
    double y = gcn_forward(a_hat, x, params, 0, 1, &cache);
    CHECK(cache.e.size() == 32);
    CHECK(cache.h3.rows() == 6);
    CHECK(cache.h3.cols() == 16);
    CHECK(y > 0.0);
    CHECK(y < 1.0);
}

TEST_CASE("mismatched feature width is rejected") {
    GcnDims dims{.input = 4, .embed = 8, .h1 = 8, .h2 = 4, .h3 = 3};
    auto params = random_params(dims, 4);
    Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd x(3, 5);
    x.setRandom();
    CHECK_THROWS_AS(gcn_forward(a_hat, x, params, 0, 1), std::invalid_argument);
}

TEST_CASE("hand-evaluated three-node forward pass") {
    // identity-like kernels so the arithmetic can be followed on paper
    GcnDims dims{.input = 2, .embed = 2, .h1 = 2, .h2 = 2, .h3 = 2};
    GcnParams p = GcnParams::zeros(dims);
    p.k_f << 1, 0, 0, 1;
    p.k_g1 << 1, 0, 0, 1;
    p.k_g2 << 1, 0, 0, 1;
    p.k_g3 << 1, 0, 0, 1;
    p.k_c << 1, 1, 1, 1;
    p.b_c = 0.0;

    // path graph 0-1-2 with unit weights
    Eigen::MatrixXd a(3, 3);
    a << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    Eigen::MatrixXd a_hat = graph::normalized_adjacency(a);
    Eigen::MatrixXd x(3, 2);
    x << 1, 0, 0, 1, 1, 1;

    // with identity kernels each convolution is one multiplication by a_hat
    Eigen::MatrixXd h = x;
    for (int layer = 0; layer < 3; ++layer) h = (a_hat * h).cwiseMax(0.0);
    double z = h.row(0).sum() + h.row(1).sum();
    double expected = gcn::logistic(z);

    CHECK(gcn_forward(a_hat, x, p, 0, 1) == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("forward pass is permutation equivariant") {
    GcnDims dims{.input = 5, .embed = 8, .h1 = 8, .h2 = 6, .h3 = 4};
    auto params = random_params(dims, 5);
    Rng rng(6);
    const int n = 7;
    auto a_hat = random_a_hat(rng, n);
    Eigen::MatrixXd x(n, 5);
    x.setRandom();
    double base = gcn_forward(a_hat, x, params, 2, 5);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    Eigen::MatrixXd pa(n, n), px(n, 5);
    for (int i = 0; i < n; ++i) {
        px.row(i) = x.row(perm[i]);
        for (int j = 0; j < n; ++j) pa(i, j) = a_hat(perm[i], perm[j]);
    }
    int pi = -1, pj = -1;
    for (int i = 0; i < n; ++i) {
        if (perm[i] == 2) pi = i;
        if (perm[i] == 5) pj = i;
    }
    double permuted = gcn_forward(pa, px, params, pi, pj);
    CHECK(permuted == Catch::Approx(base).margin(1e-9));
}

TEST_CASE("edge weight scale cancels in the normalized adjacency") {
    Rng rng(7);
    const int n = 6;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(0.7)) a(i, j) = a(j, i) = rng.uniform(0.2, 2.0);
    GcnDims dims{.input = 3, .embed = 6, .h1 = 6, .h2 = 4, .h3 = 2};
    auto params = random_params(dims, 8);
    Eigen::MatrixXd x(n, 3);
    x.setRandom();

    double y1 = gcn_forward(graph::normalized_adjacency(a), x, params, 0, 1);
    double y2 = gcn_forward(graph::normalized_adjacency(3.7 * a), x, params, 0, 1);
    CHECK(y1 == Catch::Approx(y2).margin(1e-12));
}

namespace {

// evaluation points where every pre-activation is either exactly zero or
// clear of the ReLU kink, so central differences are trustworthy
bool relu_safe(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& x, const GcnParams& p) {
    gcn::ForwardCache c;
    gcn_forward(a_hat, x, p, 0, 1, &c);
    auto clear = [](const Eigen::MatrixXd& z) {
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            double v = std::abs(z.data()[i]);
            if (v != 0.0 && v < 1e-3) return false;
        }
        return true;
    };
    return clear(c.z0) && clear(c.z1) && clear(c.z2) && clear(c.z3);
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
    GcnDims dims{.input = 4, .embed = 6, .h1 = 6, .h2 = 4, .h3 = 3};
    Rng rng(9);
    const int n = 5;
    int done = 0;
    for (int draw = 0; done < 5 && draw < 50; ++draw) {
        auto params = random_params(dims, 100 + draw);
        auto a_hat = random_a_hat(rng, n);
        Eigen::MatrixXd x(n, 4);
        for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
        if (!relu_safe(a_hat, x, params)) continue;
        ++done;
        const int label = draw % 2;

        GcnParams grad = GcnParams::zeros(dims);
        gcn::gcn_backward(a_hat, x, params, 0, 1, label, grad);

        auto loss_at = [&](const GcnParams& p) {
            double y = gcn_forward(a_hat, x, p, 0, 1);
            return gcn::bce_loss(y, label);
        };

        // probe a handful of coordinates in every tensor
        auto check_matrix = [&](Eigen::MatrixXd GcnParams::* member, const char* name) {
            auto& g = grad.*member;
            for (int probe = 0; probe < 4; ++probe) {
                Eigen::Index idx = static_cast<Eigen::Index>(rng.index(g.size()));
                const double h = 1e-6;
                GcnParams plus = params, minus = params;
                (plus.*member).data()[idx] += h;
                (minus.*member).data()[idx] -= h;
                double numeric = (loss_at(plus) - loss_at(minus)) / (2 * h);
                double analytic = g.data()[idx];
                double denom = std::max({1e-4, std::abs(numeric), std::abs(analytic)});
                INFO(name << " idx " << idx);
                REQUIRE(std::abs(numeric - analytic) / denom < 1e-4);
            }
        };
        check_matrix(&GcnParams::k_f, "k_f");
        check_matrix(&GcnParams::k_g1, "k_g1");
        check_matrix(&GcnParams::k_g2, "k_g2");
        check_matrix(&GcnParams::k_g3, "k_g3");

        const double h = 1e-6;
        GcnParams plus = params, minus = params;
        plus.b_c += h;
        minus.b_c -= h;
        double numeric = (loss_at(plus) - loss_at(minus)) / (2 * h);
        REQUIRE(std::abs(numeric - grad.b_c) < 1e-5);
    }
    REQUIRE(done == 5);
}

TEST_CASE("training on a constant-label batch drives the loss down") {
    GcnDims dims{.input = 3, .embed = 4, .h1 = 4, .h2 = 4, .h3 = 2};
    Rng rng(10);
    std::vector<gcn::GcnSample> samples;
    for (int s = 0; s < 8; ++s) {
        gcn::GcnSample sample;
        sample.a_hat = random_a_hat(rng, 4);
        sample.x = Eigen::MatrixXd::Random(4, 3);
        sample.anchor_i = 0;
        sample.anchor_j = 1;
        sample.label = 1;
        samples.push_back(std::move(sample));
    }
    gcn::TrainConfig cfg;
    cfg.dims = dims;
    cfg.batch_size = 8;
    cfg.max_epochs = 30;
    cfg.dev_fraction = 0.0;
    cfg.seed = 11;
    auto result = gcn::gcn_train(samples, cfg);
    std::vector<double> losses;
    for (const auto& row : result.log)
        if (row.split == "train") losses.push_back(row.loss);
    REQUIRE(losses.size() >= 2);
    CHECK(losses.back() < losses.front());
    // single-direction gradient: every step decreases the batch loss
    for (std::size_t i = 1; i < losses.size(); ++i) REQUIRE(losses[i] <= losses[i - 1] + 1e-9);
}

TEST_CASE("label window honors the horizon and threshold") {
    std::vector<graph::ScoredInteraction> events = {
        {"a", "b", 1000 + 2 * 3600, 2.5},   // conflicting at +2h
        {"a", "b", 1000 + 25 * 3600, 2.5},  // conflicting at +25h
        {"a", "c", 1000 + 3600, 0.0},       // peaceful
    };
    CHECK(samples::label_pair("a", "b", events, 1000, samples::kDay, 1.0) == 1);
    CHECK(samples::label_pair("a", "b", {events[1]}, 1000, samples::kDay, 1.0) == 0);
    CHECK(samples::label_pair("a", "c", events, 1000, samples::kDay, 1.0) == 0);
    CHECK(samples::label_pair("b", "a", events, 1000, samples::kDay, 1.0) == 1);  // symmetric
}
