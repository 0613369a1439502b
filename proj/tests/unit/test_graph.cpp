#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "conflictforge/dynamics.hpp"
#include "conflictforge/graph.hpp"
#include "conflictforge/rng.hpp"

using namespace conflictforge;
using graph::EngagementGraph;
using graph::ScoredInteraction;

namespace {

EngagementGraph triangle() {
    EngagementGraph g;
    g.add_interaction("a", "b", 10, 1.0);
    g.add_interaction("b", "c", 11, 2.0);
    g.add_interaction("a", "c", 12, 3.0);
    return g;
}

EngagementGraph random_graph(Rng& rng, int n, double p_edge) {
    EngagementGraph g;
    for (int i = 0; i < n; ++i) g.add_user("u" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p_edge))
                g.add_interaction("u" + std::to_string(i), "u" + std::to_string(j),
                                  100 + i + j, rng.uniform(0.0, 4.0));
    return g;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    // power iteration on M^2 (positive semidefinite for symmetric M)
    Eigen::MatrixXd sq = m * m;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd next = sq * v;
        double norm = next.norm();
        if (norm < 1e-300) return 0.0;
        next /= norm;
        lambda = norm;
        v = next;
    }
    return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("edge weight is the mean conflict over interactions") {
    EngagementGraph g;
    g.add_interaction("a", "b", 10, 2.0);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edges()[0].weight() == 2.0);

    g.add_interaction("b", "a", 20, 0.0);
    g.add_interaction("a", "b", 30, 4.0);
    CHECK(g.edge_count() == 1);
    CHECK(g.edges()[0].weight() == 2.0);
    CHECK(g.edges()[0].events.size() == 3);
}

TEST_CASE("pairwise interactions of three users form a triangle") {
    auto g = triangle();
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
    // adjacency oracle by enumeration
    for (const auto& a : {"a", "b", "c"})
        for (const auto& b : {"a", "b", "c"}) {
            if (std::string(a) == b) continue;
            CHECK(g.edge_between(g.user_index(a), g.user_index(b)) != nullptr);
        }
}

TEST_CASE("self-interactions are ignored") {
    EngagementGraph g;
    g.add_interaction("a", "a", 10, 1.0);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("enclosing subgraph keeps only nodes near both anchors") {
    // path a - i - j - b: with dis_max 1 only the anchors survive
    EngagementGraph g;
    g.add_interaction("a", "i", 1, 0.5);
    g.add_interaction("i", "j", 2, 0.5);
    g.add_interaction("j", "b", 3, 0.5);
    auto sub = graph::enclosing_subgraph(g, g.user_index("i"), g.user_index("j"), 1, 100);
    std::set<std::string> names;
    for (int v : sub.nodes) names.insert(g.users()[v]);
    CHECK(names == std::set<std::string>{"i", "j"});
    CHECK(sub.adjacency(0, 1) == 0.5);
}

TEST_CASE("saturated dis_max returns the intersection of components") {
    auto g = triangle();
    g.add_interaction("x", "y", 20, 1.0);  // separate component
    auto sub = graph::enclosing_subgraph(g, g.user_index("a"), g.user_index("b"), 10, 100);
    CHECK(sub.nodes.size() == 3);
}

TEST_CASE("disconnected anchors yield only the anchor pair with no edge") {
    EngagementGraph g;
    g.add_interaction("a", "b", 1, 1.0);
    g.add_interaction("x", "y", 2, 1.0);
    auto sub = graph::enclosing_subgraph(g, g.user_index("a"), g.user_index("x"), 5, 100);
    REQUIRE(sub.nodes.size() == 2);
    CHECK(sub.adjacency.cwiseAbs().sum() == 0.0);
}

TEST_CASE("node cap keeps closest nodes by combined distance then id") {
    EngagementGraph g;
    // anchors plus a ring of neighbors at distance 1 from both
    for (int k = 0; k < 6; ++k) {
        std::string mid = "m" + std::to_string(k);
        g.add_interaction("a", mid, 10 + k, 1.0);
        g.add_interaction(mid, "b", 20 + k, 1.0);
    }
    auto sub = graph::enclosing_subgraph(g, g.user_index("a"), g.user_index("b"), 2, 4);
    REQUIRE(sub.nodes.size() == 4);
    CHECK(g.users()[sub.nodes[0]] == "a");
    CHECK(g.users()[sub.nodes[1]] == "b");
    // ties broken by node id: the first two mids created win
    CHECK(g.users()[sub.nodes[2]] == "m0");
    CHECK(g.users()[sub.nodes[3]] == "m1");
}

TEST_CASE("subgraph extraction is deterministic") {
    Rng rng(77);
    auto g = random_graph(rng, 30, 0.2);
    auto s1 = graph::enclosing_subgraph(g, 0, 1, 3, 20);
    auto s2 = graph::enclosing_subgraph(g, 0, 1, 3, 20);
    CHECK(s1.nodes == s2.nodes);
    CHECK(s1.adjacency == s2.adjacency);
}

TEST_CASE("two-node normalized adjacency is the exchange matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, 3.7, 3.7, 0.0;
    Eigen::MatrixXd norm = graph::normalized_adjacency(a);
    CHECK(norm(0, 0) == 0.0);
    CHECK(norm(0, 1) == Catch::Approx(1.0).margin(1e-12));
    CHECK(norm(1, 0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(norm(1, 1) == 0.0);
}

TEST_CASE("isolated nodes keep zero rows") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = a(1, 0) = 2.0;
    Eigen::MatrixXd norm = graph::normalized_adjacency(a);
    CHECK(norm.row(2).cwiseAbs().sum() == 0.0);
    CHECK(norm.col(2).cwiseAbs().sum() == 0.0);
}

TEST_CASE("negative weights are rejected") {
    Eigen::MatrixXd a(2, 2);
    a << 0.0, -1.0, -1.0, 0.0;
    CHECK_THROWS_AS(graph::normalized_adjacency(a), std::invalid_argument);
}

TEST_CASE("normalized adjacency is symmetric with spectral radius at most one") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.index(49));
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.bernoulli(0.3)) a(i, j) = a(j, i) = rng.uniform(0.01, 5.0);
        Eigen::MatrixXd norm = graph::normalized_adjacency(a);
        REQUIRE((norm - norm.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE(spectral_radius(norm) <= 1.0 + 1e-9);
    }
}

TEST_CASE("snapshots grow monotonically and include the boundary") {
    EngagementGraph g;
    g.add_interaction("a", "b", 100, 1.0);
    g.add_interaction("b", "c", 200, 1.0);
    g.add_interaction("c", "d", 300, 1.0);

    auto series = graph::snapshots(g, 100, 100, 3);
    REQUIRE(series.graphs.size() == 3);
    CHECK(series.graphs[0].edge_count() == 1);  // boundary event at t=100 included
    CHECK(series.graphs[1].edge_count() == 2);
    CHECK(series.graphs[2].edge_count() == 3);

    // edges of an earlier snapshot appear in every later one
    for (std::size_t k = 1; k < series.graphs.size(); ++k) {
        const auto& prev = series.graphs[k - 1];
        const auto& next = series.graphs[k];
        for (const auto& e : prev.edges()) {
            int a = next.user_index(prev.users()[e.a]);
            int b = next.user_index(prev.users()[e.b]);
            REQUIRE(a >= 0);
            REQUIRE(b >= 0);
            CHECK(next.edge_between(a, b) != nullptr);
        }
    }
}

TEST_CASE("snapshot count matches the requested series length") {
    auto g = triangle();
    auto series = graph::snapshots(g, 0, 86400, 25);
    CHECK(series.graphs.size() == 25);
}

TEST_CASE("label propagation separates two cliques joined by one edge") {
    EngagementGraph g;
    auto clique = [&](const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j)
                g.add_interaction(names[i], names[j], 10, 0.0);
    };
    clique({"a1", "a2", "a3", "a4", "a5"});
    clique({"b1", "b2", "b3", "b4", "b5"});
    g.add_interaction("a1", "b1", 50, 3.0);  // conflicting bridge
    auto labels = dynamics::detect_clusters(g, 1.0);
    std::set<int> distinct(labels.begin(), labels.end());
    CHECK(distinct.size() == 2);
    CHECK(labels[g.user_index("a1")] == labels[g.user_index("a5")]);
    CHECK(labels[g.user_index("b1")] == labels[g.user_index("b5")]);
    CHECK(labels[g.user_index("a1")] != labels[g.user_index("b1")]);
}

TEST_CASE("a single clique collapses to one cluster") {
    EngagementGraph g;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            g.add_interaction("u" + std::to_string(i), "u" + std::to_string(j), 10, 0.0);
    auto labels = dynamics::detect_clusters(g, 1.0);
    std::set<int> distinct(labels.begin(), labels.end());
    CHECK(distinct.size() == 1);
}

TEST_CASE("isolated nodes stay in singleton clusters") {
    EngagementGraph g;
    g.add_user("lonely");
    g.add_user("alone");
    g.add_interaction("x", "y", 10, 0.0);
    auto labels = dynamics::detect_clusters(g, 1.0);
    CHECK(labels[g.user_index("lonely")] != labels[g.user_index("alone")]);
    CHECK(labels[g.user_index("x")] == labels[g.user_index("y")]);
}

namespace {

// archetypes: two internally peaceful or conflicting cliques with a
// controlled boundary
EngagementGraph archetype(double intra_cf, double inter_cf) {
    EngagementGraph g;
    auto clique = [&](const std::string& prefix, double cf) {
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                g.add_interaction(prefix + std::to_string(i), prefix + std::to_string(j), 10, cf);
    };
    clique("p", intra_cf);
    clique("q", 0.0);
    for (int i = 0; i < 4; ++i)
        g.add_interaction("p" + std::to_string(i), "q" + std::to_string(i), 20, inter_cf);
    return g;
}

std::vector<int> cluster_of_prefix(const EngagementGraph& g, char prefix) {
    std::vector<int> members;
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (g.users()[i][0] == prefix) members.push_back(static_cast<int>(i));
    return members;
}

}  // namespace

TEST_CASE("cluster typing recovers the three archetypes") {
    const double tau = 1.0;
    // Type I: peaceful inside, peaceful boundary
    auto g1 = archetype(0.0, 0.0);
    CHECK(dynamics::classify_cluster(cluster_of_prefix(g1, 'p'), g1, tau) ==
          dynamics::ClusterType::I);
    // Type II: conflicting inside
    auto g2 = archetype(3.0, 3.0);
    CHECK(dynamics::classify_cluster(cluster_of_prefix(g2, 'p'), g2, tau) ==
          dynamics::ClusterType::II);
    // Type III: peaceful inside, hostile boundary
    auto g3 = archetype(0.0, 3.0);
    CHECK(dynamics::classify_cluster(cluster_of_prefix(g3, 'p'), g3, tau) ==
          dynamics::ClusterType::III);
}

TEST_CASE("clusters without any edge stay untyped") {
    EngagementGraph g;
    g.add_user("solo");
    CHECK(dynamics::classify_cluster({0}, g, 1.0) == dynamics::ClusterType::Untyped);
}
