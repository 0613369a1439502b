#pragma once
// Conflict-weighted engagement graph: construction from interactions,
// temporal snapshots, enclosing subgraphs and degree-normalized adjacency.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "conflictforge/common.hpp"

namespace conflictforge::graph {

struct EdgeEvent {
    std::int64_t time = 0;
    double cf = 0.0;
};

struct Edge {
    int a = 0, b = 0;  // node indices, a < b
    std::vector<EdgeEvent> events;

    double weight() const {
        double sum = 0.0;
        for (const auto& e : events) sum += e.cf;
        return events.empty() ? 0.0 : sum / static_cast<double>(events.size());
    }
    std::int64_t first_time() const { return events.front().time; }
    std::int64_t last_time() const { return events.back().time; }
};

// Undirected multigraph over users; each stored edge keeps the full event
// list and weights by mean conflict. Immutable once built.
class EngagementGraph {
public:
    int add_user(const std::string& user) {
        auto it = user_index_.find(user);
        if (it != user_index_.end()) return it->second;
        int idx = static_cast<int>(users_.size());
        user_index_[user] = idx;
        users_.push_back(user);
        adjacency_.emplace_back();
        return idx;
    }

    int user_index(const std::string& user) const {
        auto it = user_index_.find(user);
        return it == user_index_.end() ? -1 : it->second;
    }

    void add_interaction(const std::string& user_a, const std::string& user_b, std::int64_t time,
                         double cf) {
        int ia = add_user(user_a);
        int ib = add_user(user_b);
        if (ia == ib) return;
        if (ia > ib) std::swap(ia, ib);
        auto key = std::make_pair(ia, ib);
        auto it = edge_index_.find(key);
        if (it == edge_index_.end()) {
            it = edge_index_.emplace(key, static_cast<int>(edges_.size())).first;
            edges_.push_back(Edge{ia, ib, {}});
            adjacency_[ia].push_back(it->second);
            adjacency_[ib].push_back(it->second);
        }
        edges_[it->second].events.push_back(EdgeEvent{time, cf});
    }

    std::size_t node_count() const { return users_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& users() const { return users_; }
    const std::vector<Edge>& edges() const { return edges_; }

    const Edge* edge_between(int a, int b) const {
        if (a > b) std::swap(a, b);
        auto it = edge_index_.find({a, b});
        return it == edge_index_.end() ? nullptr : &edges_[it->second];
    }

    // (neighbor, edge index) pairs, neighbor indices ascending.
    std::vector<std::pair<int, int>> neighbors(int node) const {
        std::vector<std::pair<int, int>> out;
        for (int ei : adjacency_[node]) {
            const Edge& e = edges_[ei];
            out.emplace_back(e.a == node ? e.b : e.a, ei);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Restriction to events with time <= t. Nodes keep their identity; nodes
    // with no remaining interaction are excluded.
    EngagementGraph snapshot(std::int64_t t) const {
        EngagementGraph out;
        for (const auto& e : edges_) {
            for (const auto& ev : e.events) {
                if (ev.time <= t) out.add_interaction(users_[e.a], users_[e.b], ev.time, ev.cf);
            }
        }
        return out;
    }

private:
    std::vector<std::string> users_;
    std::unordered_map<std::string, int> user_index_;
    std::vector<Edge> edges_;
    std::map<std::pair<int, int>, int> edge_index_;
    std::vector<std::vector<int>> adjacency_;  // node -> edge indices
};

// Assembles the graph from (user_a, user_b, time) interactions scored by the
// caller. `scored` supplies one conflict value per interaction.
struct ScoredInteraction {
    std::string user_a;
    std::string user_b;
    std::int64_t time = 0;
    double cf = 0.0;
};

inline EngagementGraph build_graph(const std::vector<ScoredInteraction>& interactions) {
    EngagementGraph g;
    for (const auto& i : interactions) g.add_interaction(i.user_a, i.user_b, i.time, i.cf);
    return g;
}

struct SnapshotSeries {
    std::vector<std::int64_t> times;
    std::vector<EngagementGraph> graphs;
};

inline SnapshotSeries snapshots(const EngagementGraph& graph, std::int64_t start,
                                std::int64_t step, int count) {
    if (step <= 0) throw std::invalid_argument("snapshots: step must be positive");
    SnapshotSeries out;
    for (int k = 0; k < count; ++k) {
        std::int64_t t = start + static_cast<std::int64_t>(k) * step;
        out.times.push_back(t);
        out.graphs.push_back(graph.snapshot(t));
    }
    return out;
}

struct EnclosingSubgraph {
    std::vector<int> nodes;   // global node ids, anchors first
    Eigen::MatrixXd adjacency;  // symmetric edge weights, zero diagonal
    int anchor_i = 0;         // local index of the first anchor (always 0)
    int anchor_j = 1;         // local index of the second anchor (always 1)
};

namespace detail {

inline std::vector<int> bfs_distances(const EngagementGraph& g, int source, int limit) {
    std::vector<int> dist(g.node_count(), std::numeric_limits<int>::max());
    dist[source] = 0;
    std::deque<int> queue{source};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (dist[u] >= limit) continue;
        for (auto [v, ei] : g.neighbors(u)) {
            if (dist[v] != std::numeric_limits<int>::max()) continue;
            dist[v] = dist[u] + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

}  // namespace detail

// Nodes within dis_max hops of both anchors (dual BFS intersection). Over
// the node cap, nodes are kept by ascending combined anchor distance, ties
// by id; the anchors themselves are always retained.
inline EnclosingSubgraph enclosing_subgraph(const EngagementGraph& graph, int v_i, int v_j,
                                            int dis_max = 100, int node_cap = 5000) {
    const int n = static_cast<int>(graph.node_count());
    if (v_i < 0 || v_i >= n || v_j < 0 || v_j >= n)
        throw std::invalid_argument("enclosing_subgraph: anchor not in graph");
    if (v_i == v_j) throw std::invalid_argument("enclosing_subgraph: anchors must differ");
    if (dis_max < 1) throw std::invalid_argument("enclosing_subgraph: dis_max must be >= 1");
    if (node_cap < 2) throw std::invalid_argument("enclosing_subgraph: node_cap must be >= 2");

    auto dist_i = detail::bfs_distances(graph, v_i, dis_max);
    auto dist_j = detail::bfs_distances(graph, v_j, dis_max);

    std::vector<std::pair<long long, int>> candidates;  // (combined distance, node)
    for (int v = 0; v < n; ++v) {
        if (v == v_i || v == v_j) continue;
        if (dist_i[v] <= dis_max && dist_j[v] <= dis_max)
            candidates.emplace_back(static_cast<long long>(dist_i[v]) + dist_j[v], v);
    }
    std::sort(candidates.begin(), candidates.end());

    std::vector<int> nodes{v_i};
    if (v_j != v_i) nodes.push_back(v_j);
    for (const auto& [d, v] : candidates) {
        if (static_cast<int>(nodes.size()) >= node_cap) break;
        nodes.push_back(v);
    }

    std::unordered_map<int, int> local;
    for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);

    EnclosingSubgraph sub;
    sub.nodes = nodes;
    sub.adjacency = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes.size()),
                                          static_cast<Eigen::Index>(nodes.size()));
    for (const auto& e : graph.edges()) {
        auto ia = local.find(e.a);
        auto ib = local.find(e.b);
        if (ia == local.end() || ib == local.end()) continue;
        double w = e.weight();
        sub.adjacency(ia->second, ib->second) = w;
        sub.adjacency(ib->second, ia->second) = w;
    }
    return sub;
}

// D^{-1/2} A D^{-1/2} with D the weighted-degree diagonal. Zero-degree rows
// get an epsilon degree, leaving their rows zero.
inline Eigen::MatrixXd normalized_adjacency(const Eigen::MatrixXd& adjacency) {
    const Eigen::Index n = adjacency.rows();
    if (adjacency.cols() != n)
        throw std::invalid_argument("normalized_adjacency: matrix must be square");
    if ((adjacency.array() < 0.0).any())
        throw std::invalid_argument("normalized_adjacency: negative edge weight");
    Eigen::VectorXd degree = adjacency.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = degree(i) > 0.0 ? degree(i) : 1e-12;
        inv_sqrt(i) = 1.0 / std::sqrt(d);
    }
    return inv_sqrt.asDiagonal() * adjacency * inv_sqrt.asDiagonal();
}

}  // namespace conflictforge::graph
