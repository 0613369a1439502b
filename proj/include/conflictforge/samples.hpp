#pragma once
// Training-sample construction for inter-user conflict prediction: 24-hour
// labeling, enclosing-subgraph samples for the graph model and flat feature
// vectors for the SVMs. Features only ever see events at or before the
// prediction instant; labels only see the following horizon.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "conflictforge/features.hpp"
#include "conflictforge/gcn.hpp"
#include "conflictforge/graph.hpp"
#include "conflictforge/rng.hpp"

namespace conflictforge::samples {

using features::FeatureMask;
using features::PairFeatures;
using features::SourceIndex;
using features::UserHistory;
using graph::EngagementGraph;
using graph::ScoredInteraction;

constexpr std::int64_t kDay = 86400;

// 1 iff the pair has an interaction with cf >= tau inside (as_of, as_of +
// horizon].
inline int label_pair(const std::string& user_i, const std::string& user_j,
                      const std::vector<ScoredInteraction>& events, std::int64_t as_of,
                      std::int64_t horizon = kDay, double tau = 1.0) {
    for (const auto& e : events) {
        if (e.time <= as_of || e.time > as_of + horizon) continue;
        bool same_pair = (e.user_a == user_i && e.user_b == user_j) ||
                         (e.user_a == user_j && e.user_b == user_i);
        if (same_pair && e.cf >= tau) return 1;
    }
    return 0;
}

struct HarnessConfig {
    double tau = 1.0;
    std::int64_t horizon = kDay;
    int dis_max = 100;
    int node_cap = 5000;
    int pairs_per_subgraph = 16;
    std::uint64_t seed = 0;
};

struct LabeledPair {
    std::string user_i, user_j;
    std::int64_t as_of = 0;
    int label = 0;
    bool never_met = false;
};

// Pairs that interact inside each snapshot's horizon window, labeled by
// whether any of those interactions is conflicting, balanced by
// down-sampling the majority label per snapshot.
inline std::vector<LabeledPair> candidate_pairs(const std::vector<ScoredInteraction>& events,
                                                const std::vector<std::int64_t>& snapshot_times,
                                                const HarnessConfig& cfg) {
    std::vector<LabeledPair> out;
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    for (std::int64_t t : snapshot_times) {
        std::map<std::pair<std::string, std::string>, int> window_label;
        std::set<std::pair<std::string, std::string>> met_before;
        for (const auto& e : events) {
            auto key = e.user_a < e.user_b ? std::make_pair(e.user_a, e.user_b)
                                           : std::make_pair(e.user_b, e.user_a);
            if (e.time <= t) met_before.insert(key);
            else if (e.time <= t + cfg.horizon) {
                int& lab = window_label[key];
                if (e.cf >= cfg.tau) lab = 1;
            }
        }
        std::vector<LabeledPair> pos, neg;
        for (const auto& [key, lab] : window_label) {
            LabeledPair p;
            p.user_i = key.first;
            p.user_j = key.second;
            p.as_of = t;
            p.label = lab;
            p.never_met = met_before.count(key) == 0;
            (lab == 1 ? pos : neg).push_back(std::move(p));
        }
        std::size_t keep = std::min(pos.size(), neg.size());
        rng.shuffle(pos);
        rng.shuffle(neg);
        pos.resize(keep);
        neg.resize(keep);
        for (auto& p : pos) out.push_back(std::move(p));
        for (auto& p : neg) out.push_back(std::move(p));
    }
    return out;
}

// Node features for a subgraph: caller-provided per-user vectors (all built
// from data at or before as_of).
template <typename NodeFeatureFn>
gcn::GcnSample make_gcn_sample(const EngagementGraph& snapshot_graph, const LabeledPair& pair,
                               const HarnessConfig& cfg, NodeFeatureFn&& node_features,
                               int feature_dim) {
    gcn::GcnSample sample;
    sample.label = pair.label;
    sample.never_met = pair.never_met;

    int vi = snapshot_graph.user_index(pair.user_i);
    int vj = snapshot_graph.user_index(pair.user_j);
    if (vi < 0 || vj < 0 || vi == vj) {
        // a never-seen user: degenerate two-node subgraph with no edges
        sample.a_hat = Eigen::MatrixXd::Zero(2, 2);
        sample.x = Eigen::MatrixXd::Zero(2, feature_dim);
        if (vi >= 0) sample.x.row(0) = node_features(pair.user_i).transpose();
        if (vj >= 0) sample.x.row(1) = node_features(pair.user_j).transpose();
        sample.anchor_i = 0;
        sample.anchor_j = 1;
        return sample;
    }

    auto sub = graph::enclosing_subgraph(snapshot_graph, vi, vj, cfg.dis_max, cfg.node_cap);
    sample.a_hat = graph::normalized_adjacency(sub.adjacency);
    sample.x.resize(static_cast<Eigen::Index>(sub.nodes.size()), feature_dim);
    for (std::size_t k = 0; k < sub.nodes.size(); ++k)
        sample.x.row(static_cast<Eigen::Index>(k)) =
            node_features(snapshot_graph.users()[sub.nodes[k]]).transpose();
    sample.anchor_i = sub.anchor_i;
    sample.anchor_j = sub.anchor_j;
    return sample;
}

// Flat SVM sample: masked pair-feature vector plus label.
struct SvmPairSample {
    std::vector<double> features;
    int label = 0;  // 0/1
    bool never_met = false;
};

}  // namespace conflictforge::samples
