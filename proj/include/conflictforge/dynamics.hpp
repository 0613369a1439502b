#pragma once
// Conflict dynamics over the engagement graph: community detection, cluster
// typing, depth profiles and per-source conflict series.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conflictforge/conflict.hpp"
#include "conflictforge/corpus.hpp"
#include "conflictforge/graph.hpp"

namespace conflictforge::dynamics {

using graph::EngagementGraph;

// Deterministic label propagation. Edges enter as affinities: 1 for
// non-conflicting edges (weight < tau), 0.1 for conflicting ones, so
// conflicting links bind communities weakly. Labels start as node indices;
// nodes are swept in index order, adopting the label with the largest
// affinity mass (smallest label on ties), for at most 100 sweeps.
inline std::vector<int> detect_clusters(const EngagementGraph& g, double tau) {
    const int n = static_cast<int>(g.node_count());
    std::vector<int> label(n);
    for (int i = 0; i < n; ++i) label[i] = i;

    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
            std::map<int, double> mass;
            for (auto [v, ei] : g.neighbors(u)) {
                double affinity = g.edges()[ei].weight() < tau ? 1.0 : 0.1;
                mass[label[v]] += affinity;
            }
            if (mass.empty()) continue;
            int best = label[u];
            double best_mass = -1.0;
            for (const auto& [lab, m] : mass) {
                if (m > best_mass) {
                    best_mass = m;
                    best = lab;
                }
            }
            if (best != label[u]) {
                label[u] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }
    // canonicalize: cluster id = smallest member index
    std::unordered_map<int, int> canon;
    for (int i = 0; i < n; ++i) {
        auto it = canon.find(label[i]);
        if (it == canon.end()) canon[label[i]] = i;
    }
    for (int i = 0; i < n; ++i) label[i] = canon[label[i]];
    return label;
}

inline std::vector<std::vector<int>> cluster_members(const std::vector<int>& labels) {
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i)
        groups[labels[i]].push_back(static_cast<int>(i));
    std::vector<std::vector<int>> out;
    for (auto& [id, members] : groups) out.push_back(std::move(members));
    return out;
}

enum class ClusterType { I, II, III, Untyped };

inline std::string cluster_type_name(ClusterType t) {
    switch (t) {
        case ClusterType::I: return "I";
        case ClusterType::II: return "II";
        case ClusterType::III: return "III";
        default: return "untyped";
    }
}

// Types a cluster from the conflicting share of its internal and boundary
// edges (edge conflicting iff weight >= tau):
//   Type I    peaceful inside and out      f_in < 1-majority, f_out < 1-majority
//   Type II   conflicting inside           f_in >= majority
//   Type III  peaceful inside, hostile out f_in < 1-majority, f_out >= majority
inline ClusterType classify_cluster(const std::vector<int>& members, const EngagementGraph& g,
                                    double tau, double majority = 0.7) {
    std::unordered_set<int> inside(members.begin(), members.end());
    int intra = 0, intra_conf = 0, inter = 0, inter_conf = 0;
    for (const auto& e : g.edges()) {
        bool a_in = inside.count(e.a) > 0;
        bool b_in = inside.count(e.b) > 0;
        if (!a_in && !b_in) continue;
        bool conflicting = e.weight() >= tau;
        if (a_in && b_in) {
            ++intra;
            intra_conf += conflicting ? 1 : 0;
        } else {
            ++inter;
            inter_conf += conflicting ? 1 : 0;
        }
    }
    if (intra + inter == 0) return ClusterType::Untyped;
    double f_in = intra > 0 ? static_cast<double>(intra_conf) / intra : 0.0;
    double f_out = inter > 0 ? static_cast<double>(inter_conf) / inter : 0.0;
    const double minority = 1.0 - majority;
    if (f_in >= majority) return ClusterType::II;
    if (f_in < minority && f_out >= majority) return ClusterType::III;
    if (f_in < minority && f_out < minority) return ClusterType::I;
    return ClusterType::Untyped;
}

struct ClusterRow {
    int cluster_id = 0;
    std::vector<int> members;
    double intra_conflict_fraction = 0.0;
    double inter_conflict_fraction = 0.0;
    ClusterType type = ClusterType::Untyped;
};

inline std::vector<ClusterRow> cluster_report(const EngagementGraph& g, double tau,
                                              double majority = 0.7) {
    auto labels = detect_clusters(g, tau);
    std::vector<ClusterRow> rows;
    for (auto& members : cluster_members(labels)) {
        ClusterRow row;
        row.cluster_id = members.front();
        row.type = classify_cluster(members, g, tau, majority);
        std::unordered_set<int> inside(members.begin(), members.end());
        int intra = 0, intra_conf = 0, inter = 0, inter_conf = 0;
        for (const auto& e : g.edges()) {
            bool a_in = inside.count(e.a) > 0, b_in = inside.count(e.b) > 0;
            if (!a_in && !b_in) continue;
            bool conflicting = e.weight() >= tau;
            if (a_in && b_in) { ++intra; intra_conf += conflicting; }
            else { ++inter; inter_conf += conflicting; }
        }
        row.intra_conflict_fraction = intra > 0 ? static_cast<double>(intra_conf) / intra : 0.0;
        row.inter_conflict_fraction = inter > 0 ? static_cast<double>(inter_conf) / inter : 0.0;
        row.members = std::move(members);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct DepthStats {
    double mean = 0.0;
    double variance = 0.0;  // population variance
    std::size_t count = 0;
};

// Per-depth statistics of parent-child conflict, normalized per common term.
// A pair at depths (i, i+1) is recorded at depth i.
template <typename TsLookup>
std::map<int, DepthStats> depth_conflict_profile(const corpus::CorpusStore& store,
                                                 TsLookup&& ts_of_comment) {
    std::map<int, std::vector<double>> samples;
    for (const auto& thread : store.threads()) {
        std::unordered_map<std::string, int> depth;
        for (const auto& cid : thread.comment_ids) {
            const corpus::Comment* c = store.comment(cid);
            const corpus::Comment* parent = nullptr;
            if (c->parent_id && *c->parent_id != thread.id) {
                parent = store.comment(*c->parent_id);
                if (parent && parent->thread_id != thread.id) parent = nullptr;
            }
            if (!parent) {
                depth[cid] = 0;
                continue;
            }
            int pd = depth.count(parent->id) ? depth[parent->id] : 0;
            depth[cid] = pd + 1;
            auto ts_parent = ts_of_comment(parent->id);
            auto ts_child = ts_of_comment(c->id);
            if (!ts_parent || !ts_child) continue;
            samples[pd].push_back(conflict::normalized_pair_conflict(*ts_parent, *ts_child).value);
        }
    }
    std::map<int, DepthStats> out;
    for (const auto& [d, values] : samples) {
        DepthStats st;
        st.count = values.size();
        for (double v : values) st.mean += v;
        st.mean /= static_cast<double>(values.size());
        for (double v : values) st.variance += (v - st.mean) * (v - st.mean);
        st.variance /= static_cast<double>(values.size());
        out[d] = st;
    }
    return out;
}

struct SourceSeriesRow {
    std::string source;
    std::int64_t window_start = 0;
    std::optional<double> mean_nc;  // absent for gap windows
    std::size_t n_articles = 0;
};

struct SourceSummary {
    std::string source;
    double max_nc = 0.0;
    double min_nc = 0.0;
    double mean_nc = 0.0;
    std::size_t n_articles = 0;
};

struct SourceConflictSeries {
    std::vector<SourceSeriesRow> rows;
    std::vector<SourceSummary> summaries;
};

// Windowed mean news-conflict per source. Empty windows between a source's
// first and last article emit gap rows with no value.
inline SourceConflictSeries source_conflict_series(
    const std::vector<std::pair<const corpus::Article*, double>>& scored_articles,
    std::int64_t window = 86400) {
    if (window <= 0) throw std::invalid_argument("source_conflict_series: window must be positive");
    SourceConflictSeries out;
    if (scored_articles.empty()) return out;

    std::int64_t t0 = scored_articles.front().first->posted_utc;
    for (const auto& [a, nc] : scored_articles) t0 = std::min(t0, a->posted_utc);

    struct Bucket { double sum = 0.0; std::size_t n = 0; };
    std::map<std::string, std::map<std::int64_t, Bucket>> per_source;
    std::map<std::string, SourceSummary> summary;
    for (const auto& [a, nc] : scored_articles) {
        std::int64_t k = (a->posted_utc - t0) / window;
        auto& b = per_source[a->source][k];
        b.sum += nc;
        ++b.n;
        auto [it, inserted] = summary.try_emplace(a->source);
        SourceSummary& s = it->second;
        if (inserted) {
            s.source = a->source;
            s.max_nc = s.min_nc = nc;
        } else {
            s.max_nc = std::max(s.max_nc, nc);
            s.min_nc = std::min(s.min_nc, nc);
        }
        s.mean_nc += nc;
        ++s.n_articles;
    }
    for (auto& [source, buckets] : per_source) {
        std::int64_t first = buckets.begin()->first;
        std::int64_t last = buckets.rbegin()->first;
        for (std::int64_t k = first; k <= last; ++k) {
            SourceSeriesRow row;
            row.source = source;
            row.window_start = t0 + k * window;
            auto it = buckets.find(k);
            if (it != buckets.end()) {
                row.mean_nc = it->second.sum / static_cast<double>(it->second.n);
                row.n_articles = it->second.n;
            }
            out.rows.push_back(std::move(row));
        }
    }
    for (auto& [source, s] : summary) {
        s.mean_nc /= static_cast<double>(s.n_articles);
        out.summaries.push_back(s);
    }
    return out;
}

struct SourceShare {
    std::string source;
    double percentage = 0.0;
    std::size_t participations = 0;
};

struct ClusterSourceRow {
    int cluster_id = 0;
    std::size_t cluster_size = 0;
    std::vector<SourceShare> shares;  // descending by percentage
};

// Maps the largest clusters of a snapshot to the news sources whose
// discussions their members joined within the past `window` seconds.
// Members with no recent participation do not enter the denominator.
inline std::vector<ClusterSourceRow> source_cluster_mapping(
    const EngagementGraph& snapshot_graph, const std::vector<int>& labels,
    const corpus::CorpusStore& store, std::int64_t snapshot_t, std::int64_t window = 86400,
    std::size_t top_k = 3) {
    // user -> per-source participation count over recent discussions
    std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> recent;
    for (const auto& thread : store.threads()) {
        if (thread.created_utc > snapshot_t || thread.created_utc < snapshot_t - window) continue;
        const corpus::Article* a = store.article(thread.article_id);
        if (!a) continue;
        std::unordered_set<std::string> participants;
        for (const auto& cid : thread.comment_ids) participants.insert(store.comment(cid)->author);
        for (const auto& user : participants) ++recent[user][a->source];
    }

    auto groups = cluster_members(labels);
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.front() < b.front();
    });
    if (groups.size() > top_k) groups.resize(top_k);

    std::vector<ClusterSourceRow> out;
    for (const auto& members : groups) {
        ClusterSourceRow row;
        row.cluster_id = members.front();
        row.cluster_size = members.size();
        std::map<std::string, std::size_t> counts;
        std::size_t total = 0;
        for (int m : members) {
            auto it = recent.find(snapshot_graph.users()[m]);
            if (it == recent.end()) continue;
            for (const auto& [source, n] : it->second) {
                counts[source] += n;
                total += n;
            }
        }
        for (const auto& [source, n] : counts) {
            SourceShare share;
            share.source = source;
            share.participations = n;
            share.percentage = total > 0 ? 100.0 * static_cast<double>(n) / total : 0.0;
            row.shares.push_back(std::move(share));
        }
        std::sort(row.shares.begin(), row.shares.end(), [](const auto& a, const auto& b) {
            if (a.percentage != b.percentage) return a.percentage > b.percentage;
            return a.source < b.source;
        });
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace conflictforge::dynamics
