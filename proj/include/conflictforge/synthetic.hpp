#pragma once
// Synthetic benchmark generators: a planted two-camp interaction process
// with camp-correlated node features, and linear regression data with a
// known sparse law.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conflictforge/graph.hpp"
#include "conflictforge/rng.hpp"

namespace conflictforge::synthetic {

struct PlantedConfig {
    int n_users = 200;
    int days = 12;
    int pairs_per_day = 400;
    double p_conflict_cross = 0.9;   // across camps
    double p_conflict_within = 0.1;  // inside a camp
    double conflicting_cf = 2.0;
    double peaceful_cf = 0.0;
    int feature_dim = 16;
    double feature_shift = 1.0;  // camp mean separation
    double feature_noise = 1.0;
    std::uint64_t seed = 7;
};

struct PlantedWorld {
    std::vector<int> camp;                              // per user
    Eigen::MatrixXd node_features;                      // n_users x feature_dim
    std::vector<graph::ScoredInteraction> events;       // time-ordered
    std::int64_t start_time = 1'500'000'000;

    std::string user_name(int u) const { return "u" + std::to_string(u); }
};

// Users split into two latent camps; every day a batch of random pairs
// interacts, conflicting with a camp-dependent probability. Node features
// are camp-shifted Gaussian noise.
inline PlantedWorld planted_conflict_world(const PlantedConfig& cfg = {}) {
    Rng rng(cfg.seed);
    PlantedWorld world;
    world.camp.resize(cfg.n_users);
    for (int u = 0; u < cfg.n_users; ++u) world.camp[u] = u % 2;

    world.node_features.resize(cfg.n_users, cfg.feature_dim);
    for (int u = 0; u < cfg.n_users; ++u) {
        double shift = world.camp[u] == 0 ? cfg.feature_shift : -cfg.feature_shift;
        for (int f = 0; f < cfg.feature_dim; ++f)
            world.node_features(u, f) = rng.normal(shift, cfg.feature_noise);
    }

    for (int day = 0; day < cfg.days; ++day) {
        for (int p = 0; p < cfg.pairs_per_day; ++p) {
            int a = static_cast<int>(rng.index(cfg.n_users));
            int b = static_cast<int>(rng.index(cfg.n_users));
            if (a == b) b = (b + 1) % cfg.n_users;
            bool cross = world.camp[a] != world.camp[b];
            double p_conf = cross ? cfg.p_conflict_cross : cfg.p_conflict_within;
            graph::ScoredInteraction e;
            e.user_a = world.user_name(a);
            e.user_b = world.user_name(b);
            e.time = world.start_time + static_cast<std::int64_t>(day) * 86400 +
                     static_cast<std::int64_t>(rng.index(86400));
            e.cf = rng.bernoulli(p_conf) ? cfg.conflicting_cf : cfg.peaceful_cf;
            world.events.push_back(std::move(e));
        }
    }
    std::sort(world.events.begin(), world.events.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });
    return world;
}

struct LinearData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::VectorXd true_coef;
};

// y = X b + intercept + noise with k_true nonzero coefficients, noise scaled
// to the requested signal-to-noise ratio. intercept_sigmas shifts the
// targets away from zero in units of the signal spread, the regime of
// non-negative conflict scores.
inline LinearData linear_regression_data(int n, int d, int k_true, double snr,
                                         std::uint64_t seed, double intercept_sigmas = 0.0) {
    Rng rng(seed);
    LinearData data;
    data.x.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) data.x(i, j) = rng.normal();
    data.true_coef = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < k_true; ++k) data.true_coef(k) = (k % 2 == 0 ? 1.0 : -1.0) * (3.0 + k);
    Eigen::VectorXd signal = data.x * data.true_coef;
    double signal_var = (signal.array() - signal.mean()).square().mean();
    double noise_sd = std::sqrt(signal_var / snr);
    data.y = signal.array() + intercept_sigmas * std::sqrt(signal_var);
    for (int i = 0; i < n; ++i) data.y(i) += rng.normal(0.0, noise_sd);
    return data;
}

}  // namespace conflictforge::synthetic
