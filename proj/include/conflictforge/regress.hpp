#pragma once
// Regression learners: coordinate-descent lasso, linear epsilon-insensitive
// SVR via subgradient descent, and a bagged random forest. All operate on
// dense Eigen matrices and standardize features internally.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conflictforge/rng.hpp"

namespace conflictforge::regress {

struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // 1 for constant columns

    static Standardizer fit(const Eigen::MatrixXd& x) {
        Standardizer s;
        s.mean = x.colwise().mean();
        s.scale.resize(x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            double var = (x.col(j).array() - s.mean(j)).square().mean();
            s.scale(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
        }
        return s;
    }

    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
        return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
    }
};

struct LinearModel {
    Eigen::VectorXd coef;
    double intercept = 0.0;

    double predict(const Eigen::VectorXd& x) const { return coef.dot(x) + intercept; }
    Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const {
        return (x * coef).array() + intercept;
    }
};

struct LassoResult {
    LinearModel model;
    int sweeps = 0;
    std::vector<double> objective_history;  // standardized-problem objective per sweep
};

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Cyclic coordinate descent on (1/2n)||y - Xb||^2 + lambda*||b||_1 with
// standardized columns and centered response. Stops when the largest
// coefficient change in a sweep falls below tol.
inline LassoResult lasso_fit(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y_raw,
                             double lambda, double tol = 1e-8, int max_iter = 1000) {
    if (x_raw.rows() != y_raw.size() || x_raw.rows() == 0)
        throw std::invalid_argument("lasso_fit: shape mismatch or empty input");
    if (!x_raw.allFinite() || !y_raw.allFinite())
        throw std::invalid_argument("lasso_fit: non-finite input");
    if (lambda < 0) throw std::invalid_argument("lasso_fit: negative lambda");

    const auto n = static_cast<double>(x_raw.rows());
    Standardizer sx = Standardizer::fit(x_raw);
    Eigen::MatrixXd x = sx.transform(x_raw);
    double y_mean = y_raw.mean();
    Eigen::VectorXd y = y_raw.array() - y_mean;

    Eigen::VectorXd col_sq(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) col_sq(j) = x.col(j).squaredNorm() / n;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    Eigen::VectorXd residual = y;
    LassoResult result;
    auto objective = [&]() {
        return residual.squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
    };
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (col_sq(j) <= 0.0) continue;
            double rho = x.col(j).dot(residual) / n + col_sq(j) * beta(j);
            double updated = soft_threshold(rho, lambda) / col_sq(j);
            double delta = updated - beta(j);
            if (delta != 0.0) {
                residual -= delta * x.col(j);
                beta(j) = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        result.objective_history.push_back(objective());
        result.sweeps = sweep + 1;
        if (max_delta < tol) break;
    }

    // back to the original scale
    result.model.coef = beta.array() / sx.scale.array();
    result.model.intercept = y_mean - result.model.coef.dot(sx.mean);
    return result;
}

struct SvrConfig {
    double c = 1.0;
    double epsilon = 0.1;
    int epochs = 500;
    double lr = 0.05;
    std::uint64_t seed = 0;
};

// Full-batch subgradient descent on (1/2C)||w||^2 + mean eps-insensitive
// loss over standardized features.
inline LinearModel svr_fit(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y_raw,
                           const SvrConfig& cfg = {}) {
    if (x_raw.rows() != y_raw.size() || x_raw.rows() == 0)
        throw std::invalid_argument("svr_fit: shape mismatch or empty input");
    const auto n = static_cast<double>(x_raw.rows());
    Standardizer sx = Standardizer::fit(x_raw);
    Eigen::MatrixXd x = sx.transform(x_raw);
    double y_mean = y_raw.mean();
    Eigen::VectorXd y = y_raw.array() - y_mean;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
    double b = 0.0;
    const double reg = 1.0 / cfg.c;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Eigen::VectorXd residual = y - (x * w).eval() - Eigen::VectorXd::Constant(y.size(), b);
        Eigen::VectorXd sign = Eigen::VectorXd::Zero(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (residual(i) > cfg.epsilon) sign(i) = -1.0;       // prediction too low
            else if (residual(i) < -cfg.epsilon) sign(i) = 1.0;  // prediction too high
        }
        Eigen::VectorXd grad_w = reg * w + (x.transpose() * sign) / n;
        double grad_b = sign.sum() / n;
        double step = cfg.lr / (1.0 + 0.01 * epoch);
        w -= step * grad_w;
        b -= step * grad_b;
    }

    LinearModel model;
    model.coef = w.array() / sx.scale.array();
    model.intercept = y_mean + b - model.coef.dot(sx.mean);
    return model;
}

// ---------------------------------------------------------------------------
// Random forest regressor

struct RfConfig {
    int n_trees = 50;
    int max_depth = 12;
    int min_leaf = 2;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const Eigen::VectorXd& x) const {
        int at = 0;
        while (nodes[at].feature >= 0)
            at = x(nodes[at].feature) <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
        return nodes[at].value;
    }
};

struct Forest {
    std::vector<Tree> trees;

    double predict(const Eigen::VectorXd& x) const {
        double sum = 0.0;
        for (const auto& t : trees) sum += t.predict(x);
        return trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
    }
    Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const {
        Eigen::VectorXd out(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            out(i) = predict(Eigen::VectorXd(x.row(i).transpose()));
        return out;
    }
};

namespace detail {

struct TreeBuilder {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& y;
    const RfConfig& cfg;
    Rng& rng;
    Tree tree;

    int build(std::vector<int>& rows, int depth) {
        double sum = 0.0, sq = 0.0;
        for (int r : rows) {
            sum += y(r);
            sq += y(r) * y(r);
        }
        const double n = static_cast<double>(rows.size());
        const double mean = sum / n;
        const double sse = sq - sum * sum / n;

        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, mean});
        if (depth >= cfg.max_depth || static_cast<int>(rows.size()) < 2 * cfg.min_leaf ||
            sse <= 1e-12)
            return node_id;

        // sample ceil(sqrt(d)) candidate features without replacement
        const int d = static_cast<int>(x.cols());
        int k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
        std::vector<int> features(d);
        for (int j = 0; j < d; ++j) features[j] = j;
        rng.shuffle(features);
        features.resize(k);
        std::sort(features.begin(), features.end());

        int best_feature = -1;
        double best_threshold = 0.0, best_score = sse - 1e-12;
        for (int j : features) {
            std::vector<int> order = rows;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
                return a < b;
            });
            double left_sum = 0.0, left_sq = 0.0;
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                int r = order[i];
                left_sum += y(r);
                left_sq += y(r) * y(r);
                if (x(order[i], j) == x(order[i + 1], j)) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
                double right_sum = sum - left_sum, right_sq = sq - left_sq;
                double score = (left_sq - left_sum * left_sum / nl) +
                               (right_sq - right_sum * right_sum / nr);
                if (score < best_score) {
                    best_score = score;
                    best_feature = j;
                    best_threshold = (x(order[i], j) + x(order[i + 1], j)) / 2.0;
                }
            }
        }
        if (best_feature < 0) return node_id;

        std::vector<int> left_rows, right_rows;
        for (int r : rows) (x(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        int left = build(left_rows, depth + 1);
        int right = build(right_rows, depth + 1);
        tree.nodes[node_id].left = left;
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

}  // namespace detail

inline Forest rf_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RfConfig& cfg = {}) {
    if (x.rows() != y.size() || x.rows() == 0)
        throw std::invalid_argument("rf_fit: shape mismatch or empty input");
    if (cfg.n_trees < 1) throw std::invalid_argument("rf_fit: n_trees must be >= 1");
    Forest forest;
    Rng rng(cfg.seed);
    const int n = static_cast<int>(x.rows());
    for (int t = 0; t < cfg.n_trees; ++t) {
        std::vector<int> rows(n);
        for (int i = 0; i < n; ++i) rows[i] = static_cast<int>(rng.index(n));  // bootstrap
        std::sort(rows.begin(), rows.end());
        detail::TreeBuilder builder{x, y, cfg, rng, {}};
        builder.build(rows, 0);
        forest.trees.push_back(std::move(builder.tree));
    }
    return forest;
}

// ---------------------------------------------------------------------------
// Feature-group importance

struct FeatureGroup {
    std::string name;
    int start = 0;
    int length = 0;
};

struct GroupImportance {
    std::string name;
    double score = 0.0;
};

// Absolute-coefficient mass per group, for linear models.
inline std::vector<GroupImportance> coefficient_importance(const LinearModel& model,
                                                           const std::vector<FeatureGroup>& groups) {
    std::vector<GroupImportance> out;
    for (const auto& g : groups) {
        double mass = 0.0;
        for (int j = g.start; j < g.start + g.length; ++j) mass += std::abs(model.coef(j));
        out.push_back({g.name, mass});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.name < b.name;
    });
    return out;
}

// Permutation importance: mean RMSE degradation over `shuffles` column
// permutations of each group.
template <typename PredictFn>
std::vector<GroupImportance> permutation_importance(PredictFn&& predict, const Eigen::MatrixXd& x,
                                                    const Eigen::VectorXd& y,
                                                    const std::vector<FeatureGroup>& groups,
                                                    std::uint64_t seed, int shuffles = 5) {
    auto rmse = [&](const Eigen::MatrixXd& data) {
        double se = 0.0;
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            double d = y(i) - predict(Eigen::VectorXd(data.row(i).transpose()));
            se += d * d;
        }
        return std::sqrt(se / static_cast<double>(data.rows()));
    };
    const double base = rmse(x);
    Rng rng(seed);
    std::vector<GroupImportance> out;
    for (const auto& g : groups) {
        double total = 0.0;
        for (int s = 0; s < shuffles; ++s) {
            std::vector<int> perm(x.rows());
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
            rng.shuffle(perm);
            Eigen::MatrixXd shuffled = x;
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                for (int j = g.start; j < g.start + g.length; ++j)
                    shuffled(i, j) = x(perm[i], j);
            total += rmse(shuffled) - base;
        }
        out.push_back({g.name, total / shuffles});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.name < b.name;
    });
    return out;
}

}  // namespace conflictforge::regress
