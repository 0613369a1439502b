#pragma once
// Gaussian-kernel SVM trained with sequential minimal optimization.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace conflictforge::svm {

inline double gaussian_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

struct SvmConfig {
    double c = 1.0;
    double gamma = 1.0;
    double tol = 1e-3;      // KKT violation tolerance
    int max_passes = 200;   // full passes without progress before giving up
};

struct SvmModel {
    Eigen::MatrixXd support_vectors;  // rows
    Eigen::VectorXd alpha_y;          // alpha_i * y_i per support vector
    double bias = 0.0;
    double gamma = 1.0;
    int majority_label = 1;  // most frequent training label

    double decision(const Eigen::VectorXd& x) const {
        double sum = bias;
        for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
            sum += alpha_y(i) * gaussian_kernel(support_vectors.row(i).transpose(), x, gamma);
        return sum;
    }

    int predict(const Eigen::VectorXd& x) const { return decision(x) >= 0 ? 1 : -1; }
};

namespace detail {

// Platt-style SMO working state.
struct Smo {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& y;
    const SvmConfig& cfg;
    Eigen::MatrixXd k;        // precomputed kernel matrix
    Eigen::VectorXd alpha;
    Eigen::VectorXd error;    // decision(i) - y(i)
    double b = 0.0;

    Smo(const Eigen::MatrixXd& x_, const Eigen::VectorXd& y_, const SvmConfig& cfg_)
        : x(x_), y(y_), cfg(cfg_) {
        const Eigen::Index n = x.rows();
        k.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j)
                k(i, j) = k(j, i) = gaussian_kernel(x.row(i).transpose(), x.row(j).transpose(),
                                                    cfg.gamma);
        alpha = Eigen::VectorXd::Zero(n);
        error = -y;
    }

    bool take_step(Eigen::Index i1, Eigen::Index i2) {
        if (i1 == i2) return false;
        double a1 = alpha(i1), a2 = alpha(i2);
        double y1 = y(i1), y2 = y(i2);
        double e1 = error(i1), e2 = error(i2);
        double s = y1 * y2;
        double lo, hi;
        if (s < 0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(cfg.c, cfg.c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - cfg.c);
            hi = std::min(cfg.c, a1 + a2);
        }
        if (lo >= hi) return false;

        double eta = 2.0 * k(i1, i2) - k(i1, i1) - k(i2, i2);
        double a2_new;
        if (eta < 0) {
            a2_new = a2 - y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // evaluate the objective at both clip ends
            double f1 = y1 * e1 - a1 * k(i1, i1) - s * a2 * k(i1, i2);
            double f2 = y2 * e2 - s * a1 * k(i1, i2) - a2 * k(i2, i2);
            double l1 = a1 + s * (a2 - lo);
            double h1 = a1 + s * (a2 - hi);
            double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k(i1, i1) +
                            0.5 * lo * lo * k(i2, i2) + s * lo * l1 * k(i1, i2);
            double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k(i1, i1) +
                            0.5 * hi * hi * k(i2, i2) + s * hi * h1 * k(i1, i2);
            if (obj_lo < obj_hi - 1e-12) a2_new = lo;
            else if (obj_lo > obj_hi + 1e-12) a2_new = hi;
            else a2_new = a2;
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;

        double a1_new = a1 + s * (a2 - a2_new);
        double b1 = b - e1 - y1 * (a1_new - a1) * k(i1, i1) - y2 * (a2_new - a2) * k(i1, i2);
        double b2 = b - e2 - y1 * (a1_new - a1) * k(i1, i2) - y2 * (a2_new - a2) * k(i2, i2);
        double b_new;
        if (a1_new > 0 && a1_new < cfg.c) b_new = b1;
        else if (a2_new > 0 && a2_new < cfg.c) b_new = b2;
        else b_new = (b1 + b2) / 2.0;

        double d1 = y1 * (a1_new - a1), d2 = y2 * (a2_new - a2), db = b_new - b;
        for (Eigen::Index i = 0; i < error.size(); ++i)
            error(i) += d1 * k(i1, i) + d2 * k(i2, i) + db;
        alpha(i1) = a1_new;
        alpha(i2) = a2_new;
        b = b_new;
        return true;
    }

    bool examine(Eigen::Index i2) {
        double y2 = y(i2), a2 = alpha(i2), e2 = error(i2);
        double r2 = e2 * y2;
        if (!((r2 < -cfg.tol && a2 < cfg.c) || (r2 > cfg.tol && a2 > 0))) return false;

        // second-choice heuristic: maximize |e1 - e2| over non-bound points
        Eigen::Index best = -1;
        double best_gap = -1.0;
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            if (alpha(i) <= 0 || alpha(i) >= cfg.c) continue;
            double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            if (alpha(i) > 0 && alpha(i) < cfg.c && take_step(i, i2)) return true;
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            if (take_step(i, i2)) return true;
        return false;
    }
};

}  // namespace detail

struct SvmFitResult {
    SvmModel model;
    Eigen::VectorXd alpha;       // full dual vector, box [0, C]
    double dual_constraint = 0;  // sum alpha_i y_i at convergence
    double max_kkt_violation = 0.0;
};

// Labels must be -1/+1 and contain both classes.
inline SvmFitResult svm_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const SvmConfig& cfg = {}) {
    if (x.rows() != y.size() || x.rows() < 2)
        throw std::invalid_argument("svm_fit: need at least two samples");
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 1) ++pos;
        else if (y(i) == -1) ++neg;
        else throw std::invalid_argument("svm_fit: labels must be -1 or +1");
    }
    if (pos == 0 || neg == 0) throw std::invalid_argument("svm_fit: single-class labels");

    detail::Smo smo(x, y, cfg);
    int changed = 0;
    bool examine_all = true;
    int passes = 0;
    while ((changed > 0 || examine_all) && passes < cfg.max_passes) {
        changed = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (!examine_all && (smo.alpha(i) <= 0 || smo.alpha(i) >= cfg.c)) continue;
            changed += smo.examine(i) ? 1 : 0;
        }
        if (examine_all) examine_all = false;
        else if (changed == 0) examine_all = true;
        ++passes;
    }

    SvmFitResult result;
    result.alpha = smo.alpha;
    result.dual_constraint = smo.alpha.dot(y);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double r = smo.error(i) * y(i);
        double violation = 0.0;
        if (smo.alpha(i) < cfg.c) violation = std::max(violation, -r);
        if (smo.alpha(i) > 0) violation = std::max(violation, r);
        result.max_kkt_violation = std::max(result.max_kkt_violation, violation);
    }

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (smo.alpha(i) > 1e-12) sv.push_back(i);
    result.model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    result.model.alpha_y.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t i = 0; i < sv.size(); ++i) {
        result.model.support_vectors.row(static_cast<Eigen::Index>(i)) = x.row(sv[i]);
        result.model.alpha_y(static_cast<Eigen::Index>(i)) = smo.alpha(sv[i]) * y(sv[i]);
    }
    result.model.bias = smo.b;
    result.model.gamma = cfg.gamma;
    result.model.majority_label = pos >= neg ? 1 : -1;
    return result;
}

}  // namespace conflictforge::svm
