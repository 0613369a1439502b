#pragma once
// Graph-convolution link scorer: a dense embedding layer, three graph
// convolutions over the degree-normalized adjacency, and a logistic pair
// classifier on the concatenated anchor embeddings. Gradients are analytic;
// training uses mini-batch Adam with Nesterov momentum and early stopping on
// development AUC.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conflictforge/eval.hpp"
#include "conflictforge/rng.hpp"

namespace conflictforge::gcn {

struct GcnDims {
    int input = 0;    // node feature width d
    int embed = 64;   // d' after the dense layer
    int h1 = 64;
    int h2 = 32;
    int h3 = 16;
};

struct GcnParams {
    GcnDims dims;
    Eigen::MatrixXd k_f;   // d x d'
    Eigen::VectorXd b_f;   // d'
    Eigen::MatrixXd k_g1;  // d' x h1
    Eigen::MatrixXd k_g2;  // h1 x h2
    Eigen::MatrixXd k_g3;  // h2 x h3
    Eigen::VectorXd k_c;   // 2*h3
    double b_c = 0.0;

    static GcnParams zeros(const GcnDims& d) {
        GcnParams p;
        p.dims = d;
        p.k_f = Eigen::MatrixXd::Zero(d.input, d.embed);
        p.b_f = Eigen::VectorXd::Zero(d.embed);
        p.k_g1 = Eigen::MatrixXd::Zero(d.embed, d.h1);
        p.k_g2 = Eigen::MatrixXd::Zero(d.h1, d.h2);
        p.k_g3 = Eigen::MatrixXd::Zero(d.h2, d.h3);
        p.k_c = Eigen::VectorXd::Zero(2 * d.h3);
        return p;
    }

    static GcnParams glorot(const GcnDims& d, Rng& rng) {
        GcnParams p = zeros(d);
        auto fill = [&rng](Eigen::MatrixXd& m) {
            double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-limit, limit);
        };
        fill(p.k_f);
        fill(p.k_g1);
        fill(p.k_g2);
        fill(p.k_g3);
        double limit = std::sqrt(6.0 / static_cast<double>(p.k_c.size() + 1));
        for (Eigen::Index i = 0; i < p.k_c.size(); ++i) p.k_c(i) = rng.uniform(-limit, limit);
        return p;
    }

    // element-wise in-place update across every tensor
    template <typename F>
    void for_each(F&& f) {
        auto matrix = [&](Eigen::MatrixXd& m) {
            for (Eigen::Index i = 0; i < m.size(); ++i) f(m.data()[i]);
        };
        auto vector = [&](Eigen::VectorXd& v) {
            for (Eigen::Index i = 0; i < v.size(); ++i) f(v(i));
        };
        matrix(k_f); vector(b_f); matrix(k_g1); matrix(k_g2); matrix(k_g3); vector(k_c); f(b_c);
    }

    std::size_t parameter_count() const {
        return static_cast<std::size_t>(k_f.size() + b_f.size() + k_g1.size() + k_g2.size() +
                                        k_g3.size() + k_c.size()) + 1;
    }
};

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct ForwardCache {
    Eigen::MatrixXd z0, h0;  // dense layer
    Eigen::MatrixXd z1, h1, z2, h2, z3, h3;
    Eigen::VectorXd e;       // concatenated anchor rows
    double z = 0.0;
    double y = 0.5;
};

// X is n x d (rows = nodes); a_hat is the degree-normalized adjacency.
// Returns the conflict probability for the anchor pair (i, j).
inline double gcn_forward(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& x,
                          const GcnParams& p, int i, int j, ForwardCache* cache = nullptr) {
    const Eigen::Index n = x.rows();
    if (a_hat.rows() != n || a_hat.cols() != n)
        throw std::invalid_argument("gcn_forward: adjacency/features shape mismatch");
    if (x.cols() != p.dims.input)
        throw std::invalid_argument("gcn_forward: node feature width mismatch");
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("gcn_forward: anchor index out of range");

    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.z0 = (x * p.k_f).rowwise() + p.b_f.transpose();
    c.h0 = c.z0.cwiseMax(0.0);
    c.z1 = a_hat * c.h0 * p.k_g1;
    c.h1 = c.z1.cwiseMax(0.0);
    c.z2 = a_hat * c.h1 * p.k_g2;
    c.h2 = c.z2.cwiseMax(0.0);
    c.z3 = a_hat * c.h2 * p.k_g3;
    c.h3 = c.z3.cwiseMax(0.0);
    c.e.resize(2 * p.dims.h3);
    c.e << c.h3.row(i).transpose(), c.h3.row(j).transpose();
    c.z = p.k_c.dot(c.e) + p.b_c;
    c.y = logistic(c.z);
    return c.y;
}

inline double bce_loss(double y, int label) {
    const double eps = 1e-12;
    return label == 1 ? -std::log(std::max(y, eps)) : -std::log(std::max(1.0 - y, eps));
}

// Accumulates d(loss)/d(params) for one sample into `grad`. Returns the loss.
inline double gcn_backward(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& x,
                           const GcnParams& p, int i, int j, int label, GcnParams& grad) {
    ForwardCache c;
    gcn_forward(a_hat, x, p, i, j, &c);
    const double dz = c.y - static_cast<double>(label);  // d(BCE)/d(z)

    grad.k_c += dz * c.e;
    grad.b_c += dz;

    Eigen::VectorXd de = dz * p.k_c;
    Eigen::MatrixXd dh3 = Eigen::MatrixXd::Zero(c.h3.rows(), c.h3.cols());
    dh3.row(i) += de.head(p.dims.h3).transpose();
    dh3.row(j) += de.tail(p.dims.h3).transpose();

    Eigen::MatrixXd dz3 = dh3.cwiseProduct((c.z3.array() > 0.0).cast<double>().matrix());
    grad.k_g3 += (a_hat * c.h2).transpose() * dz3;
    Eigen::MatrixXd dh2 = a_hat.transpose() * dz3 * p.k_g3.transpose();

    Eigen::MatrixXd dz2 = dh2.cwiseProduct((c.z2.array() > 0.0).cast<double>().matrix());
    grad.k_g2 += (a_hat * c.h1).transpose() * dz2;
    Eigen::MatrixXd dh1 = a_hat.transpose() * dz2 * p.k_g2.transpose();

    Eigen::MatrixXd dz1 = dh1.cwiseProduct((c.z1.array() > 0.0).cast<double>().matrix());
    grad.k_g1 += (a_hat * c.h0).transpose() * dz1;
    Eigen::MatrixXd dh0 = a_hat.transpose() * dz1 * p.k_g1.transpose();

    Eigen::MatrixXd dz0 = dh0.cwiseProduct((c.z0.array() > 0.0).cast<double>().matrix());
    grad.k_f += x.transpose() * dz0;
    grad.b_f += dz0.colwise().sum().transpose();

    return bce_loss(c.y, label);
}

struct GcnSample {
    Eigen::MatrixXd a_hat;
    Eigen::MatrixXd x;
    int anchor_i = 0;
    int anchor_j = 1;
    int label = 0;
    bool never_met = false;  // no prior edge between the anchors
};

struct TrainConfig {
    GcnDims dims;
    double lr = 1e-3;
    int batch_size = 256;
    int max_epochs = 50;
    int patience = 5;  // dev evaluations without improvement
    double dev_fraction = 0.15;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
};

struct TrainLogRow {
    int step = 0;
    std::string split;
    double loss = 0.0;
    double auc = 0.0;
};

struct TrainResult {
    GcnParams params;
    std::vector<TrainLogRow> log;
    double best_dev_auc = 0.0;
    int epochs_run = 0;
};

namespace detail {

struct Nadam {
    GcnParams m, v;
    double beta1, beta2, eps, lr;
    int t = 0;

    Nadam(const GcnDims& dims, const TrainConfig& cfg)
        : m(GcnParams::zeros(dims)), v(GcnParams::zeros(dims)),
          beta1(cfg.beta1), beta2(cfg.beta2), eps(cfg.adam_eps), lr(cfg.lr) {}

    void step(GcnParams& params, const GcnParams& grad) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        auto update = [&](double& theta, double& mi, double& vi, double g) {
            mi = beta1 * mi + (1.0 - beta1) * g;
            vi = beta2 * vi + (1.0 - beta2) * g * g;
            double m_hat = mi / bc1;
            double v_hat = vi / bc2;
            // Nesterov lookahead on the first moment
            double direction = beta1 * m_hat + (1.0 - beta1) * g / bc1;
            theta -= lr * direction / (std::sqrt(v_hat) + eps);
        };
        apply(params.k_f, m.k_f, v.k_f, grad.k_f, update);
        applyv(params.b_f, m.b_f, v.b_f, grad.b_f, update);
        apply(params.k_g1, m.k_g1, v.k_g1, grad.k_g1, update);
        apply(params.k_g2, m.k_g2, v.k_g2, grad.k_g2, update);
        apply(params.k_g3, m.k_g3, v.k_g3, grad.k_g3, update);
        applyv(params.k_c, m.k_c, v.k_c, grad.k_c, update);
        update(params.b_c, m.b_c, v.b_c, grad.b_c);
    }

    template <typename F>
    static void apply(Eigen::MatrixXd& p, Eigen::MatrixXd& m, Eigen::MatrixXd& v,
                      const Eigen::MatrixXd& g, F&& f) {
        for (Eigen::Index i = 0; i < p.size(); ++i)
            f(p.data()[i], m.data()[i], v.data()[i], g.data()[i]);
    }
    template <typename F>
    static void applyv(Eigen::VectorXd& p, Eigen::VectorXd& m, Eigen::VectorXd& v,
                       const Eigen::VectorXd& g, F&& f) {
        for (Eigen::Index i = 0; i < p.size(); ++i) f(p(i), m(i), v(i), g(i));
    }
};

inline double evaluate_auc(const GcnParams& params, const std::vector<GcnSample>& samples,
                           const std::vector<std::size_t>& indices, double* mean_loss = nullptr) {
    std::vector<int> labels;
    std::vector<double> scores;
    double loss = 0.0;
    for (std::size_t idx : indices) {
        const GcnSample& s = samples[idx];
        double y = gcn_forward(s.a_hat, s.x, params, s.anchor_i, s.anchor_j);
        labels.push_back(s.label);
        scores.push_back(y);
        loss += bce_loss(y, s.label);
    }
    if (mean_loss) *mean_loss = indices.empty() ? 0.0 : loss / static_cast<double>(indices.size());
    auto metrics = eval::classification_metrics(labels, scores);
    return metrics.auc.value_or(0.5);
}

}  // namespace detail

// Trains on the given samples; a dev_fraction slice (after a seeded shuffle)
// is held out for early stopping. Samples must contain both labels.
inline TrainResult gcn_train(const std::vector<GcnSample>& samples, const TrainConfig& cfg) {
    if (samples.empty()) throw std::invalid_argument("gcn_train: no samples");
    Rng rng(cfg.seed);
    GcnParams params = GcnParams::glorot(cfg.dims, rng);

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    std::size_t n_dev = static_cast<std::size_t>(cfg.dev_fraction * static_cast<double>(order.size()));
    std::vector<std::size_t> dev(order.begin(), order.begin() + n_dev);
    std::vector<std::size_t> train(order.begin() + n_dev, order.end());
    if (train.empty()) throw std::invalid_argument("gcn_train: all samples went to the dev split");

    detail::Nadam optimizer(cfg.dims, cfg);
    TrainResult result;
    GcnParams best = params;
    double best_auc = -1.0;
    int stale = 0;
    int step = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(train);
        for (std::size_t at = 0; at < train.size(); at += cfg.batch_size) {
            std::size_t end = std::min(train.size(), at + static_cast<std::size_t>(cfg.batch_size));
            GcnParams grad = GcnParams::zeros(cfg.dims);
            double loss = 0.0;
            for (std::size_t k = at; k < end; ++k) {
                const GcnSample& s = samples[train[k]];
                loss += gcn_backward(s.a_hat, s.x, params, s.anchor_i, s.anchor_j, s.label, grad);
            }
            const double inv = 1.0 / static_cast<double>(end - at);
            grad.for_each([inv](double& g) { g *= inv; });
            optimizer.step(params, grad);
            ++step;
            result.log.push_back({step, "train", loss * inv, 0.0});
        }
        result.epochs_run = epoch + 1;
        if (!dev.empty()) {
            double dev_loss = 0.0;
            double auc = detail::evaluate_auc(params, samples, dev, &dev_loss);
            result.log.push_back({step, "dev", dev_loss, auc});
            if (auc > best_auc + 1e-6) {
                best_auc = auc;
                best = params;
                stale = 0;
            } else if (++stale >= cfg.patience) {
                break;
            }
        }
    }

    result.params = dev.empty() ? params : best;
    result.best_dev_auc = best_auc < 0 ? 0.0 : best_auc;
    return result;
}

}  // namespace conflictforge::gcn
