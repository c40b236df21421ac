#include "kupred/learn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kupred/util/error.hpp"
#include "kupred/util/rng.hpp"

namespace kupred::learn {

const char* classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::RF: return "RF";
        case ClassifierKind::DT: return "DT";
        case ClassifierKind::KNN: return "KNN";
        case ClassifierKind::GNB: return "NB";
    }
    return "?";
}

std::string ModelParams::describe(ClassifierKind kind) const {
    auto crit = [&] {
        switch (criterion) {
            case SplitCriterion::Gini: return "gini";
            case SplitCriterion::Entropy: return "entropy";
            case SplitCriterion::LogLoss: return "log_loss";
        }
        return "?";
    };
    switch (kind) {
        case ClassifierKind::RF:
            return "n_estimators=" + std::to_string(n_estimators) +
                   ",max_depth=" + (max_depth ? std::to_string(max_depth) : "None");
        case ClassifierKind::DT:
            return std::string("criterion=") + crit() + ",max_depth=" +
                   (max_depth ? std::to_string(max_depth) : "None") +
                   ",ccp_alpha=" + std::to_string(ccp_alpha);
        case ClassifierKind::KNN:
            return "n_neighbors=" + std::to_string(n_neighbors);
        case ClassifierKind::GNB: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "var_smoothing=%g", var_smoothing);
            return buf;
        }
    }
    return "";
}

uint64_t schema_fingerprint(const std::vector<std::string>& columns) {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (const auto& c : columns) {
        for (char ch : c) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    }
    return h;
}

Model Model::train(ClassifierKind kind, const Eigen::MatrixXd& X,
                   const std::vector<int>& y,
                   const std::vector<std::string>& columns,
                   const ModelParams& params, uint64_t seed) {
    if (static_cast<size_t>(X.rows()) != y.size())
        throw Error("train: row/label count mismatch");
    int pos = 0;
    for (int v : y) pos += v;
    if (pos == 0 || pos == static_cast<int>(y.size()))
        throw Error("train: single-class training data");

    Model m;
    m.kind_ = kind;
    m.columns_ = columns;
    m.fingerprint_ = schema_fingerprint(columns);
    m.params_ = params;

    const long n = X.rows();
    const long d = X.cols();

    switch (kind) {
        case ClassifierKind::DT: {
            if (n < 4) throw Error("train: too few rows for DT");
            TreeParams tp;
            tp.criterion = params.criterion;
            tp.max_depth = params.max_depth;
            tp.ccp_alpha = params.ccp_alpha;
            std::vector<int> all(static_cast<size_t>(n));
            std::iota(all.begin(), all.end(), 0);
            m.forest_.trees.push_back(
                build_tree(X, y, all, tp, derive_seed(seed, 0)));
            m.forest_.base_rate = static_cast<double>(pos) / n;
            break;
        }
        case ClassifierKind::RF: {
            if (n < 4) throw Error("train: too few rows for RF");
            TreeParams tp;
            tp.criterion = params.criterion;
            tp.max_depth = params.max_depth;
            tp.max_features = std::max(
                1, static_cast<int>(std::sqrt(static_cast<double>(d))));
            m.forest_.trees.reserve(static_cast<size_t>(params.n_estimators));
            for (int t = 0; t < params.n_estimators; ++t) {
                auto rng = make_rng(seed, static_cast<uint64_t>(t) * 2 + 1);
                std::uniform_int_distribution<long> pick(0, n - 1);
                std::vector<int> bag(static_cast<size_t>(n));
                for (long i = 0; i < n; ++i)
                    bag[static_cast<size_t>(i)] = static_cast<int>(pick(rng));
                m.forest_.trees.push_back(build_tree(
                    X, y, bag, tp, derive_seed(seed, static_cast<uint64_t>(t) * 2)));
            }
            m.forest_.base_rate = static_cast<double>(pos) / n;
            break;
        }
        case ClassifierKind::KNN: {
            if (n < params.n_neighbors)
                throw Error("train: KNN needs n >= n_neighbors");
            m.scale_mean_ = X.colwise().mean();
            Eigen::RowVectorXd sd(d);
            for (long j = 0; j < d; ++j) {
                double v = (X.col(j).array() - m.scale_mean_(j)).square().sum() /
                           std::max<double>(1.0, static_cast<double>(n - 1));
                sd(j) = v > 0 ? std::sqrt(v) : 1.0;
            }
            m.scale_sd_ = sd;
            m.knn_X_ = (X.rowwise() - m.scale_mean_).array().rowwise() /
                       m.scale_sd_.array();
            m.knn_y_ = y;
            break;
        }
        case ClassifierKind::GNB: {
            if (n < 4) throw Error("train: too few rows for GNB");
            m.prior1_ = static_cast<double>(pos) / n;
            m.mean0_ = Eigen::RowVectorXd::Zero(d);
            m.mean1_ = Eigen::RowVectorXd::Zero(d);
            m.var0_ = Eigen::RowVectorXd::Zero(d);
            m.var1_ = Eigen::RowVectorXd::Zero(d);
            long n0 = 0, n1 = 0;
            for (long i = 0; i < n; ++i) {
                if (y[static_cast<size_t>(i)]) {
                    m.mean1_ += X.row(i);
                    ++n1;
                } else {
                    m.mean0_ += X.row(i);
                    ++n0;
                }
            }
            m.mean0_ /= std::max<long>(1, n0);
            m.mean1_ /= std::max<long>(1, n1);
            for (long i = 0; i < n; ++i) {
                if (y[static_cast<size_t>(i)])
                    m.var1_ += (X.row(i) - m.mean1_).array().square().matrix();
                else
                    m.var0_ += (X.row(i) - m.mean0_).array().square().matrix();
            }
            m.var0_ /= std::max<long>(1, n0);
            m.var1_ /= std::max<long>(1, n1);
            double max_var = std::max(m.var0_.maxCoeff(), m.var1_.maxCoeff());
            double eps = params.var_smoothing * std::max(max_var, 1e-12);
            m.var0_.array() += eps;
            m.var1_.array() += eps;
            break;
        }
    }
    return m;
}

Model Model::from_forest(ClassifierKind kind, Forest forest,
                         std::vector<std::string> columns) {
    if (kind != ClassifierKind::RF && kind != ClassifierKind::DT)
        throw Error("from_forest: only tree models can be restored");
    Model m;
    m.kind_ = kind;
    m.columns_ = std::move(columns);
    m.fingerprint_ = schema_fingerprint(m.columns_);
    m.forest_ = std::move(forest);
    return m;
}

const Forest& Model::forest() const {
    if (kind_ != ClassifierKind::RF && kind_ != ClassifierKind::DT)
        throw Error("model has no trees");
    return forest_;
}

Eigen::VectorXd Model::predict_proba(const Eigen::MatrixXd& X,
                                     uint64_t fingerprint) const {
    if (fingerprint != fingerprint_)
        throw SchemaError("predict_proba: feature schema mismatch");
    return predict_proba(X);
}

Eigen::VectorXd Model::predict_proba(const Eigen::MatrixXd& X) const {
    const long n = X.rows();
    Eigen::VectorXd out(n);
    switch (kind_) {
        case ClassifierKind::RF:
        case ClassifierKind::DT:
            for (long i = 0; i < n; ++i) out(i) = forest_.predict_p1(X.row(i));
            break;
        case ClassifierKind::KNN: {
            for (long i = 0; i < n; ++i) {
                Eigen::RowVectorXd q = (X.row(i) - scale_mean_).array() /
                                       scale_sd_.array();
                std::vector<std::pair<double, int>> dist;
                dist.reserve(static_cast<size_t>(knn_X_.rows()));
                for (long j = 0; j < knn_X_.rows(); ++j)
                    dist.push_back(
                        {(knn_X_.row(j) - q).norm(), static_cast<int>(j)});
                int k = std::min<int>(params_.n_neighbors,
                                      static_cast<int>(dist.size()));
                std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
                double posk = 0;
                for (int t = 0; t < k; ++t)
                    posk += knn_y_[static_cast<size_t>(dist[static_cast<size_t>(t)].second)];
                out(i) = posk / k;
            }
            break;
        }
        case ClassifierKind::GNB: {
            for (long i = 0; i < n; ++i) {
                double l0 = std::log(1 - prior1_), l1 = std::log(prior1_);
                for (long j = 0; j < X.cols(); ++j) {
                    double x = X(i, j);
                    l0 += -0.5 * std::log(2 * M_PI * var0_(j)) -
                          (x - mean0_(j)) * (x - mean0_(j)) / (2 * var0_(j));
                    l1 += -0.5 * std::log(2 * M_PI * var1_(j)) -
                          (x - mean1_(j)) * (x - mean1_(j)) / (2 * var1_(j));
                }
                double mx = std::max(l0, l1);
                double p1 = std::exp(l1 - mx) /
                            (std::exp(l0 - mx) + std::exp(l1 - mx));
                out(i) = p1;
            }
            break;
        }
    }
    return out;
}

std::vector<ModelParams> hyper_parameter_grid(ClassifierKind kind) {
    std::vector<ModelParams> grid;
    switch (kind) {
        case ClassifierKind::KNN:
            for (int k : {1, 5, 9, 13, 17, 20}) {
                ModelParams p;
                p.n_neighbors = k;
                grid.push_back(p);
            }
            break;
        case ClassifierKind::GNB:
            for (double v : {1e-5, 1e-9, 1e-11, 1e-15}) {
                ModelParams p;
                p.var_smoothing = v;
                grid.push_back(p);
            }
            break;
        case ClassifierKind::DT:
            for (auto crit : {SplitCriterion::Gini, SplitCriterion::Entropy,
                              SplitCriterion::LogLoss})
                for (int depth : {0, 5, 10})
                    for (double alpha : {0.0001, 0.001, 0.01, 0.1, 0.5}) {
                        ModelParams p;
                        p.criterion = crit;
                        p.max_depth = depth;
                        p.ccp_alpha = alpha;
                        grid.push_back(p);
                    }
            break;
        case ClassifierKind::RF:
            for (int trees : {10, 50, 100, 200})
                for (int depth : {0, 5, 10}) {
                    ModelParams p;
                    p.n_estimators = trees;
                    p.max_depth = depth;
                    grid.push_back(p);
                }
            break;
    }
    return grid;
}

} // namespace kupred::learn
