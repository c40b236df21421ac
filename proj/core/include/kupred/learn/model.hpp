#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kupred/learn/tree.hpp"

namespace kupred::learn {

enum class ClassifierKind { RF, DT, KNN, GNB };
const char* classifier_name(ClassifierKind k);

// One concrete configuration. Unused fields are ignored per kind.
struct ModelParams {
    // RF / DT
    int n_estimators = 100;
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 0;       // 0 = unlimited
    double ccp_alpha = 0.0;
    // KNN
    int n_neighbors = 5;
    // GNB: portion of the largest feature variance added for stability
    double var_smoothing = 1e-9;

    std::string describe(ClassifierKind kind) const;
};

uint64_t schema_fingerprint(const std::vector<std::string>& columns);

// An immutable fitted classifier. RF defaults pin the "default parameters"
// configuration: 100 trees, Gini, unlimited depth, sqrt(d) features per
// split, per-tree bootstrap resampling, min 2 samples to split.
class Model {
public:
    static Model train(ClassifierKind kind, const Eigen::MatrixXd& X,
                       const std::vector<int>& y,
                       const std::vector<std::string>& columns,
                       const ModelParams& params, uint64_t seed);

    // Reconstructs a tree model from persisted state (RF/DT only).
    static Model from_forest(ClassifierKind kind, Forest forest,
                             std::vector<std::string> columns);

    Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X,
                                  uint64_t fingerprint) const;
    Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const;

    ClassifierKind kind() const { return kind_; }
    uint64_t fingerprint() const { return fingerprint_; }
    const Forest& forest() const;  // RF/DT only; throws otherwise
    const std::vector<std::string>& columns() const { return columns_; }

private:
    ClassifierKind kind_ = ClassifierKind::RF;
    uint64_t fingerprint_ = 0;
    std::vector<std::string> columns_;
    ModelParams params_;

    Forest forest_;

    // KNN state
    Eigen::MatrixXd knn_X_;
    std::vector<int> knn_y_;
    Eigen::RowVectorXd scale_mean_, scale_sd_;

    // GNB state
    double prior1_ = 0.5;
    Eigen::RowVectorXd mean0_, mean1_, var0_, var1_;
};

// The studied hyper-parameter grids, in deterministic order.
std::vector<ModelParams> hyper_parameter_grid(ClassifierKind kind);

} // namespace kupred::learn
