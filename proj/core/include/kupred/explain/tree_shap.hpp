#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kupred/learn/model.hpp"

namespace kupred::explain {

// Additive attributions for one model over a set of rows. For every row,
// base_value + sum(phi) reproduces the model output (local accuracy).
struct ShapMatrix {
    double base_value = 0.0;
    Eigen::MatrixXd phi;  // rows x features
};

// Exact path-dependent tree SHAP for one tree, weighted by training cover.
Eigen::VectorXd tree_shap_row(const learn::DecisionTree& tree,
                              const Eigen::RowVectorXd& x, int n_features);

// Cover-weighted expected value of a tree (its contribution to the base).
double tree_expected_value(const learn::DecisionTree& tree);

// Ensemble attribution: mean over trees of per-tree SHAP values; base is the
// mean of per-tree expected values. Throws SchemaError on a fingerprint
// mismatch.
Eigen::VectorXd shap_row(const learn::Model& model, const Eigen::RowVectorXd& x,
                         double* base_value = nullptr);
ShapMatrix shap_table(const learn::Model& model, const Eigen::MatrixXd& X,
                      unsigned threads = 0);

// importance[f] = sum over rows of |phi[row, f]|.
Eigen::VectorXd global_importance(const ShapMatrix& shap);

// SK-ESD over per-feature importance distributions (one entry per
// bootstrap); rank 1 = most important.
std::map<std::string, int> per_release_feature_ranks(
    const std::vector<Eigen::VectorXd>& importances,
    const std::vector<std::string>& features);

// Second-level SK-ESD across releases; a lower rank distribution gives a
// better (lower) final rank.
struct FeatureRankTable {
    std::vector<std::string> features;
    std::map<std::string, std::map<std::string, int>> per_release;  // release -> feature -> rank
    std::map<std::string, int> final_rank;
};

FeatureRankTable final_feature_ranks(
    const std::map<std::string, std::map<std::string, int>>& per_release);

// Ordered local explanation: features by |phi| descending, zero
// attributions dropped, direction = sign.
struct LocalAttribution {
    std::string feature;
    double phi = 0.0;
    int direction = 0;  // +1 pushes toward the defect class
};

std::vector<LocalAttribution> local_report(const learn::Model& model,
                                           const Eigen::RowVectorXd& row,
                                           int top_n);

} // namespace kupred::explain
