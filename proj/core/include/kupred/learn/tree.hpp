#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace kupred::learn {

// Binary classification tree. Split predicate: x[feature] <= threshold goes
// left. Thresholds are observed training values. `cover` counts training
// rows through each node (the weights path-dependent SHAP needs).
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double cover = 0.0;
    double value = 0.0;  // mean positive-class fraction at the node
};

enum class SplitCriterion { Gini, Entropy, LogLoss };

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = 0;          // 0 = unlimited
    int min_samples_split = 2;
    int min_samples_leaf = 1;
    double ccp_alpha = 0.0;     // minimal cost-complexity pruning
    int max_features = 0;       // 0 = all features per split
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_p1(const Eigen::RowVectorXd& x) const;
    int leaf_count() const;
};

// Grows a CART tree; `row_indices` selects training rows (with repetition
// for bagging). rng_seed drives the per-node feature subsets when
// max_features > 0.
DecisionTree build_tree(const Eigen::MatrixXd& X, const std::vector<int>& y,
                        const std::vector<int>& row_indices,
                        const TreeParams& params, uint64_t rng_seed);

struct Forest {
    std::vector<DecisionTree> trees;
    double base_rate = 0.0;  // training-set positive fraction

    double predict_p1(const Eigen::RowVectorXd& x) const;
};

} // namespace kupred::learn
