#include "kupred/learn/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kupred/util/rng.hpp"

namespace kupred::learn {

namespace {

double impurity(double pos, double total, SplitCriterion c) {
    if (total <= 0) return 0.0;
    double p = pos / total;
    switch (c) {
        case SplitCriterion::Gini:
            return 2.0 * p * (1.0 - p);
        case SplitCriterion::Entropy:
        case SplitCriterion::LogLoss: {
            // log_loss is entropy up to a constant factor: same splits
            double h = 0.0;
            if (p > 0) h -= p * std::log2(p);
            if (p < 1) h -= (1 - p) * std::log2(1 - p);
            return h;
        }
    }
    return 0.0;
}

struct Builder {
    const Eigen::MatrixXd& X;
    const std::vector<int>& y;
    const TreeParams& params;
    std::mt19937_64 rng;
    DecisionTree tree;

    int grow(std::vector<int> rows, int depth) {
        double total = static_cast<double>(rows.size());
        double pos = 0;
        for (int r : rows) pos += y[static_cast<size_t>(r)];

        int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<size_t>(id)].cover = total;
        tree.nodes[static_cast<size_t>(id)].value = total > 0 ? pos / total : 0.0;

        bool pure = pos == 0 || pos == total;
        bool too_small =
            rows.size() < static_cast<size_t>(params.min_samples_split);
        bool too_deep = params.max_depth > 0 && depth >= params.max_depth;
        if (pure || too_small || too_deep) return id;

        // candidate features: all, or a seeded random subset
        std::vector<int> features(static_cast<size_t>(X.cols()));
        std::iota(features.begin(), features.end(), 0);
        if (params.max_features > 0 &&
            params.max_features < static_cast<int>(features.size())) {
            std::shuffle(features.begin(), features.end(), rng);
            features.resize(static_cast<size_t>(params.max_features));
            std::sort(features.begin(), features.end());
        }

        double parent_imp = impurity(pos, total, params.criterion);
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> sorted;
        sorted.reserve(rows.size());
        for (int f : features) {
            sorted.clear();
            for (int r : rows)
                sorted.push_back({X(r, f), y[static_cast<size_t>(r)]});
            std::sort(sorted.begin(), sorted.end());
            double left_pos = 0, left_n = 0;
            for (size_t i = 0; i + 1 < sorted.size(); ++i) {
                left_pos += sorted[i].second;
                left_n += 1;
                if (sorted[i].first == sorted[i + 1].first) continue;
                double right_n = total - left_n;
                if (left_n < params.min_samples_leaf ||
                    right_n < params.min_samples_leaf)
                    continue;
                double gain = parent_imp -
                              (left_n / total) *
                                  impurity(left_pos, left_n, params.criterion) -
                              (right_n / total) *
                                  impurity(pos - left_pos, right_n,
                                           params.criterion);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = sorted[i].first;  // observed value
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<int> left_rows, right_rows;
        for (int r : rows) {
            if (X(r, best_feature) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        int l = grow(std::move(left_rows), depth + 1);
        int r = grow(std::move(right_rows), depth + 1);
        tree.nodes[static_cast<size_t>(id)].feature = best_feature;
        tree.nodes[static_cast<size_t>(id)].threshold = best_threshold;
        tree.nodes[static_cast<size_t>(id)].left = l;
        tree.nodes[static_cast<size_t>(id)].right = r;
        return id;
    }
};

// Minimal cost-complexity pruning: collapse the weakest link while its
// effective alpha does not exceed ccp_alpha. R(node) is the resubstitution
// error weighted by cover fraction.
struct Pruner {
    DecisionTree& tree;
    double total_cover;

    double node_error(const TreeNode& n) const {
        double p = n.value;
        return std::min(p, 1 - p) * (n.cover / total_cover);
    }

    // returns (subtree error, leaf count)
    std::pair<double, int> subtree_stats(int id) const {
        const TreeNode& n = tree.nodes[static_cast<size_t>(id)];
        if (n.feature < 0) return {node_error(n), 1};
        auto [le, lc] = subtree_stats(n.left);
        auto [re, rc] = subtree_stats(n.right);
        return {le + re, lc + rc};
    }

    void weakest_link(int id, int& best, double& best_alpha) const {
        const TreeNode& n = tree.nodes[static_cast<size_t>(id)];
        if (n.feature < 0) return;
        auto [err, leaves] = subtree_stats(id);
        double alpha = (node_error(n) - err) / std::max(1, leaves - 1);
        if (best < 0 || alpha < best_alpha) {
            best = id;
            best_alpha = alpha;
        }
        weakest_link(n.left, best, best_alpha);
        weakest_link(n.right, best, best_alpha);
    }

    void run(double ccp_alpha) {
        for (;;) {
            int best = -1;
            double alpha = 0;
            weakest_link(0, best, alpha);
            if (best < 0 || alpha > ccp_alpha) break;
            TreeNode& n = tree.nodes[static_cast<size_t>(best)];
            n.feature = -1;  // collapse to a leaf; children stay unreachable
            n.left = n.right = -1;
        }
    }
};

} // namespace

double DecisionTree::predict_p1(const Eigen::RowVectorXd& x) const {
    int id = 0;
    for (;;) {
        const TreeNode& n = nodes[static_cast<size_t>(id)];
        if (n.feature < 0) return n.value;
        id = x(n.feature) <= n.threshold ? n.left : n.right;
    }
}

int DecisionTree::leaf_count() const {
    int count = 0;
    // count only reachable leaves
    std::vector<int> stack = {0};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        const TreeNode& n = nodes[static_cast<size_t>(id)];
        if (n.feature < 0) {
            ++count;
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    return count;
}

DecisionTree build_tree(const Eigen::MatrixXd& X, const std::vector<int>& y,
                        const std::vector<int>& row_indices,
                        const TreeParams& params, uint64_t rng_seed) {
    Builder b{X, y, params, std::mt19937_64(rng_seed), {}};
    b.grow(row_indices, 0);
    if (params.ccp_alpha > 0) {
        Pruner p{b.tree, b.tree.nodes[0].cover};
        p.run(params.ccp_alpha);
    }
    return std::move(b.tree);
}

double Forest::predict_p1(const Eigen::RowVectorXd& x) const {
    double s = 0;
    for (const auto& t : trees) s += t.predict_p1(x);
    return trees.empty() ? base_rate : s / static_cast<double>(trees.size());
}

} // namespace kupred::learn
