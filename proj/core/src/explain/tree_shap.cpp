#include "kupred/explain/tree_shap.hpp"

#include <algorithm>
#include <cmath>

#include "kupred/stats/stats.hpp"
#include "kupred/util/error.hpp"
#include "kupred/util/parallel.hpp"

namespace kupred::explain {

using learn::DecisionTree;
using learn::TreeNode;

namespace {

// One step of the path of unique features walked so far.
struct PathElement {
    int feature = -1;
    double zero_fraction = 0.0;  // cover proportion flowing through when absent
    double one_fraction = 0.0;   // 1 when x follows this split, else 0
    double pweight = 0.0;        // permutation weight
};

void extend_path(std::vector<PathElement>& path, int depth,
                 double zero_fraction, double one_fraction, int feature) {
    path[static_cast<size_t>(depth)] = {feature, zero_fraction, one_fraction,
                                        depth == 0 ? 1.0 : 0.0};
    for (int i = depth - 1; i >= 0; --i) {
        path[static_cast<size_t>(i + 1)].pweight +=
            one_fraction * path[static_cast<size_t>(i)].pweight * (i + 1) /
            static_cast<double>(depth + 1);
        path[static_cast<size_t>(i)].pweight =
            zero_fraction * path[static_cast<size_t>(i)].pweight *
            (depth - i) / static_cast<double>(depth + 1);
    }
}

void unwind_path(std::vector<PathElement>& path, int depth, int index) {
    double one_fraction = path[static_cast<size_t>(index)].one_fraction;
    double zero_fraction = path[static_cast<size_t>(index)].zero_fraction;
    double next_one = path[static_cast<size_t>(depth)].pweight;
    for (int i = depth - 1; i >= 0; --i) {
        if (one_fraction != 0) {
            double tmp = path[static_cast<size_t>(i)].pweight;
            path[static_cast<size_t>(i)].pweight =
                next_one * (depth + 1) / static_cast<double>((i + 1) * one_fraction);
            next_one = tmp - path[static_cast<size_t>(i)].pweight *
                                 zero_fraction * (depth - i) /
                                 static_cast<double>(depth + 1);
        } else {
            path[static_cast<size_t>(i)].pweight =
                path[static_cast<size_t>(i)].pweight * (depth + 1) /
                static_cast<double>(zero_fraction * (depth - i));
        }
    }
    for (int i = index; i < depth; ++i) {
        path[static_cast<size_t>(i)].feature = path[static_cast<size_t>(i + 1)].feature;
        path[static_cast<size_t>(i)].zero_fraction =
            path[static_cast<size_t>(i + 1)].zero_fraction;
        path[static_cast<size_t>(i)].one_fraction =
            path[static_cast<size_t>(i + 1)].one_fraction;
    }
}

double unwound_path_sum(const std::vector<PathElement>& path, int depth,
                        int index) {
    double one_fraction = path[static_cast<size_t>(index)].one_fraction;
    double zero_fraction = path[static_cast<size_t>(index)].zero_fraction;
    double next_one = path[static_cast<size_t>(depth)].pweight;
    double total = 0;
    for (int i = depth - 1; i >= 0; --i) {
        if (one_fraction != 0) {
            double tmp =
                next_one * (depth + 1) / static_cast<double>((i + 1) * one_fraction);
            total += tmp;
            next_one = path[static_cast<size_t>(i)].pweight -
                       tmp * zero_fraction * (depth - i) /
                           static_cast<double>(depth + 1);
        } else {
            total += path[static_cast<size_t>(i)].pweight /
                     (zero_fraction * (depth - i) / static_cast<double>(depth + 1));
        }
    }
    return total;
}

struct ShapWalker {
    const DecisionTree& tree;
    const Eigen::RowVectorXd& x;
    Eigen::VectorXd& phi;

    void recurse(int node_id, std::vector<PathElement> path, int depth,
                 double zero_fraction, double one_fraction, int feature) {
        path.resize(static_cast<size_t>(depth) + 1);
        extend_path(path, depth, zero_fraction, one_fraction, feature);
        const TreeNode& node = tree.nodes[static_cast<size_t>(node_id)];
        if (node.feature < 0) {  // leaf
            for (int i = 1; i <= depth; ++i) {
                double w = unwound_path_sum(path, depth, i);
                const PathElement& el = path[static_cast<size_t>(i)];
                phi(el.feature) +=
                    w * (el.one_fraction - el.zero_fraction) * node.value;
            }
            return;
        }
        const TreeNode& left = tree.nodes[static_cast<size_t>(node.left)];
        const TreeNode& right = tree.nodes[static_cast<size_t>(node.right)];
        bool go_left = x(node.feature) <= node.threshold;
        int hot = go_left ? node.left : node.right;
        int cold = go_left ? node.right : node.left;
        double hot_cover = go_left ? left.cover : right.cover;
        double cold_cover = go_left ? right.cover : left.cover;

        double incoming_zero = 1.0, incoming_one = 1.0;
        int found = -1;
        for (int i = 1; i <= depth; ++i)
            if (path[static_cast<size_t>(i)].feature == node.feature) {
                found = i;
                break;
            }
        if (found >= 0) {
            incoming_zero = path[static_cast<size_t>(found)].zero_fraction;
            incoming_one = path[static_cast<size_t>(found)].one_fraction;
            unwind_path(path, depth, found);
            --depth;
        }
        recurse(hot, path, depth + 1,
                incoming_zero * hot_cover / node.cover, incoming_one,
                node.feature);
        recurse(cold, path, depth + 1,
                incoming_zero * cold_cover / node.cover, 0.0, node.feature);
    }
};

} // namespace

Eigen::VectorXd tree_shap_row(const DecisionTree& tree,
                              const Eigen::RowVectorXd& x, int n_features) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n_features);
    if (tree.nodes.empty()) return phi;
    if (tree.nodes[0].feature < 0) return phi;  // single leaf: all zero
    ShapWalker walker{tree, x, phi};
    walker.recurse(0, {}, 0, 1.0, 1.0, -1);
    return phi;
}

double tree_expected_value(const DecisionTree& tree) {
    if (tree.nodes.empty()) return 0.0;
    double total = tree.nodes[0].cover;
    double acc = 0;
    std::vector<int> stack = {0};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        const TreeNode& n = tree.nodes[static_cast<size_t>(id)];
        if (n.feature < 0) {
            acc += n.cover / total * n.value;
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    return acc;
}

Eigen::VectorXd shap_row(const learn::Model& model, const Eigen::RowVectorXd& x,
                         double* base_value) {
    const learn::Forest& forest = model.forest();
    const int d = static_cast<int>(x.size());
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
    double base = 0;
    for (const auto& tree : forest.trees) {
        phi += tree_shap_row(tree, x, d);
        base += tree_expected_value(tree);
    }
    double count = std::max<double>(1.0, static_cast<double>(forest.trees.size()));
    phi /= count;
    base /= count;
    if (base_value) *base_value = base;
    return phi;
}

ShapMatrix shap_table(const learn::Model& model, const Eigen::MatrixXd& X,
                      unsigned threads) {
    if (X.rows() == 0) throw Error("shap_table: empty table");
    ShapMatrix out;
    out.phi.resize(X.rows(), X.cols());
    double base = 0;
    shap_row(model, X.row(0), &base);  // base is row-independent
    out.base_value = base;
    parallel_for(static_cast<size_t>(X.rows()), [&](size_t i) {
        out.phi.row(static_cast<long>(i)) =
            shap_row(model, X.row(static_cast<long>(i))).transpose();
    }, threads);

    // local accuracy is structural; verify on every row
    Eigen::VectorXd pred = model.predict_proba(X);
    for (long i = 0; i < X.rows(); ++i) {
        double recon = out.base_value + out.phi.row(i).sum();
        if (std::abs(recon - pred(i)) > 1e-9)
            throw Error("shap_table: local accuracy violated at row " +
                        std::to_string(i));
    }
    return out;
}

Eigen::VectorXd global_importance(const ShapMatrix& shap) {
    return shap.phi.cwiseAbs().colwise().sum().transpose();
}

std::map<std::string, int> per_release_feature_ranks(
    const std::vector<Eigen::VectorXd>& importances,
    const std::vector<std::string>& features) {
    if (importances.empty())
        throw Error("per_release_feature_ranks: no importance vectors");
    std::map<std::string, std::vector<double>> groups;
    for (size_t f = 0; f < features.size(); ++f) {
        std::vector<double> dist;
        dist.reserve(importances.size());
        for (const auto& v : importances) dist.push_back(v(static_cast<long>(f)));
        groups[features[f]] = std::move(dist);
    }
    return kupred::stats::scott_knott_esd(groups);
}

FeatureRankTable final_feature_ranks(
    const std::map<std::string, std::map<std::string, int>>& per_release) {
    if (per_release.size() < 2)
        throw Error("final_feature_ranks: need >= 2 releases");
    FeatureRankTable out;
    out.per_release = per_release;
    std::map<std::string, std::vector<double>> negated;  // lower rank = better
    for (const auto& [release, ranks] : per_release)
        for (const auto& [feature, rank] : ranks)
            negated[feature].push_back(-static_cast<double>(rank));
    for (const auto& [feature, v] : negated) out.features.push_back(feature);
    out.final_rank = kupred::stats::scott_knott_esd(negated);
    return out;
}

std::vector<LocalAttribution> local_report(const learn::Model& model,
                                           const Eigen::RowVectorXd& row,
                                           int top_n) {
    if (top_n < 1) throw Error("local_report: top_n must be >= 1");
    Eigen::VectorXd phi = shap_row(model, row);
    std::vector<LocalAttribution> all;
    for (long f = 0; f < phi.size(); ++f) {
        if (phi(f) == 0.0) continue;  // dummy features drop out entirely
        LocalAttribution a;
        a.feature = model.columns()[static_cast<size_t>(f)];
        a.phi = phi(f);
        a.direction = phi(f) > 0 ? 1 : -1;
        all.push_back(std::move(a));
    }
    std::sort(all.begin(), all.end(),
              [](const LocalAttribution& a, const LocalAttribution& b) {
                  if (std::abs(a.phi) != std::abs(b.phi))
                      return std::abs(a.phi) > std::abs(b.phi);
                  return a.feature < b.feature;
              });
    if (static_cast<int>(all.size()) > top_n)
        all.resize(static_cast<size_t>(top_n));
    return all;
}

} // namespace kupred::explain
