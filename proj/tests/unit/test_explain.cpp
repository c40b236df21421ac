#include <doctest.h>

#include <cmath>
#include <random>

#include "kupred/explain/tree_shap.hpp"
#include "kupred/learn/evaluate.hpp"
#include "kupred/util/error.hpp"

using namespace kupred;
using namespace kupred::explain;
using learn::ClassifierKind;
using learn::DecisionTree;
using learn::Model;
using learn::TreeNode;

namespace {

// Path-dependent conditional expectation: split features in S follow x,
// absent features average children by cover.
double cond_exp(const DecisionTree& tree, int id, uint32_t coalition,
                const Eigen::RowVectorXd& x) {
    const TreeNode& n = tree.nodes[static_cast<size_t>(id)];
    if (n.feature < 0) return n.value;
    if (coalition & (1u << n.feature)) {
        int next = x(n.feature) <= n.threshold ? n.left : n.right;
        return cond_exp(tree, next, coalition, x);
    }
    const TreeNode& l = tree.nodes[static_cast<size_t>(n.left)];
    const TreeNode& r = tree.nodes[static_cast<size_t>(n.right)];
    return (l.cover * cond_exp(tree, n.left, coalition, x) +
            r.cover * cond_exp(tree, n.right, coalition, x)) /
           n.cover;
}

// Exponential-enumeration Shapley values of the path-dependent game.
Eigen::VectorXd brute_force_shap(const DecisionTree& tree,
                                 const Eigen::RowVectorXd& x, int m) {
    auto fact = [](int k) {
        double f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
        for (uint32_t S = 0; S < (1u << m); ++S) {
            if (S & (1u << i)) continue;
            int s = __builtin_popcount(S);
            double weight = fact(s) * fact(m - s - 1) / fact(m);
            phi(i) += weight * (cond_exp(tree, 0, S | (1u << i), x) -
                                cond_exp(tree, 0, S, x));
        }
    }
    return phi;
}

struct Synth {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<std::string> columns;
};

Synth planted(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u;
    Synth s;
    s.X.resize(n, 5);
    s.y.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 5; ++j) s.X(i, j) = g(rng);
        bool label = s.X(i, 2) > 0;
        if (u(rng) < 0.05) label = !label;
        s.y[static_cast<size_t>(i)] = label ? 1 : 0;
    }
    s.columns = {"a", "b", "signal", "c", "d"};
    return s;
}

} // namespace

TEST_CASE("single-leaf tree gives zero attributions and base = leaf value") {
    DecisionTree tree;
    TreeNode leaf;
    leaf.feature = -1;
    leaf.value = 0.7;
    leaf.cover = 10;
    tree.nodes.push_back(leaf);
    Eigen::RowVectorXd x(3);
    x << 1, 2, 3;
    auto phi = tree_shap_row(tree, x, 3);
    CHECK(phi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tree_expected_value(tree) == doctest::Approx(0.7));
}

TEST_CASE("depth-1 tree: attribution equals leaf minus base on the taken branch") {
    DecisionTree tree;
    tree.nodes.resize(3);
    tree.nodes[0] = {0, 0.5, 1, 2, 10, 0.46};
    tree.nodes[1] = {-1, 0, -1, -1, 4, 0.1};   // x0 <= 0.5
    tree.nodes[2] = {-1, 0, -1, -1, 6, 0.7};   // x0 > 0.5
    Eigen::RowVectorXd x(2);
    x << 1.0, 9.9;
    auto phi = tree_shap_row(tree, x, 2);
    double base = tree_expected_value(tree);  // (4*0.1 + 6*0.7)/10 = 0.46
    CHECK(base == doctest::Approx(0.46).epsilon(1e-12));
    CHECK(phi(0) == doctest::Approx(0.7 - 0.46).epsilon(1e-12));
    CHECK(phi(1) == 0.0);  // dummy feature: exactly zero
}

TEST_CASE("tree shap equals exponential coalition enumeration (depth 3, 5 features)") {
    // deterministic random trees over 5 features
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        // build a random full depth-3 tree with random covers and values
        DecisionTree tree;
        std::function<int(int)> build = [&](int depth) {
            int id = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back({});
            if (depth == 3) {
                tree.nodes[static_cast<size_t>(id)].feature = -1;
                tree.nodes[static_cast<size_t>(id)].value = u(rng);
                return id;
            }
            int f = static_cast<int>(rng() % 5);
            double thr = u(rng);
            int l = build(depth + 1);
            int r = build(depth + 1);
            tree.nodes[static_cast<size_t>(id)].feature = f;
            tree.nodes[static_cast<size_t>(id)].threshold = thr;
            tree.nodes[static_cast<size_t>(id)].left = l;
            tree.nodes[static_cast<size_t>(id)].right = r;
            return id;
        };
        build(0);
        // covers: leaves random positive, internal = sum of children
        std::function<double(int)> cover = [&](int id) -> double {
            TreeNode& n = tree.nodes[static_cast<size_t>(id)];
            if (n.feature < 0) {
                n.cover = 1 + static_cast<double>(rng() % 9);
                return n.cover;
            }
            n.cover = cover(n.left) + cover(n.right);
            return n.cover;
        };
        cover(0);

        Eigen::RowVectorXd x(5);
        for (int j = 0; j < 5; ++j) x(j) = u(rng);
        auto fast = tree_shap_row(tree, x, 5);
        auto slow = brute_force_shap(tree, x, 5);
        for (int j = 0; j < 5; ++j)
            CHECK(fast(j) == doctest::Approx(slow(j)).epsilon(1e-9));
        // efficiency: sum phi = f(x) - E[f]
        double fx = cond_exp(tree, 0, 0x1f, x);
        CHECK(fast.sum() ==
              doctest::Approx(fx - tree_expected_value(tree)).epsilon(1e-9));
    }
}

TEST_CASE("symmetric split roles receive equal attributions") {
    // root on f0, both children on f1, XOR-style values, equal covers
    DecisionTree tree;
    tree.nodes.resize(7);
    tree.nodes[0] = {0, 0.5, 1, 2, 8, 0.5};
    tree.nodes[1] = {1, 0.5, 3, 4, 4, 0.5};
    tree.nodes[2] = {1, 0.5, 5, 6, 4, 0.5};
    tree.nodes[3] = {-1, 0, -1, -1, 2, 0.0};
    tree.nodes[4] = {-1, 0, -1, -1, 2, 1.0};
    tree.nodes[5] = {-1, 0, -1, -1, 2, 1.0};
    tree.nodes[6] = {-1, 0, -1, -1, 2, 0.0};
    Eigen::RowVectorXd x(2);
    x << 1.0, 1.0;
    auto phi = tree_shap_row(tree, x, 2);
    CHECK(phi(0) == doctest::Approx(phi(1)).epsilon(1e-12));
}

TEST_CASE("ensemble phi is the mean of per-tree phi") {
    auto s = planted(100, 3);
    auto model = Model::train(ClassifierKind::RF, s.X, s.y, s.columns,
                              [] { learn::ModelParams p; p.n_estimators = 7; return p; }(),
                              5);
    Eigen::RowVectorXd x = s.X.row(0);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
    for (const auto& t : model.forest().trees)
        mean += tree_shap_row(t, x, 5);
    mean /= static_cast<double>(model.forest().trees.size());
    auto phi = shap_row(model, x);
    CHECK((phi - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local accuracy holds on every row of a 500-row table") {
    auto s = planted(500, 9);
    auto model = Model::train(ClassifierKind::RF, s.X, s.y, s.columns, {}, 17);
    auto shap = shap_table(model, s.X);  // throws if any row violates 1e-9
    Eigen::VectorXd pred = model.predict_proba(s.X);
    for (int i = 0; i < 500; ++i) {
        double recon = shap.base_value + shap.phi.row(i).sum();
        CHECK(recon == doctest::Approx(pred(i)).epsilon(1e-9));
    }
}

TEST_CASE("shap table shape properties and permutation behavior") {
    auto s = planted(60, 13);
    auto model = Model::train(ClassifierKind::RF, s.X, s.y, s.columns, {}, 23);
    auto one = shap_table(model, s.X.topRows(1));
    CHECK(one.phi.rows() == 1);
    auto full = shap_table(model, s.X);
    // permuted rows give permuted phi
    Eigen::MatrixXd Xp(s.X.rows(), s.X.cols());
    for (long i = 0; i < s.X.rows(); ++i) Xp.row(i) = s.X.row(s.X.rows() - 1 - i);
    auto flipped = shap_table(model, Xp);
    CHECK((flipped.phi.row(0) - full.phi.row(full.phi.rows() - 1))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    // the planted feature dominates global importance
    auto imp = global_importance(full);
    long best = 0;
    imp.maxCoeff(&best);
    CHECK(best == 2);
}

TEST_CASE("global importance sums absolute phi") {
    ShapMatrix m;
    m.phi.resize(2, 3);
    m.phi << 0, 0.3, 0, 0, 0, 0;
    auto imp = global_importance(m);
    CHECK(imp(0) == 0.0);
    CHECK(imp(1) == doctest::Approx(0.3));
    CHECK(imp(2) == 0.0);
    m.phi << -0.1, 0.2, 0.0, 0.3, -0.4, 0.0;
    imp = global_importance(m);
    CHECK(imp(0) == doctest::Approx(0.4));
    CHECK(imp(1) == doctest::Approx(0.6));
}

TEST_CASE("per-release ranks: dominance, ties, delegation") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    std::vector<Eigen::VectorXd> imps;
    for (int b = 0; b < 100; ++b) {
        Eigen::VectorXd v(3);
        v << 10 + 0.1 * g(rng), 1 + 0.1 * g(rng), 1 + 0.1 * g(rng);
        imps.push_back(v);
    }
    auto ranks = per_release_feature_ranks(imps, {"big", "s1", "s2"});
    CHECK(ranks.at("big") == 1);
    CHECK(ranks.at("s1") == ranks.at("s2"));
    CHECK(ranks.at("s1") == 2);

    // identical distributions share rank 1
    std::vector<Eigen::VectorXd> flat(100, Eigen::VectorXd::Constant(2, 1.0));
    auto r2 = per_release_feature_ranks(flat, {"x", "y"});
    CHECK(r2.at("x") == 1);
    CHECK(r2.at("y") == 1);

    // delegation equality with a direct scott-knott call
    std::map<std::string, std::vector<double>> groups;
    for (const auto& v : imps) {
        groups["big"].push_back(v(0));
        groups["s1"].push_back(v(1));
        groups["s2"].push_back(v(2));
    }
    CHECK(ranks == stats::scott_knott_esd(groups));
}

TEST_CASE("final feature ranks across releases") {
    // always-first feature gets final rank 1; identical distributions share
    std::map<std::string, std::map<std::string, int>> per_release;
    for (int r = 0; r < 5; ++r) {
        std::map<std::string, int> ranks;
        ranks["alpha"] = 1;
        ranks["beta"] = r % 2 ? 2 : 3;
        ranks["gamma"] = r % 2 ? 3 : 2;
        ranks["delta"] = 4;
        per_release["rel" + std::to_string(r)] = ranks;
    }
    auto table = final_feature_ranks(per_release);
    CHECK(table.final_rank.at("alpha") == 1);
    CHECK(table.final_rank.at("beta") == table.final_rank.at("gamma"));
    CHECK(table.final_rank.at("delta") >
          table.final_rank.at("beta"));

    // hand-applied two-stage: the second stage ranks the negated rank
    // distributions, so equal distributions must tie exactly
    std::map<std::string, std::vector<double>> negated;
    for (const auto& [rel, ranks] : per_release)
        for (const auto& [f, k] : ranks)
            negated[f].push_back(-static_cast<double>(k));
    CHECK(table.final_rank == stats::scott_knott_esd(negated));
}

TEST_CASE("local report ordering, clamping and zero dropping") {
    DecisionTree tree;
    tree.nodes.resize(3);
    tree.nodes[0] = {0, 0.5, 1, 2, 10, 0.46};
    tree.nodes[1] = {-1, 0, -1, -1, 4, 0.1};
    tree.nodes[2] = {-1, 0, -1, -1, 6, 0.7};
    // wrap in a model via DT training on equivalent data is overkill here;
    // use the planted-signal model for the public surface instead
    auto s = planted(200, 19);
    auto model = Model::train(ClassifierKind::RF, s.X, s.y, s.columns, {}, 29);
    // a strongly positive signal row
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(5);
    row(2) = 3.0;
    auto rep = local_report(model, row, 3);
    REQUIRE(!rep.empty());
    CHECK(rep[0].feature == "signal");
    CHECK(rep[0].direction == 1);
    for (size_t i = 1; i < rep.size(); ++i)
        CHECK(std::abs(rep[i - 1].phi) >= std::abs(rep[i].phi));

    // top_n larger than the feature count clamps
    auto all = local_report(model, row, 99);
    CHECK(all.size() <= 5);
    CHECK_THROWS_AS(local_report(model, row, 0), Error);
}
