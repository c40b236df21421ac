#include "kupred/learn/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kupred/util/error.hpp"
#include "kupred/util/parallel.hpp"
#include "kupred/util/rng.hpp"

namespace kupred::learn {

BootstrapPlan bootstrap_plan(int n_rows, uint64_t master_seed) {
    if (n_rows < 10) throw Error("bootstrap_plan: need at least 10 rows");
    BootstrapPlan plan;
    plan.master_seed = master_seed;
    plan.in_bag.resize(kBootstrapRounds);
    plan.out_bag.resize(kBootstrapRounds);
    for (int r = 0; r < kBootstrapRounds; ++r) {
        auto rng = make_rng(master_seed, static_cast<uint64_t>(r));
        std::uniform_int_distribution<int> pick(0, n_rows - 1);
        for (;;) {  // redraw until the complement is non-empty
            std::vector<int> bag(static_cast<size_t>(n_rows));
            std::vector<char> seen(static_cast<size_t>(n_rows), 0);
            for (int i = 0; i < n_rows; ++i) {
                bag[static_cast<size_t>(i)] = pick(rng);
                seen[static_cast<size_t>(bag[static_cast<size_t>(i)])] = 1;
            }
            std::vector<int> oob;
            for (int i = 0; i < n_rows; ++i)
                if (!seen[static_cast<size_t>(i)]) oob.push_back(i);
            if (oob.empty()) continue;
            plan.in_bag[static_cast<size_t>(r)] = std::move(bag);
            plan.out_bag[static_cast<size_t>(r)] = std::move(oob);
            break;
        }
    }
    return plan;
}

std::optional<double> roc_auc(const std::vector<int>& labels,
                              const Eigen::VectorXd& scores) {
    if (labels.size() != static_cast<size_t>(scores.size()))
        throw Error("roc_auc: size mismatch");
    double n_pos = 0, n_neg = 0;
    for (int l : labels) (l ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    std::vector<double> s(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) s[i] = scores(static_cast<long>(i));
    auto ranks = stats::average_ranks(s);
    double rank_sum_pos = 0;
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i]) rank_sum_pos += ranks[i];
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

std::vector<double> EvalResult::valid_aucs() const {
    std::vector<double> out;
    for (size_t i = 0; i < auc.size(); ++i)
        if (!skipped[i]) out.push_back(auc[i]);
    return out;
}

double EvalResult::median_auc() const {
    auto v = valid_aucs();
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

EvalResult out_of_sample_evaluate(const Eigen::MatrixXd& X,
                                  const std::vector<int>& y,
                                  const std::vector<std::string>& columns,
                                  ClassifierKind kind, const ModelParams& params,
                                  const BootstrapPlan& plan, unsigned threads) {
    if (static_cast<size_t>(X.rows()) != y.size())
        throw Error("out_of_sample_evaluate: row/label mismatch");
    if (plan.in_bag.empty() ||
        plan.in_bag[0].size() != static_cast<size_t>(X.rows()))
        throw Error("out_of_sample_evaluate: plan built for a different table");

    EvalResult result;
    result.classifier = classifier_name(kind);
    result.auc.assign(kBootstrapRounds, 0.0);
    result.skipped.assign(kBootstrapRounds, true);

    parallel_for(kBootstrapRounds, [&](size_t r) {
        const auto& bag = plan.in_bag[r];
        const auto& oob = plan.out_bag[r];
        std::vector<int> bag_labels;
        bag_labels.reserve(bag.size());
        int pos = 0;
        for (int i : bag) {
            bag_labels.push_back(y[static_cast<size_t>(i)]);
            pos += y[static_cast<size_t>(i)];
        }
        if (pos == 0 || pos == static_cast<int>(bag.size())) return;  // skip
        std::vector<int> oob_labels;
        int opos = 0;
        for (int i : oob) {
            oob_labels.push_back(y[static_cast<size_t>(i)]);
            opos += y[static_cast<size_t>(i)];
        }
        if (opos == 0 || opos == static_cast<int>(oob.size())) return;  // skip

        Eigen::MatrixXd Xbag(static_cast<long>(bag.size()), X.cols());
        for (size_t i = 0; i < bag.size(); ++i) Xbag.row(static_cast<long>(i)) = X.row(bag[i]);
        Eigen::MatrixXd Xoob(static_cast<long>(oob.size()), X.cols());
        for (size_t i = 0; i < oob.size(); ++i) Xoob.row(static_cast<long>(i)) = X.row(oob[i]);

        Model m = Model::train(kind, Xbag, bag_labels, columns, params,
                               derive_seed(plan.master_seed, r));
        auto auc = roc_auc(oob_labels, m.predict_proba(Xoob));
        if (!auc) return;
        result.auc[r] = *auc;
        result.skipped[r] = false;
    }, threads);
    return result;
}

GridSearchResult grid_search_cv(ClassifierKind kind,
                                const std::vector<ModelParams>& grid,
                                const Eigen::MatrixXd& X,
                                const std::vector<int>& y, uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    int pos = 0;
    for (int v : y) pos += v;
    if (n < 20 || pos == 0 || pos == n)
        throw Error("grid_search_cv: need >= 20 rows with both classes");
    if (grid.empty()) throw Error("grid_search_cv: empty grid");

    GridSearchResult out;
    out.folds_used = 10;
    if (n < 50) {
        out.folds_used = 5;
        out.reduced_folds = true;
    }
    const int k = out.folds_used;

    // stratified fold assignment: shuffle within class, deal round-robin
    std::vector<int> fold(static_cast<size_t>(n), 0);
    {
        std::vector<int> pos_idx, neg_idx;
        for (int i = 0; i < n; ++i)
            (y[static_cast<size_t>(i)] ? pos_idx : neg_idx).push_back(i);
        auto rng = make_rng(seed, 0x5f01d);
        std::shuffle(pos_idx.begin(), pos_idx.end(), rng);
        std::shuffle(neg_idx.begin(), neg_idx.end(), rng);
        int f = 0;
        for (int i : pos_idx) fold[static_cast<size_t>(i)] = f++ % k;
        for (int i : neg_idx) fold[static_cast<size_t>(i)] = f++ % k;
    }

    std::vector<std::string> columns;  // anonymous schema for CV internals
    for (long j = 0; j < X.cols(); ++j) columns.push_back("f" + std::to_string(j));

    double best_score = -1;
    size_t best_idx = 0;
    for (size_t g = 0; g < grid.size(); ++g) {
        double total = 0;
        int scored = 0;
        for (int f = 0; f < k; ++f) {
            std::vector<int> tr, te;
            for (int i = 0; i < n; ++i)
                (fold[static_cast<size_t>(i)] == f ? te : tr).push_back(i);
            std::vector<int> ytr, yte;
            int tr_pos = 0, te_pos = 0;
            for (int i : tr) {
                ytr.push_back(y[static_cast<size_t>(i)]);
                tr_pos += y[static_cast<size_t>(i)];
            }
            for (int i : te) {
                yte.push_back(y[static_cast<size_t>(i)]);
                te_pos += y[static_cast<size_t>(i)];
            }
            if (tr_pos == 0 || tr_pos == static_cast<int>(tr.size())) continue;
            if (te_pos == 0 || te_pos == static_cast<int>(te.size())) continue;
            if (kind == ClassifierKind::KNN &&
                static_cast<int>(tr.size()) < grid[g].n_neighbors)
                continue;
            Eigen::MatrixXd Xtr(static_cast<long>(tr.size()), X.cols());
            Eigen::MatrixXd Xte(static_cast<long>(te.size()), X.cols());
            for (size_t i = 0; i < tr.size(); ++i) Xtr.row(static_cast<long>(i)) = X.row(tr[i]);
            for (size_t i = 0; i < te.size(); ++i) Xte.row(static_cast<long>(i)) = X.row(te[i]);
            Model m = Model::train(kind, Xtr, ytr, columns, grid[g],
                                   derive_seed(seed, g * 100 + static_cast<size_t>(f)));
            auto auc = roc_auc(yte, m.predict_proba(Xte));
            if (!auc) continue;
            total += *auc;
            ++scored;
        }
        if (scored == 0) continue;
        double mean = total / scored;
        if (mean > best_score + 1e-15) {
            best_score = mean;
            best_idx = g;
        }
    }
    if (best_score < 0) throw Error("grid_search_cv: no configuration scored");
    out.best = grid[best_idx];
    out.best_score = best_score;
    return out;
}

double normalized_auc_improvement(double auc_model, double auc_baseline) {
    if (auc_baseline >= 1.0)
        throw Error("normalized_auc_improvement: baseline AUC is perfect");
    return (auc_model - auc_baseline) / (1.0 - auc_baseline) * 100.0;
}

ModelComparison compare_models(const EvalResult& model,
                               const EvalResult& baseline) {
    std::vector<double> a, b;
    std::vector<double> improvements;
    for (size_t i = 0; i < model.auc.size() && i < baseline.auc.size(); ++i) {
        if (model.skipped[i] || baseline.skipped[i]) continue;
        a.push_back(model.auc[i]);
        b.push_back(baseline.auc[i]);
        if (baseline.auc[i] < 1.0)
            improvements.push_back(
                normalized_auc_improvement(model.auc[i], baseline.auc[i]));
    }
    if (a.empty()) throw Error("compare_models: no paired slots");
    ModelComparison out;
    out.paired_slots = static_cast<int>(a.size());
    out.p_value = stats::wilcoxon_signed_rank(a, b).p;
    auto cd = stats::cliffs_delta(a, b);
    out.delta = cd.delta;
    out.magnitude = cd.magnitude;
    if (!improvements.empty())
        out.mean_normalized_improvement =
            std::accumulate(improvements.begin(), improvements.end(), 0.0) /
            static_cast<double>(improvements.size());
    return out;
}

std::map<std::string, int> rank_models(
    const std::map<std::string, std::vector<double>>& pooled_aucs) {
    if (pooled_aucs.size() < 2) throw Error("rank_models: need >= 2 models");
    return stats::scott_knott_esd(pooled_aucs);
}

} // namespace kupred::learn
