#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kupred/learn/model.hpp"
#include "kupred/stats/stats.hpp"

namespace kupred::learn {

constexpr int kBootstrapRounds = 100;

// 100 with-replacement resamples plus their out-of-bag complements,
// reproducible from the master seed.
struct BootstrapPlan {
    uint64_t master_seed = 0;
    std::vector<std::vector<int>> in_bag;   // size n each
    std::vector<std::vector<int>> out_bag;  // non-empty complements
};

BootstrapPlan bootstrap_plan(int n_rows, uint64_t master_seed);

// Rank-based AUC (the Mann-Whitney statistic). Returns nullopt when the
// evaluation labels are single-class.
std::optional<double> roc_auc(const std::vector<int>& labels,
                              const Eigen::VectorXd& scores);

struct EvalResult {
    std::string release;
    std::string feature_set;
    std::string classifier;
    std::vector<double> auc;      // exactly kBootstrapRounds slots
    std::vector<bool> skipped;    // degenerate out-of-bag splits

    std::vector<double> valid_aucs() const;
    double median_auc() const;
};

// Trains on each in-bag sample, scores its out-of-bag complement. Round r
// uses seed master_seed ^ r derivation, so thread scheduling cannot change
// results.
EvalResult out_of_sample_evaluate(const Eigen::MatrixXd& X,
                                  const std::vector<int>& y,
                                  const std::vector<std::string>& columns,
                                  ClassifierKind kind,
                                  const ModelParams& params,
                                  const BootstrapPlan& plan,
                                  unsigned threads = 0);

// Stratified k-fold grid search scored by mean AUC; deterministic tie-break
// by grid order. Folds drop to 5 with a warning below 50 rows.
struct GridSearchResult {
    ModelParams best;
    double best_score = 0.0;
    int folds_used = 10;
    bool reduced_folds = false;
};

GridSearchResult grid_search_cv(ClassifierKind kind,
                                const std::vector<ModelParams>& grid,
                                const Eigen::MatrixXd& X,
                                const std::vector<int>& y, uint64_t seed);

// (model - baseline) / (1 - baseline) * 100. Throws on a perfect baseline.
double normalized_auc_improvement(double auc_model, double auc_baseline);

struct ModelComparison {
    double p_value = 1.0;
    double delta = 0.0;
    stats::EffectMagnitude magnitude = stats::EffectMagnitude::Negligible;
    double mean_normalized_improvement = 0.0;
    int paired_slots = 0;
};

// Paired by bootstrap index; skipped slots are dropped pairwise.
ModelComparison compare_models(const EvalResult& model,
                               const EvalResult& baseline);

// SK-ESD ranking over pooled AUC distributions (rank 1 = best).
std::map<std::string, int> rank_models(
    const std::map<std::string, std::vector<double>>& pooled_aucs);

} // namespace kupred::learn
