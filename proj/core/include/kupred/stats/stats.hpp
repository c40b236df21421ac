#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kupred::stats {

// ---- ranks and correlation ---------------------------------------------

// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

enum class CorrelationStrength { VeryWeak, Weak, Moderate, Strong, Large };

struct SpearmanResult {
    double rho = 0.0;
    bool degenerate = false;  // a constant series; rho defined as 0
};

SpearmanResult spearman_rho(const std::vector<double>& x,
                            const std::vector<double>& y);

// Thresholds evaluated on |rho| rounded to 2 decimals.
CorrelationStrength strength_of(double rho);
const char* strength_name(CorrelationStrength s);

// ---- paired and unpaired tests -------------------------------------------

struct WilcoxonResult {
    double p = 1.0;
    double w_plus = 0.0;
    int n_effective = 0;   // pairs left after dropping zero differences
    bool degenerate = false;
    bool exact = false;    // exact enumeration vs normal approximation
};

// Two-sided; exact enumeration for n <= kWilcoxonExactLimit after
// zero-difference removal, tie-corrected normal approximation above.
constexpr int kWilcoxonExactLimit = 12;
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

struct MannWhitneyResult {
    double p = 1.0;
    double u = 0.0;
};

// Two-sided, tie-corrected normal approximation with continuity correction.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b);

enum class EffectMagnitude { Negligible, Small, Medium, Large };

struct CliffsDelta {
    double delta = 0.0;
    EffectMagnitude magnitude = EffectMagnitude::Negligible;
};

CliffsDelta cliffs_delta(const std::vector<double>& a,
                         const std::vector<double>& b);
EffectMagnitude effect_magnitude(double delta);
const char* effect_letter(EffectMagnitude m);  // "N" "S" "M" "L"

// ---- feature selection ------------------------------------------------------

// VIF of column `target` against the other columns (least squares with
// intercept). Perfect collinearity yields +inf; a constant target is
// defined as 1.
double variance_inflation(const Eigen::MatrixXd& table, int target);

struct AutoSpearmanConfig {
    double rho_max = 0.7;
    double vif_max = 5.0;
};

// Two-phase selection: correlated-pair removal by Spearman, then iterative
// highest-VIF removal. Deterministic under fixed column order.
std::vector<std::string> auto_spearman(const Eigen::MatrixXd& table,
                                       const std::vector<std::string>& columns,
                                       const AutoSpearmanConfig& cfg = {});

// ---- Scott-Knott ESD ---------------------------------------------------------

struct ScottKnottConfig {
    double alpha = 0.05;
    double negligible_delta = 0.147;
};

// Ranks groups 1..k, rank 1 = largest median. Groups that cannot be split
// with a significant, non-negligible difference share a rank.
std::map<std::string, int> scott_knott_esd(
    const std::map<std::string, std::vector<double>>& groups,
    const ScottKnottConfig& cfg = {});

// ---- PCA ----------------------------------------------------------------------

struct PcaResult {
    Eigen::MatrixXd scores;            // rows x kept components
    Eigen::MatrixXd loadings;          // kept columns x components
    std::vector<double> explained;     // variance fraction per component
    std::vector<int> kept_columns;     // constant columns are dropped
    int components = 0;
};

// Standardizes columns, keeps the smallest component prefix reaching the
// variance threshold. Throws Error when every column is constant.
PcaResult pca_reduce(const Eigen::MatrixXd& table,
                     double variance_threshold = 0.90);

// ---- clustering ---------------------------------------------------------------

struct Clustering {
    std::vector<int> assignment;  // dense ids 0..k-1
    int k = 0;
    Eigen::MatrixXd centroids;
    double inertia = 0.0;
};

// Greedy-seeded k-means with n_init restarts, keeping lowest inertia.
// Throws Error when fewer distinct points than k exist.
Clustering kmeans_cluster(const Eigen::MatrixXd& points, int k, uint64_t seed,
                          int n_init = 10, int max_iter = 300);

double mean_silhouette(const Clustering& clustering,
                       const Eigen::MatrixXd& points);

struct ChooseKResult {
    int k = 0;
    double silhouette = -1.0;
    std::map<int, double> by_k;
};

// argmax of mean silhouette for k in [k_min, min(k_max, rows-1)]; ties
// within 1e-12 pick the smaller k.
ChooseKResult choose_k(const Eigen::MatrixXd& points, uint64_t seed,
                       int k_min = 2, int k_max = 40);

double adjusted_rand_index(const Clustering& c1, const Clustering& c2);

struct ClusterOverlapReport {
    // per KU cluster: fraction of its rows per code-metric cluster
    std::vector<std::map<int, double>> composition;
    std::vector<bool> overlapped;  // 100% of rows share one cm cluster
    double percent_not_overlapped = 0.0;
};

ClusterOverlapReport cluster_overlap_report(const Clustering& ku_clusters,
                                            const Clustering& cm_clusters);

} // namespace kupred::stats
