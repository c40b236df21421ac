#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kupred/data/feature_table.hpp"
#include "kupred/explain/tree_shap.hpp"
#include "kupred/learn/evaluate.hpp"
#include "kupred/study/config.hpp"

namespace kupred::study {

// ---- extract -----------------------------------------------------------

struct ExtractOutcome {
    std::string release;
    bool ok = false;
    std::string error;
    data::JoinStats stats;
    size_t files_parsed = 0;
    size_t parse_failures = 0;
};

// Builds one release's feature table in memory. Throws on failure.
data::FeatureTable build_release_table(const ReleaseSpec& spec,
                                       const StudyConfig& cfg,
                                       ExtractOutcome* outcome = nullptr);

// Extracts every configured release to <run_dir>/tables/<release>.csv.
// Failures are isolated per release and reported in the outcomes.
std::vector<ExtractOutcome> run_extract(const StudyConfig& cfg);

// ---- preliminary study ----------------------------------------------------

struct PrelimRelease {
    std::string release;
    std::map<std::string, double> strength_histogram;  // category -> % of KUs
    int ku_k = 0;
    int cm_k = 0;
    double ari = 0.0;
    double percent_not_overlapped = 0.0;
};

struct PrelimReport {
    std::vector<PrelimRelease> releases;
    double median_ari = 0.0;
};

PrelimReport run_prelim(const StudyConfig& cfg);

// ---- research questions ----------------------------------------------------

struct StudyOutcome {
    std::vector<std::string> failed_releases;
    std::map<std::string, int> model_ranks;  // filled by rq4/rq5/rq6
};

StudyOutcome run_study(const StudyConfig& cfg, const std::string& rq);

// ---- local explanation -----------------------------------------------------

struct LocalExplanation {
    std::string release;
    std::string path;
    std::string model;  // feature-set name
    double prediction = 0.0;
    double base_value = 0.0;
    std::vector<explain::LocalAttribution> attributions;
};

// Loads the persisted model for (release, feature_set) and explains one
// file. Throws Error on unknown path / missing model.
LocalExplanation explain_file(const StudyConfig& cfg, const std::string& release,
                              const std::string& path,
                              const std::string& feature_set, int top_n);

// Regenerates comparison tables from persisted evaluation results.
void run_report(const StudyConfig& cfg);

// ---- shared helpers (exposed for tests) -------------------------------------

// Rows usable for modeling: trainable and NaN-free across the 87 canonical
// model columns, so every feature set shares one bootstrap plan.
std::vector<size_t> modeling_rows(const data::FeatureTable& table);

struct ModelMatrix {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<std::string> columns;
};

// Matrix over the given columns, restricted to `rows`, after AutoSpearman
// feature selection (when apply_auto_spearman).
ModelMatrix model_matrix(const data::FeatureTable& table,
                         const std::vector<std::string>& columns,
                         const std::vector<size_t>& rows,
                         const StudyConfig& cfg, bool apply_auto_spearman);

uint64_t release_seed(const StudyConfig& cfg, const std::string& release);

// Model persistence for the explain command.
void save_model_json(const learn::Model& model, const std::string& path);
learn::Model load_model_json(const std::string& path);

} // namespace kupred::study
