#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kupred/ku/detector.hpp"

namespace kupred::study {

struct ReleaseSpec {
    std::string project;
    std::string release;      // e.g. "groovy-1.5.7"
    std::string source_root;  // directory with the release's .java tree
    std::string label_file;   // defect CSV
    std::string repo_dir;     // optional git clone for process metrics
    std::string tag;          // release tag in the clone
    std::string prev_tag;     // previous release tag (window start)
    std::string label_path_column;    // "" = auto-detect
    std::string label_defect_column;  // "" = auto-detect
};

struct Thresholds {
    double rho_max = 0.7;
    double vif_max = 5.0;
    double pca_variance = 0.90;
    double sk_alpha = 0.05;
    double sk_delta = 0.147;
    int kmeans_k_min = 2;
    int kmeans_k_max = 40;
};

struct StudyConfig {
    uint64_t master_seed = 0;   // mandatory in the file
    std::string output_dir;     // overridable via KUPRED_OUT_DIR
    unsigned threads = 0;       // 0 = hardware; KUPRED_THREADS wins
    Thresholds thresholds;
    ku::DetectorConfig detector;
    bool shap_on_in_bag = false;  // default: SHAP over the full release table
    std::vector<ReleaseSpec> releases;

    std::string config_hash;    // filled at load time
    std::string run_dir() const;  // output_dir / ("run-" + hash prefix)
};

// Parses and validates the JSON config. Throws ConfigError on missing seed,
// unresolvable paths or malformed JSON.
StudyConfig load_config(const std::string& path);

// Canonical serialization used for run stamping.
std::string config_fingerprint(const StudyConfig& cfg);

} // namespace kupred::study
