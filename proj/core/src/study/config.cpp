#include "kupred/study/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kupred/util/error.hpp"

namespace kupred::study {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fnv_hex(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::string StudyConfig::run_dir() const {
    fs::path base = output_dir.empty() ? "kupred-out" : output_dir;
    return (base / ("run-" + config_hash.substr(0, 12))).string();
}

std::string config_fingerprint(const StudyConfig& cfg) {
    json j;
    j["master_seed"] = cfg.master_seed;
    j["thresholds"] = {
        {"rho_max", cfg.thresholds.rho_max},
        {"vif_max", cfg.thresholds.vif_max},
        {"pca_variance", cfg.thresholds.pca_variance},
        {"sk_alpha", cfg.thresholds.sk_alpha},
        {"sk_delta", cfg.thresholds.sk_delta},
        {"kmeans_k_min", cfg.thresholds.kmeans_k_min},
        {"kmeans_k_max", cfg.thresholds.kmeans_k_max},
    };
    j["detector"] = {
        {"unknown_as_project_local", cfg.detector.unknown_as_project_local},
        {"match_unresolved_api_names", cfg.detector.match_unresolved_api_names},
    };
    j["shap_on_in_bag"] = cfg.shap_on_in_bag;
    json rels = json::array();
    for (const auto& r : cfg.releases) {
        rels.push_back({{"project", r.project},
                        {"release", r.release},
                        {"source_root", r.source_root},
                        {"label_file", r.label_file},
                        {"repo_dir", r.repo_dir},
                        {"tag", r.tag},
                        {"prev_tag", r.prev_tag}});
    }
    j["releases"] = std::move(rels);
    return j.dump();
}

StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }

    StudyConfig cfg;
    if (!j.contains("master_seed"))
        throw ConfigError("config is missing the mandatory master_seed");
    cfg.master_seed = j.at("master_seed").get<uint64_t>();
    cfg.output_dir = j.value("output_dir", "kupred-out");
    if (const char* env = std::getenv("KUPRED_OUT_DIR")) cfg.output_dir = env;
    cfg.threads = j.value("threads", 0u);

    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        cfg.thresholds.rho_max = t.value("rho_max", cfg.thresholds.rho_max);
        cfg.thresholds.vif_max = t.value("vif_max", cfg.thresholds.vif_max);
        cfg.thresholds.pca_variance =
            t.value("pca_variance", cfg.thresholds.pca_variance);
        cfg.thresholds.sk_alpha = t.value("sk_alpha", cfg.thresholds.sk_alpha);
        cfg.thresholds.sk_delta = t.value("sk_delta", cfg.thresholds.sk_delta);
        cfg.thresholds.kmeans_k_min =
            t.value("kmeans_k_min", cfg.thresholds.kmeans_k_min);
        cfg.thresholds.kmeans_k_max =
            t.value("kmeans_k_max", cfg.thresholds.kmeans_k_max);
    }
    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        cfg.detector.unknown_as_project_local =
            d.value("unknown_as_project_local", true);
        cfg.detector.match_unresolved_api_names =
            d.value("match_unresolved_api_names", true);
    }
    cfg.shap_on_in_bag = j.value("shap_on_in_bag", false);

    if (!j.contains("releases") || !j.at("releases").is_array() ||
        j.at("releases").empty())
        throw ConfigError("config needs a non-empty releases array");
    fs::path config_dir = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        fs::path fp(p);
        if (fp.is_relative()) fp = config_dir / fp;
        return fp.string();
    };
    for (const auto& rj : j.at("releases")) {
        ReleaseSpec r;
        r.project = rj.value("project", "");
        r.release = rj.at("release").get<std::string>();
        r.source_root = resolve(rj.at("source_root").get<std::string>());
        r.label_file = resolve(rj.at("label_file").get<std::string>());
        r.repo_dir = resolve(rj.value("repo_dir", ""));
        r.tag = rj.value("tag", "");
        r.prev_tag = rj.value("prev_tag", "");
        r.label_path_column = rj.value("label_path_column", "");
        r.label_defect_column = rj.value("label_defect_column", "");
        if (!fs::exists(r.source_root))
            throw ConfigError("source_root does not exist: " + r.source_root);
        if (!fs::exists(r.label_file))
            throw ConfigError("label_file does not exist: " + r.label_file);
        if (!r.tag.empty() && r.tag == r.prev_tag)
            throw ConfigError("release and previous tags must differ: " + r.tag);
        cfg.releases.push_back(std::move(r));
    }

    cfg.config_hash = fnv_hex(config_fingerprint(cfg));
    return cfg;
}

} // namespace kupred::study
