// kupred: knowledge-unit detection and defect-prediction study driver.
//
// Subcommands mirror the study stages: extract feature tables, run the
// preliminary clustering study, run a research-question experiment, explain
// a single file, or regenerate report tables from persisted results.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kupred/study/config.hpp"
#include "kupred/study/pipeline.hpp"
#include "kupred/util/error.hpp"

using namespace kupred;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

int cmd_extract(const study::StudyConfig& cfg) {
    auto outcomes = study::run_extract(cfg);
    bool any_fail = false;
    for (const auto& oc : outcomes) {
        if (oc.ok) {
            std::cout << "[extract] " << oc.release << ": " << oc.stats.matched
                      << " rows matched, " << oc.stats.label_only
                      << " labeled-only, " << oc.stats.feature_only
                      << " unlabeled, " << oc.parse_failures
                      << " parse failures\n";
        } else {
            any_fail = true;
            std::cerr << "[extract] " << oc.release << " FAILED: " << oc.error
                      << "\n";
        }
    }
    std::cout << "tables written under " << cfg.run_dir() << "/tables\n";
    return any_fail ? kExitPartial : kExitOk;
}

int cmd_prelim(const study::StudyConfig& cfg) {
    auto report = study::run_prelim(cfg);
    for (const auto& r : report.releases) {
        std::cout << "[prelim] " << r.release << ": KU clusters " << r.ku_k
                  << ", CM clusters " << r.cm_k << ", ARI " << r.ari
                  << ", KU clusters not overlapped "
                  << r.percent_not_overlapped << "%\n";
    }
    std::cout << "[prelim] median ARI across releases: " << report.median_ari
              << "\n";
    return kExitOk;
}

int cmd_study(const study::StudyConfig& cfg, const std::string& rq) {
    auto outcome = study::run_study(cfg, rq);
    for (const auto& f : outcome.failed_releases)
        std::cerr << "[study " << rq << "] release failed: " << f << "\n";
    if (!outcome.model_ranks.empty()) {
        std::cout << "[study " << rq << "] SK-ESD model ranks:\n";
        for (const auto& [name, rank] : outcome.model_ranks)
            std::cout << "  rank " << rank << "  " << name << "\n";
    }
    std::cout << "results under " << cfg.run_dir() << "/study/" << rq << "\n";
    return outcome.failed_releases.empty() ? kExitOk : kExitPartial;
}

int cmd_explain(const study::StudyConfig& cfg, const std::string& release,
                const std::string& path, const std::string& model, int top_n) {
    // the study reads explanations from both the KU view and the CC view
    std::vector<std::string> model_list;
    if (model == "both") model_list = {"KUCLS", "CC"};
    else model_list = {model};
    for (const auto& m : model_list) {
        auto ex = study::explain_file(cfg, release, path, m, top_n);
        std::cout << "[explain] " << ex.path << " (" << m << "): prediction "
                  << ex.prediction << ", base " << ex.base_value << "\n";
        for (const auto& a : ex.attributions)
            std::cout << "  " << (a.direction > 0 ? "+" : "-") << " "
                      << a.feature << "  phi=" << a.phi << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"KU-based defect prediction study toolchain"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "study config JSON")
        ->required()
        ->check(CLI::ExistingFile);

    auto* extract =
        app.add_subcommand("extract", "build per-release feature tables");
    auto* prelim =
        app.add_subcommand("prelim", "correlation + clustering study");
    auto* studycmd =
        app.add_subcommand("study", "run a research-question experiment");
    std::string rq = "rq1";
    studycmd->add_option("--rq", rq, "one of rq1, rq2, rq4, rq5, rq6")
        ->required();
    auto* explaincmd =
        app.add_subcommand("explain", "local SHAP explanation of one file");
    std::string release, path, model = "both";
    int top_n = 10;
    explaincmd->add_option("--release", release)->required();
    explaincmd->add_option("--path", path)->required();
    explaincmd->add_option("--model", model, "KUCLS, CC, KUCLS+CC or both");
    explaincmd->add_option("--top", top_n, "attributions to list");
    auto* report =
        app.add_subcommand("report", "regenerate comparison tables");

    CLI11_PARSE(app, argc, argv);

    study::StudyConfig cfg;
    try {
        cfg = study::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (extract->parsed()) return cmd_extract(cfg);
        if (prelim->parsed()) return cmd_prelim(cfg);
        if (studycmd->parsed()) return cmd_study(cfg, rq);
        if (explaincmd->parsed())
            return cmd_explain(cfg, release, path, model, top_n);
        if (report->parsed()) {
            study::run_report(cfg);
            std::cout << "report written under " << cfg.run_dir() << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitConfig;
}
