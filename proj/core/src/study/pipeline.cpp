#include "kupred/study/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kupred/java/parser.hpp"
#include "kupred/metrics/process.hpp"
#include "kupred/metrics/product.hpp"
#include "kupred/stats/stats.hpp"
#include "kupred/util/csv.hpp"
#include "kupred/util/error.hpp"
#include "kupred/util/numtext.hpp"
#include "kupred/util/parallel.hpp"
#include "kupred/util/rng.hpp"

namespace kupred::study {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

uint64_t fnv(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

// Optional verbatim process metrics from the defect CSV itself (preferred
// for reproduction runs over recomputing from git).
std::map<std::string, metrics::ProcessMetricVector> process_from_label_csv(
    const std::string& csv_path, const std::string& path_column) {
    std::map<std::string, metrics::ProcessMetricVector> out;
    auto rows = csv::read_file(csv_path);
    if (rows.empty()) return out;
    const auto& header = rows[0];
    std::map<std::string, long> idx;
    for (size_t i = 0; i < header.size(); ++i) idx[header[i]] = static_cast<long>(i);
    for (const char* c : {"COMM", "ADDED_LINES", "DEL_LINES", "ADEV", "DDEV"})
        if (!idx.count(c)) return out;  // CSV does not carry process metrics
    long path_col = -1;
    if (!path_column.empty() && idx.count(path_column)) path_col = idx[path_column];
    if (path_col < 0)
        for (const char* c : {"File", "file", "filename", "Filename", "name"})
            if (idx.count(c)) {
                path_col = idx[c];
                break;
            }
    if (path_col < 0) return out;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size()) continue;
        metrics::ProcessMetricVector v;
        try {
            v.comm = parse_double(r[static_cast<size_t>(idx["COMM"])]);
            v.added_lines = parse_double(r[static_cast<size_t>(idx["ADDED_LINES"])]);
            v.del_lines = parse_double(r[static_cast<size_t>(idx["DEL_LINES"])]);
            v.adev = parse_double(r[static_cast<size_t>(idx["ADEV"])]);
            v.ddev = parse_double(r[static_cast<size_t>(idx["DDEV"])]);
        } catch (const Error&) {
            continue;
        }
        out[data::normalize_path(r[static_cast<size_t>(path_col)])] = v;
    }
    return out;
}

std::vector<java::SourceUnit> load_release_units(const ReleaseSpec& spec) {
    std::vector<java::SourceUnit> units;
    fs::path root(spec.source_root);
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file() && e.path().extension() == ".java")
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::string rel = fs::relative(f, root).generic_string();
        try {
            units.push_back(java::read_source(f.string(),
                                              data::normalize_path(rel),
                                              spec.release));
        } catch (const Error&) {
            units.push_back({data::normalize_path(rel), spec.release, ""});
        }
    }
    if (units.empty())
        throw Error("no .java files under " + spec.source_root);
    return units;
}

std::string eval_csv_header() {
    return "release,model,slot,auc,skipped\n";
}

std::string eval_csv_rows(const learn::EvalResult& r) {
    std::string out;
    for (size_t i = 0; i < r.auc.size(); ++i) {
        out += csv::join_row({r.release, r.feature_set + "/" + r.classifier,
                              std::to_string(i),
                              r.skipped[i] ? "NA" : format_double(r.auc[i]),
                              r.skipped[i] ? "1" : "0"});
    }
    return out;
}

} // namespace

std::vector<size_t> modeling_rows(const data::FeatureTable& table) {
    auto cols = data::feature_set_columns(data::FeatureSet::KU_CC);
    std::vector<size_t> idx;
    for (const auto& c : cols) idx.push_back(table.column_index(c));
    std::vector<size_t> rows;
    for (size_t r : table.trainable_rows()) {
        bool ok = true;
        for (size_t c : idx)
            if (std::isnan(table.rows()[r].values[c])) ok = false;
        if (ok) rows.push_back(r);
    }
    return rows;
}

ModelMatrix model_matrix(const data::FeatureTable& table,
                         const std::vector<std::string>& columns,
                         const std::vector<size_t>& rows,
                         const StudyConfig& cfg, bool apply_auto_spearman) {
    std::vector<size_t> idx;
    for (const auto& c : columns) idx.push_back(table.column_index(c));
    Eigen::MatrixXd X(static_cast<long>(rows.size()),
                      static_cast<long>(columns.size()));
    std::vector<int> y;
    y.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = table.rows()[rows[i]];
        for (size_t j = 0; j < idx.size(); ++j)
            X(static_cast<long>(i), static_cast<long>(j)) = row.values[idx[j]];
        y.push_back(row.label);
    }
    ModelMatrix out;
    out.y = std::move(y);
    if (apply_auto_spearman && columns.size() >= 2 && rows.size() >= 3) {
        stats::AutoSpearmanConfig asc;
        asc.rho_max = cfg.thresholds.rho_max;
        asc.vif_max = cfg.thresholds.vif_max;
        auto kept = stats::auto_spearman(X, columns, asc);
        std::vector<long> keep_idx;
        for (const auto& k : kept)
            for (size_t j = 0; j < columns.size(); ++j)
                if (columns[j] == k) keep_idx.push_back(static_cast<long>(j));
        Eigen::MatrixXd Xk(X.rows(), static_cast<long>(keep_idx.size()));
        for (size_t j = 0; j < keep_idx.size(); ++j) Xk.col(static_cast<long>(j)) = X.col(keep_idx[j]);
        out.X = std::move(Xk);
        out.columns = kept;
    } else {
        out.X = std::move(X);
        out.columns = columns;
    }
    return out;
}

uint64_t release_seed(const StudyConfig& cfg, const std::string& release) {
    return derive_seed(cfg.master_seed, fnv(release));
}

data::FeatureTable build_release_table(const ReleaseSpec& spec,
                                       const StudyConfig& cfg,
                                       ExtractOutcome* outcome) {
    auto units = load_release_units(spec);
    auto detection = ku::detect_release(units, cfg.detector, cfg.threads);

    // product metrics per file (parallel), sharing the release type graph
    std::map<std::string, java::SyntaxTree> trees;
    std::vector<const java::SyntaxTree*> tree_ptrs;
    std::vector<java::SyntaxTree> storage(units.size());
    parallel_for(units.size(), [&](size_t i) {
        try {
            storage[i] = java::parse_java(units[i]);
        } catch (const Error&) {
            storage[i].path = units[i].path;
            storage[i].fatal = true;
        }
    }, cfg.threads);
    for (auto& t : storage)
        if (!t.fatal) tree_ptrs.push_back(&t);
    auto origins = java::TypeOriginTable::build(tree_ptrs);

    std::vector<metrics::ProductMetricVector> product(units.size());
    parallel_for(units.size(), [&](size_t i) {
        product[i] = metrics::compute_product_metrics(storage[i], units[i].text,
                                                      &origins);
    }, cfg.threads);

    data::AssemblyInput in;
    in.release_id = spec.release;
    for (size_t i = 0; i < units.size(); ++i) {
        in.product[units[i].path] = product[i];
        in.parse_failed[units[i].path] = storage[i].fatal;
    }
    for (const auto& row : detection.rows) in.ku[row.path] = row.vector;

    // process metrics: prefer verbatim values from the defect CSV, fall back
    // to the git history when a clone is configured
    in.process = process_from_label_csv(spec.label_file, spec.label_path_column);
    if (in.process.empty() && !spec.repo_dir.empty() && !spec.tag.empty()) {
        auto hist = metrics::load_git_history(spec.repo_dir, spec.tag,
                                              spec.prev_tag);
        for (const auto& [path, vec] : in.ku) {
            auto v = metrics::compute_process_metrics(hist.commits, hist.window,
                                                      path);
            if (v.path_found) in.process[path] = v;
        }
    }

    data::LabelConfig lc;
    lc.path_column = spec.label_path_column;
    lc.label_column = spec.label_defect_column;
    auto ingest = data::ingest_defect_labels(spec.label_file, lc);
    in.labels = ingest.labels;

    data::JoinStats stats;
    auto table = data::assemble_feature_table(in, &stats);
    if (outcome) {
        outcome->release = spec.release;
        outcome->stats = stats;
        outcome->files_parsed = units.size();
        for (const auto& row : detection.rows)
            if (row.parse_failed) ++outcome->parse_failures;
    }
    return table;
}

std::vector<ExtractOutcome> run_extract(const StudyConfig& cfg) {
    fs::path run(cfg.run_dir());
    fs::create_directories(run / "tables");
    write_file(run / "manifest.json", [&] {
        json m;
        m["tool"] = "kupred";
        m["version"] = "0.1.0";
        m["config_hash"] = cfg.config_hash;
        m["master_seed"] = cfg.master_seed;
        m["thresholds"] = {{"rho_max", cfg.thresholds.rho_max},
                           {"vif_max", cfg.thresholds.vif_max},
                           {"pca_variance", cfg.thresholds.pca_variance},
                           {"sk_alpha", cfg.thresholds.sk_alpha},
                           {"sk_delta", cfg.thresholds.sk_delta}};
        return m.dump(2) + "\n";
    }());

    std::vector<ExtractOutcome> outcomes;
    for (const auto& spec : cfg.releases) {
        ExtractOutcome oc;
        oc.release = spec.release;
        try {
            auto table = build_release_table(spec, cfg, &oc);
            data::write_table_csv(table,
                                  (run / "tables" / (slug(spec.release) + ".csv"))
                                      .string());
            json st;
            st["release"] = spec.release;
            st["labeled"] = oc.stats.labeled;
            st["matched"] = oc.stats.matched;
            st["label_only"] = oc.stats.label_only;
            st["feature_only"] = oc.stats.feature_only;
            st["files_parsed"] = oc.files_parsed;
            st["parse_failures"] = oc.parse_failures;
            write_file(run / "tables" / (slug(spec.release) + ".stats.json"),
                       st.dump(2) + "\n");
            oc.ok = true;
        } catch (const std::exception& e) {
            oc.ok = false;
            oc.error = e.what();
        }
        outcomes.push_back(std::move(oc));
    }
    return outcomes;
}

namespace {

data::FeatureTable load_release_table(const StudyConfig& cfg,
                                      const std::string& release) {
    fs::path p = fs::path(cfg.run_dir()) / "tables" / (slug(release) + ".csv");
    if (!fs::exists(p))
        throw Error("feature table missing (run extract first): " + p.string());
    return data::read_table_csv(p.string(), &data::full_feature_schema());
}

Eigen::MatrixXd submatrix(const data::FeatureTable& table,
                          const std::vector<std::string>& cols,
                          const std::vector<size_t>& rows) {
    std::vector<size_t> idx;
    for (const auto& c : cols) idx.push_back(table.column_index(c));
    Eigen::MatrixXd X(static_cast<long>(rows.size()), static_cast<long>(idx.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j)
            X(static_cast<long>(i), static_cast<long>(j)) =
                table.rows()[rows[i]].values[idx[j]];
    return X;
}

} // namespace

PrelimReport run_prelim(const StudyConfig& cfg) {
    fs::path run(cfg.run_dir());
    fs::create_directories(run / "prelim");
    PrelimReport report;
    std::vector<double> aris;

    std::string strengths_csv = "release,ku,best_abs_rho,strength\n";
    std::string summary_csv =
        "release,ku_clusters,cm_clusters,ari,percent_ku_clusters_not_overlapped\n";

    for (const auto& spec : cfg.releases) {
        auto table = load_release_table(cfg, spec.release);
        auto rows = modeling_rows(table);
        if (rows.size() < 4) throw Error("too few rows for prelim: " + spec.release);

        auto ku_cols = data::feature_set_columns(data::FeatureSet::KU);
        auto cm_cols = data::feature_set_columns(data::FeatureSet::PROD_PROC);
        Eigen::MatrixXd KU = submatrix(table, ku_cols, rows);
        Eigen::MatrixXd CM = submatrix(table, cm_cols, rows);

        PrelimRelease pr;
        pr.release = spec.release;

        // strongest |rho| of each KU against any code metric
        std::map<std::string, int> hist;
        for (const char* cat : {"very weak", "weak", "moderate", "strong", "large"})
            hist[cat] = 0;
        for (size_t k = 0; k < ku_cols.size(); ++k) {
            std::vector<double> x(static_cast<size_t>(KU.rows()));
            for (long i = 0; i < KU.rows(); ++i) x[static_cast<size_t>(i)] = KU(i, static_cast<long>(k));
            double best = 0;
            for (size_t c = 0; c < cm_cols.size(); ++c) {
                std::vector<double> ycol(static_cast<size_t>(CM.rows()));
                for (long i = 0; i < CM.rows(); ++i)
                    ycol[static_cast<size_t>(i)] = CM(i, static_cast<long>(c));
                auto sp = stats::spearman_rho(x, ycol);
                if (!sp.degenerate) best = std::max(best, std::abs(sp.rho));
            }
            auto strength = stats::strength_of(best);
            ++hist[stats::strength_name(strength)];
            strengths_csv += csv::join_row({spec.release, ku_cols[k],
                                            format_double(best),
                                            stats::strength_name(strength)});
        }
        for (const auto& [cat, count] : hist)
            pr.strength_histogram[cat] =
                100.0 * count / static_cast<double>(ku_cols.size());

        // PCA + k-means clustering per view
        uint64_t seed = release_seed(cfg, spec.release);
        auto cluster_view = [&](const Eigen::MatrixXd& M, uint64_t salt) {
            auto pca = stats::pca_reduce(M, cfg.thresholds.pca_variance);
            auto kk = stats::choose_k(pca.scores, derive_seed(seed, salt),
                                      cfg.thresholds.kmeans_k_min,
                                      cfg.thresholds.kmeans_k_max);
            return stats::kmeans_cluster(pca.scores, kk.k,
                                         derive_seed(seed, salt + 1));
        };
        auto ku_clust = cluster_view(KU, 101);
        auto cm_clust = cluster_view(CM, 202);
        pr.ku_k = ku_clust.k;
        pr.cm_k = cm_clust.k;
        pr.ari = stats::adjusted_rand_index(ku_clust, cm_clust);
        auto overlap = stats::cluster_overlap_report(ku_clust, cm_clust);
        pr.percent_not_overlapped = overlap.percent_not_overlapped;
        aris.push_back(pr.ari);

        json comp = json::array();
        for (size_t c = 0; c < overlap.composition.size(); ++c) {
            json entry;
            entry["ku_cluster"] = c;
            entry["overlapped"] = static_cast<bool>(overlap.overlapped[c]);
            json fractions;
            for (const auto& [cm, frac] : overlap.composition[c])
                fractions[std::to_string(cm)] = frac;
            entry["cm_fractions"] = std::move(fractions);
            comp.push_back(std::move(entry));
        }
        write_file(run / "prelim" / (slug(spec.release) + "_overlap.json"),
                   comp.dump(2) + "\n");

        std::string assign_csv = "path,ku_cluster,cm_cluster\n";
        for (size_t i = 0; i < rows.size(); ++i)
            assign_csv += csv::join_row(
                {table.rows()[rows[i]].path,
                 std::to_string(ku_clust.assignment[i]),
                 std::to_string(cm_clust.assignment[i])});
        write_file(run / "prelim" / (slug(spec.release) + "_clusters.csv"),
                   assign_csv);
        summary_csv += csv::join_row(
            {spec.release, std::to_string(pr.ku_k), std::to_string(pr.cm_k),
             format_double(pr.ari), format_double(pr.percent_not_overlapped)});
        report.releases.push_back(std::move(pr));
    }

    std::vector<double> sorted = aris;
    std::sort(sorted.begin(), sorted.end());
    report.median_ari =
        sorted.empty() ? 0.0
        : sorted.size() % 2 ? sorted[sorted.size() / 2]
                            : (sorted[sorted.size() / 2 - 1] +
                               sorted[sorted.size() / 2]) / 2.0;

    write_file(run / "prelim" / "correlation_strengths.csv", strengths_csv);
    write_file(run / "prelim" / "summary.csv", summary_csv);
    json j;
    j["median_ari"] = report.median_ari;
    json rel = json::array();
    for (const auto& r : report.releases) {
        rel.push_back({{"release", r.release},
                       {"ku_clusters", r.ku_k},
                       {"cm_clusters", r.cm_k},
                       {"ari", r.ari},
                       {"percent_not_overlapped", r.percent_not_overlapped},
                       {"strength_histogram", r.strength_histogram}});
    }
    j["releases"] = std::move(rel);
    write_file(run / "prelim" / "report.json", j.dump(2) + "\n");
    return report;
}

namespace {

struct ReleaseModels {
    std::string release;
    std::map<std::string, learn::EvalResult> evals;  // by feature-set name
    learn::BootstrapPlan plan;
    std::map<std::string, ModelMatrix> matrices;
};

data::FeatureSet set_by_name(const std::string& name) {
    auto s = data::feature_set_from_name(name);
    if (!s) throw Error("unknown feature set: " + name);
    return *s;
}

ReleaseModels evaluate_release(const StudyConfig& cfg, const ReleaseSpec& spec,
                               const std::vector<std::string>& set_names) {
    auto table = load_release_table(cfg, spec.release);
    auto rows = modeling_rows(table);
    if (rows.size() < 10)
        throw Error("too few modeling rows in " + spec.release);

    ReleaseModels rm;
    rm.release = spec.release;
    rm.plan = learn::bootstrap_plan(static_cast<int>(rows.size()),
                                    release_seed(cfg, spec.release));
    for (const auto& name : set_names) {
        auto cols = data::feature_set_columns(set_by_name(name));
        auto mm = model_matrix(table, cols, rows, cfg, true);
        auto eval = learn::out_of_sample_evaluate(
            mm.X, mm.y, mm.columns, learn::ClassifierKind::RF, {}, rm.plan,
            cfg.threads);
        eval.release = spec.release;
        eval.feature_set = name;
        rm.evals[name] = std::move(eval);
        rm.matrices[name] = std::move(mm);
    }
    return rm;
}

void save_release_models(const StudyConfig& cfg, const ReleaseModels& rm) {
    fs::path dir = fs::path(cfg.run_dir()) / "models" / slug(rm.release);
    for (const auto& [name, mm] : rm.matrices) {
        auto model = learn::Model::train(
            learn::ClassifierKind::RF, mm.X, mm.y, mm.columns, {},
            derive_seed(release_seed(cfg, rm.release), fnv(name)));
        save_model_json(model, (dir / (slug(name) + ".json")).string());
    }
}

std::string comparison_csv_row(const std::string& release,
                               const std::string& pair,
                               const learn::EvalResult& a,
                               const learn::EvalResult& b) {
    auto cmp = learn::compare_models(a, b);
    return csv::join_row(
        {release, pair, format_double(a.median_auc()),
         format_double(b.median_auc()), format_double(cmp.p_value),
         stats::effect_letter(cmp.magnitude), format_double(cmp.delta),
         format_double(cmp.mean_normalized_improvement)});
}

// Per-bootstrap SHAP global importances for one feature set.
std::vector<Eigen::VectorXd> bootstrap_importances(const StudyConfig& cfg,
                                                   const ReleaseModels& rm,
                                                   const std::string& set_name) {
    const ModelMatrix& mm = rm.matrices.at(set_name);
    std::vector<Eigen::VectorXd> importances(learn::kBootstrapRounds);
    std::vector<char> valid(learn::kBootstrapRounds, 0);
    parallel_for(learn::kBootstrapRounds, [&](size_t r) {
        const auto& bag = rm.plan.in_bag[r];
        std::vector<int> ybag;
        int pos = 0;
        for (int i : bag) {
            ybag.push_back(mm.y[static_cast<size_t>(i)]);
            pos += mm.y[static_cast<size_t>(i)];
        }
        if (pos == 0 || pos == static_cast<int>(bag.size())) return;
        Eigen::MatrixXd Xbag(static_cast<long>(bag.size()), mm.X.cols());
        for (size_t i = 0; i < bag.size(); ++i)
            Xbag.row(static_cast<long>(i)) = mm.X.row(bag[i]);
        auto model = learn::Model::train(learn::ClassifierKind::RF, Xbag, ybag,
                                         mm.columns, {},
                                         derive_seed(rm.plan.master_seed, r));
        const Eigen::MatrixXd& target = cfg.shap_on_in_bag ? Xbag : mm.X;
        auto shap = explain::shap_table(model, target, 1);
        importances[r] = explain::global_importance(shap);
        valid[r] = 1;
    }, cfg.threads);
    std::vector<Eigen::VectorXd> out;
    for (int r = 0; r < learn::kBootstrapRounds; ++r)
        if (valid[static_cast<size_t>(r)]) out.push_back(importances[static_cast<size_t>(r)]);
    if (out.empty()) throw Error("no valid bootstrap importances");
    return out;
}

void write_rank_table(const fs::path& path,
                      const explain::FeatureRankTable& table) {
    std::vector<std::string> releases;
    for (const auto& [rel, ranks] : table.per_release) releases.push_back(rel);
    std::string out = "feature";
    for (const auto& r : releases) out += "," + r;
    out += ",final_rank\n";
    std::vector<std::string> features = table.features;
    std::sort(features.begin(), features.end(),
              [&](const std::string& a, const std::string& b) {
                  int ra = table.final_rank.at(a), rb = table.final_rank.at(b);
                  if (ra != rb) return ra < rb;
                  return a < b;
              });
    for (const auto& f : features) {
        std::vector<std::string> fields = {f};
        for (const auto& rel : releases) {
            auto it = table.per_release.at(rel).find(f);
            fields.push_back(it == table.per_release.at(rel).end()
                                 ? "NA"
                                 : std::to_string(it->second));
        }
        fields.push_back(std::to_string(table.final_rank.at(f)));
        out += csv::join_row(fields);
    }
    write_file(path, out);
}

explain::FeatureRankTable feature_ranks_for_set(
    const StudyConfig& cfg, const std::vector<ReleaseModels>& models,
    const std::string& set_name) {
    std::map<std::string, std::map<std::string, int>> per_release;
    for (const auto& rm : models) {
        auto imps = bootstrap_importances(cfg, rm, set_name);
        per_release[rm.release] = explain::per_release_feature_ranks(
            imps, rm.matrices.at(set_name).columns);
    }
    if (per_release.size() == 1) {
        // single-release runs cannot do the second SK-ESD pass; report the
        // per-release ranks directly
        explain::FeatureRankTable t;
        t.per_release = per_release;
        for (const auto& [f, rank] : per_release.begin()->second) {
            t.features.push_back(f);
            t.final_rank[f] = rank;
        }
        return t;
    }
    return explain::final_feature_ranks(per_release);
}

} // namespace

StudyOutcome run_study(const StudyConfig& cfg, const std::string& rq) {
    fs::path run(cfg.run_dir());
    fs::path dir = run / "study" / rq;
    StudyOutcome outcome;

    std::vector<std::string> sets;
    if (rq == "rq1") sets = {"KUCLS", "CC_PROD", "CC"};
    else if (rq == "rq2") sets = {"KUCLS"};
    else if (rq == "rq4") sets = {"KUCLS", "CC_PROD", "CC", "KUCLS+CC"};
    else if (rq == "rq5") sets = {"KUCLS+CC"};
    else if (rq == "rq6") sets = {"KUCLS", "CC", "KUCLS+CC", "KUCLS_CC_COST_EFF"};
    else throw ConfigError("unknown research question: " + rq +
                           " (rq3 is served by the explain command)");

    std::vector<ReleaseModels> models;
    for (const auto& spec : cfg.releases) {
        try {
            models.push_back(evaluate_release(cfg, spec, sets));
        } catch (const std::exception& e) {
            outcome.failed_releases.push_back(spec.release + ": " + e.what());
        }
    }
    if (models.empty()) throw Error("no release evaluated for " + rq);

    std::string evals = eval_csv_header();
    json evals_json = json::array();
    for (const auto& rm : models)
        for (const auto& [name, eval] : rm.evals) {
            evals += eval_csv_rows(eval);
            json j;
            j["release"] = eval.release;
            j["model"] = name;
            j["classifier"] = eval.classifier;
            j["auc"] = eval.valid_aucs();
            j["skipped_slots"] =
                static_cast<int>(eval.auc.size() - eval.valid_aucs().size());
            evals_json.push_back(std::move(j));
        }
    write_file(dir / "evals.csv", evals);
    write_file(dir / "evals.json", evals_json.dump(2) + "\n");

    const std::string cmp_header =
        "release,comparison,median_model,median_baseline,p_value,effect,"
        "delta,mean_normalized_improvement_pct\n";

    if (rq == "rq1") {
        std::string cmp = cmp_header;
        for (const auto& rm : models) {
            cmp += comparison_csv_row(rm.release, "KUCLS_vs_CC_PROD",
                                      rm.evals.at("KUCLS"),
                                      rm.evals.at("CC_PROD"));
            cmp += comparison_csv_row(rm.release, "KUCLS_vs_CC",
                                      rm.evals.at("KUCLS"), rm.evals.at("CC"));
        }
        write_file(dir / "comparison.csv", cmp);
        for (const auto& rm : models) save_release_models(cfg, rm);
    } else if (rq == "rq2") {
        auto ranks = feature_ranks_for_set(cfg, models, "KUCLS");
        write_rank_table(dir / "ku_feature_ranks.csv", ranks);
    } else if (rq == "rq4") {
        std::string cmp = cmp_header;
        for (const auto& rm : models) {
            cmp += comparison_csv_row(rm.release, "KUCLS+CC_vs_KUCLS",
                                      rm.evals.at("KUCLS+CC"),
                                      rm.evals.at("KUCLS"));
            cmp += comparison_csv_row(rm.release, "KUCLS+CC_vs_CC",
                                      rm.evals.at("KUCLS+CC"), rm.evals.at("CC"));
        }
        write_file(dir / "comparison.csv", cmp);
        std::map<std::string, std::vector<double>> pooled;
        for (const auto& rm : models)
            for (const auto& [name, eval] : rm.evals) {
                auto v = eval.valid_aucs();
                pooled[name].insert(pooled[name].end(), v.begin(), v.end());
            }
        outcome.model_ranks = learn::rank_models(pooled);
        std::string ranks_csv = "model,sk_esd_rank,median_auc\n";
        for (const auto& [name, rank] : outcome.model_ranks) {
            std::vector<double> v = pooled[name];
            std::sort(v.begin(), v.end());
            double median = v.empty() ? 0.0
                            : v.size() % 2 ? v[v.size() / 2]
                                           : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
            ranks_csv += csv::join_row({name, std::to_string(rank),
                                        format_double(median)});
        }
        write_file(dir / "model_ranks.csv", ranks_csv);
        auto franks = feature_ranks_for_set(cfg, models, "KUCLS+CC");
        write_rank_table(dir / "combined_feature_ranks.csv", franks);
        for (const auto& rm : models) save_release_models(cfg, rm);
    } else if (rq == "rq5") {
        // grid-searched classifiers vs the default-RF combined model
        std::map<std::string, std::vector<double>> pooled;
        std::string evals5 = eval_csv_header();
        for (const auto& rm : models) {
            const ModelMatrix& mm = rm.matrices.at("KUCLS+CC");
            auto base = rm.evals.at("KUCLS+CC");
            {
                auto v = base.valid_aucs();
                pooled["KUCLS+CC"].insert(pooled["KUCLS+CC"].end(), v.begin(),
                                          v.end());
            }
            for (auto kind :
                 {learn::ClassifierKind::KNN, learn::ClassifierKind::GNB,
                  learn::ClassifierKind::DT, learn::ClassifierKind::RF}) {
                auto grid = learn::hyper_parameter_grid(kind);
                learn::EvalResult res;
                res.release = rm.release;
                res.feature_set = std::string("HPT_") +
                                  learn::classifier_name(kind) + "_KUCLS+CC";
                res.classifier = learn::classifier_name(kind);
                res.auc.assign(learn::kBootstrapRounds, 0.0);
                res.skipped.assign(learn::kBootstrapRounds, true);
                parallel_for(learn::kBootstrapRounds, [&](size_t r) {
                    const auto& bag = rm.plan.in_bag[r];
                    const auto& oob = rm.plan.out_bag[r];
                    std::vector<int> ybag, yoob;
                    int pb = 0, po = 0;
                    for (int i : bag) {
                        ybag.push_back(mm.y[static_cast<size_t>(i)]);
                        pb += mm.y[static_cast<size_t>(i)];
                    }
                    for (int i : oob) {
                        yoob.push_back(mm.y[static_cast<size_t>(i)]);
                        po += mm.y[static_cast<size_t>(i)];
                    }
                    if (pb == 0 || pb == static_cast<int>(bag.size())) return;
                    if (po == 0 || po == static_cast<int>(oob.size())) return;
                    Eigen::MatrixXd Xbag(static_cast<long>(bag.size()), mm.X.cols());
                    for (size_t i = 0; i < bag.size(); ++i)
                        Xbag.row(static_cast<long>(i)) = mm.X.row(bag[i]);
                    Eigen::MatrixXd Xoob(static_cast<long>(oob.size()), mm.X.cols());
                    for (size_t i = 0; i < oob.size(); ++i)
                        Xoob.row(static_cast<long>(i)) = mm.X.row(oob[i]);
                    learn::GridSearchResult gs;
                    try {
                        gs = learn::grid_search_cv(
                            kind, grid, Xbag, ybag,
                            derive_seed(rm.plan.master_seed, r));
                    } catch (const Error&) {
                        return;
                    }
                    auto model = learn::Model::train(
                        kind, Xbag, ybag, mm.columns, gs.best,
                        derive_seed(rm.plan.master_seed, r));
                    auto auc = learn::roc_auc(yoob, model.predict_proba(Xoob));
                    if (!auc) return;
                    res.auc[r] = *auc;
                    res.skipped[r] = false;
                }, cfg.threads);
                auto v = res.valid_aucs();
                pooled[res.feature_set].insert(pooled[res.feature_set].end(),
                                               v.begin(), v.end());
                evals5 += eval_csv_rows(res);
            }
        }
        write_file(dir / "evals.csv", evals5);
        outcome.model_ranks = learn::rank_models(pooled);
        std::string ranks_csv = "model,sk_esd_rank\n";
        for (const auto& [name, rank] : outcome.model_ranks)
            ranks_csv += csv::join_row({name, std::to_string(rank)});
        write_file(dir / "model_ranks.csv", ranks_csv);
    } else if (rq == "rq6") {
        std::string cmp = cmp_header;
        for (const auto& rm : models) {
            cmp += comparison_csv_row(rm.release, "COST_EFF_vs_CC",
                                      rm.evals.at("KUCLS_CC_COST_EFF"),
                                      rm.evals.at("CC"));
            cmp += comparison_csv_row(rm.release, "COST_EFF_vs_KUCLS",
                                      rm.evals.at("KUCLS_CC_COST_EFF"),
                                      rm.evals.at("KUCLS"));
            cmp += comparison_csv_row(rm.release, "COST_EFF_vs_KUCLS+CC",
                                      rm.evals.at("KUCLS_CC_COST_EFF"),
                                      rm.evals.at("KUCLS+CC"));
        }
        write_file(dir / "comparison.csv", cmp);
        std::map<std::string, std::vector<double>> pooled;
        for (const auto& rm : models)
            for (const auto& [name, eval] : rm.evals) {
                auto v = eval.valid_aucs();
                pooled[name].insert(pooled[name].end(), v.begin(), v.end());
            }
        outcome.model_ranks = learn::rank_models(pooled);
        std::string ranks_csv = "model,sk_esd_rank\n";
        for (const auto& [name, rank] : outcome.model_ranks)
            ranks_csv += csv::join_row({name, std::to_string(rank)});
        write_file(dir / "model_ranks.csv", ranks_csv);
        auto franks = feature_ranks_for_set(cfg, models, "KUCLS_CC_COST_EFF");
        write_rank_table(dir / "cost_eff_feature_ranks.csv", franks);
    }
    return outcome;
}

void save_model_json(const learn::Model& model, const std::string& path) {
    json j;
    j["kind"] = learn::classifier_name(model.kind());
    j["columns"] = model.columns();
    j["base_rate"] = model.forest().base_rate;
    json trees = json::array();
    for (const auto& tree : model.forest().trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.cover,
                             n.value});
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
    write_file(path, j.dump() + "\n");
}

learn::Model load_model_json(const std::string& path) {
    if (!fs::exists(path)) throw Error("model missing: " + path);
    json j = json::parse(slurp(path));
    learn::Forest forest;
    forest.base_rate = j.at("base_rate").get<double>();
    for (const auto& tj : j.at("trees")) {
        learn::DecisionTree tree;
        for (const auto& nj : tj) {
            learn::TreeNode n;
            n.feature = nj[0].get<int>();
            n.threshold = nj[1].get<double>();
            n.left = nj[2].get<int>();
            n.right = nj[3].get<int>();
            n.cover = nj[4].get<double>();
            n.value = nj[5].get<double>();
            tree.nodes.push_back(n);
        }
        forest.trees.push_back(std::move(tree));
    }
    std::string kind = j.at("kind").get<std::string>();
    return learn::Model::from_forest(kind == "DT" ? learn::ClassifierKind::DT
                                                  : learn::ClassifierKind::RF,
                                     std::move(forest),
                                     j.at("columns").get<std::vector<std::string>>());
}

LocalExplanation explain_file(const StudyConfig& cfg, const std::string& release,
                              const std::string& path,
                              const std::string& feature_set, int top_n) {
    fs::path run(cfg.run_dir());
    fs::path model_path =
        run / "models" / slug(release) / (slug(feature_set) + ".json");
    auto model = load_model_json(model_path.string());

    auto table = load_release_table(cfg, release);
    std::string norm = data::normalize_path(path);
    const data::FeatureRow* row = nullptr;
    for (const auto& r : table.rows())
        if (r.path == norm) row = &r;
    if (!row) throw Error("unknown path in release " + release + ": " + norm);

    Eigen::RowVectorXd x(static_cast<long>(model.columns().size()));
    for (size_t j = 0; j < model.columns().size(); ++j) {
        size_t c = table.column_index(model.columns()[j]);
        double v = row->values[c];
        if (std::isnan(v))
            throw Error("file has missing features; cannot explain: " + norm);
        x(static_cast<long>(j)) = v;
    }

    LocalExplanation out;
    out.release = release;
    out.path = norm;
    out.model = feature_set;
    double base = 0;
    Eigen::VectorXd phi = explain::shap_row(model, x, &base);
    out.base_value = base;
    out.prediction = base + phi.sum();
    out.attributions = explain::local_report(model, x, top_n);

    json j;
    j["release"] = release;
    j["path"] = norm;
    j["model"] = feature_set;
    j["base_value"] = out.base_value;
    j["prediction"] = out.prediction;
    json atts = json::array();
    for (const auto& a : out.attributions)
        atts.push_back({{"feature", a.feature},
                        {"phi", a.phi},
                        {"direction", a.direction > 0 ? "toward-defect"
                                                      : "toward-clean"}});
    j["attributions"] = std::move(atts);
    write_file(run / "explain" / slug(release) /
                   (slug(norm) + "_" + slug(feature_set) + ".json"),
               j.dump(2) + "\n");
    return out;
}

void run_report(const StudyConfig& cfg) {
    fs::path run(cfg.run_dir());
    std::string out = "source,release,comparison,median_model,median_baseline,"
                      "p_value,effect\n";
    for (const char* rq : {"rq1", "rq4", "rq6"}) {
        fs::path p = run / "study" / rq / "comparison.csv";
        if (!fs::exists(p)) continue;
        auto rows = csv::read_file(p.string());
        for (size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            out += csv::join_row({rq, r[0], r[1], r[2], r[3], r[4], r[5]});
        }
    }
    write_file(run / "report.csv", out);
}

} // namespace kupred::study
