#include "kupred/data/feature_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kupred/util/csv.hpp"
#include "kupred/util/error.hpp"
#include "kupred/util/numtext.hpp"

namespace kupred::data {

using nlohmann::json;

size_t FeatureTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) return i;
    throw SchemaError("unknown column: " + name);
}

void FeatureTable::add_row(FeatureRow row) {
    if (row.values.size() != columns_.size())
        throw SchemaError("row width " + std::to_string(row.values.size()) +
                          " != schema width " + std::to_string(columns_.size()));
    auto key = std::make_pair(row.release, row.path);
    if (!index_.emplace(key, rows_.size()).second)
        throw SchemaError("duplicate row key: " + row.release + "," + row.path);
    rows_.push_back(std::move(row));
}

FeatureTable FeatureTable::select(const std::vector<std::string>& names) const {
    std::vector<size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(column_index(n));
    FeatureTable out(names);
    for (const auto& r : rows_) {
        FeatureRow nr = r;
        nr.values.clear();
        nr.values.reserve(idx.size());
        for (size_t i : idx) nr.values.push_back(r.values[i]);
        out.add_row(std::move(nr));
    }
    return out;
}

std::vector<size_t> FeatureTable::trainable_rows() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < rows_.size(); ++i)
        if (!rows_[i].features_missing &&
            (rows_[i].label == 0 || rows_[i].label == 1))
            out.push_back(i);
    return out;
}

bool FeatureTable::operator==(const FeatureTable& o) const {
    if (columns_ != o.columns_ || rows_.size() != o.rows_.size()) return false;
    for (size_t i = 0; i < rows_.size(); ++i) {
        const auto& a = rows_[i];
        const auto& b = o.rows_[i];
        if (a.release != b.release || a.path != b.path ||
            a.parse_failed != b.parse_failed ||
            a.features_missing != b.features_missing ||
            a.count_path_capped != b.count_path_capped || a.label != b.label)
            return false;
        if (a.values.size() != b.values.size()) return false;
        for (size_t j = 0; j < a.values.size(); ++j) {
            bool na = std::isnan(a.values[j]), nb = std::isnan(b.values[j]);
            if (na != nb) return false;
            if (!na && a.values[j] != b.values[j]) return false;
        }
    }
    return true;
}

const std::vector<std::string>& full_feature_schema() {
    static const std::vector<std::string> schema = [] {
        std::vector<std::string> s;
        for (int k = 1; k <= ku::kKuCount; ++k) s.push_back(ku::ku_column_name(k));
        for (const auto& n : metrics::product_metric_names()) s.push_back(n);
        for (const auto& n : metrics::process_metric_names()) s.push_back(n);
        return s;
    }();
    return schema;
}

std::vector<std::string> feature_set_columns(FeatureSet set) {
    std::vector<std::string> out;
    switch (set) {
        case FeatureSet::KU:
            for (int k = 1; k <= ku::kKuCount; ++k)
                out.push_back(ku::ku_column_name(k));
            break;
        case FeatureSet::PROD: {
            const auto& names = metrics::product_metric_names();
            out.assign(names.begin(),
                       names.begin() + metrics::kCanonicalProductMetrics);
            break;
        }
        case FeatureSet::PROD_PROC: {
            out = feature_set_columns(FeatureSet::PROD);
            for (const auto& n : metrics::process_metric_names())
                out.push_back(n);
            break;
        }
        case FeatureSet::KU_CC: {
            out = feature_set_columns(FeatureSet::KU);
            auto cc = feature_set_columns(FeatureSet::PROD_PROC);
            out.insert(out.end(), cc.begin(), cc.end());
            break;
        }
        case FeatureSet::COST_EFF10:
            out = {"K6",  "K5",  "K11", "K7",   "K4",
                   "CountClassCoupled", "CountLineComment", "MaxNesting_Mean",
                   "DDEV", "ADDED_LINES"};
            break;
    }
    return out;
}

std::optional<FeatureSet> feature_set_from_name(const std::string& name) {
    if (name == "KU" || name == "KUCLS") return FeatureSet::KU;
    if (name == "PROD" || name == "CC_PROD") return FeatureSet::PROD;
    if (name == "PROD+PROC" || name == "CC") return FeatureSet::PROD_PROC;
    if (name == "KU+CC" || name == "KUCLS+CC") return FeatureSet::KU_CC;
    if (name == "COST_EFF10" || name == "KUCLS_CC_COST_EFF")
        return FeatureSet::COST_EFF10;
    return std::nullopt;
}

const char* feature_set_name(FeatureSet set) {
    switch (set) {
        case FeatureSet::KU: return "KUCLS";
        case FeatureSet::PROD: return "CC_PROD";
        case FeatureSet::PROD_PROC: return "CC";
        case FeatureSet::KU_CC: return "KUCLS+CC";
        case FeatureSet::COST_EFF10: return "KUCLS_CC_COST_EFF";
    }
    return "?";
}

FeatureTable select_feature_set(const FeatureTable& table, FeatureSet set) {
    return table.select(feature_set_columns(set));
}

std::string normalize_path(const std::string& path) {
    std::string p = path;
    std::replace(p.begin(), p.end(), '\\', '/');
    while (p.rfind("./", 0) == 0) p = p.substr(2);
    return p;
}

namespace {

int parse_label_value(const std::string& raw) {
    std::string v;
    for (char c : raw) v.push_back(static_cast<char>(std::tolower(c)));
    if (v == "true" || v == "yes") return 1;
    if (v == "false" || v == "no" || v.empty()) return 0;
    try {
        return std::stod(v) > 0 ? 1 : 0;
    } catch (...) {
        throw SchemaError("unparseable defect label: '" + raw + "'");
    }
}

} // namespace

LabelIngest ingest_defect_labels(const std::string& csv_path,
                                 const LabelConfig& cfg) {
    auto rows = csv::read_file(csv_path);
    if (rows.empty()) throw SchemaError("empty label file: " + csv_path);
    const auto& header = rows[0];

    auto find_col = [&](const std::string& wanted,
                        const std::vector<std::string>& candidates) {
        for (size_t i = 0; i < header.size(); ++i) {
            if (!wanted.empty()) {
                if (header[i] == wanted) return static_cast<long>(i);
            } else {
                for (const auto& c : candidates)
                    if (header[i] == c) return static_cast<long>(i);
            }
        }
        return -1L;
    };
    long path_col = find_col(cfg.path_column,
                             {"File", "file", "filename", "Filename", "name"});
    long label_col = find_col(
        cfg.label_column, {"RealBug", "realbug", "Bug", "bug", "defect",
                           "Defect", "label", "HeuBug"});
    if (path_col < 0) throw SchemaError("label file has no file column");
    if (label_col < 0) throw SchemaError("label file has no defect column");

    LabelIngest out;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() <= static_cast<size_t>(std::max(path_col, label_col)))
            continue;
        std::string path = normalize_path(r[static_cast<size_t>(path_col)]);
        if (path.empty()) continue;
        int label = parse_label_value(r[static_cast<size_t>(label_col)]);
        auto [it, inserted] = out.labels.emplace(path, label);
        if (!inserted)
            out.warnings.push_back("duplicate path (first wins): " + path);
    }
    return out;
}

FeatureTable assemble_feature_table(const AssemblyInput& in, JoinStats* stats) {
    FeatureTable table(full_feature_schema());
    JoinStats js;
    js.labeled = in.labels.size();

    const size_t n_ku = ku::kKuCount;
    const size_t n_prod = metrics::kProductMetricCount;
    const size_t n_proc = metrics::process_metric_names().size();

    for (const auto& [path, label] : in.labels) {
        FeatureRow row;
        row.release = in.release_id;
        row.path = path;
        row.label = label;
        row.values.assign(full_feature_schema().size(),
                          std::nan(""));

        auto kit = in.ku.find(path);
        auto pit = in.product.find(path);
        if (kit == in.ku.end() && pit == in.product.end()) {
            row.features_missing = true;
            ++js.label_only;
            table.add_row(std::move(row));
            continue;
        }
        ++js.matched;
        if (kit != in.ku.end())
            for (size_t k = 0; k < n_ku; ++k)
                row.values[k] = static_cast<double>(kit->second[k]);
        if (pit != in.product.end()) {
            for (size_t m = 0; m < n_prod; ++m)
                row.values[n_ku + m] = pit->second.values[m];
            row.count_path_capped = pit->second.count_path_capped;
        }
        auto fit = in.parse_failed.find(path);
        row.parse_failed = fit != in.parse_failed.end() && fit->second;
        auto prit = in.process.find(path);
        if (prit != in.process.end()) {
            const auto& pv = prit->second;
            row.values[n_ku + n_prod + 0] = pv.comm;
            row.values[n_ku + n_prod + 1] = pv.added_lines;
            row.values[n_ku + n_prod + 2] = pv.del_lines;
            row.values[n_ku + n_prod + 3] = pv.adev;
            row.values[n_ku + n_prod + 4] = pv.ddev;
        }
        (void)n_proc;
        table.add_row(std::move(row));
    }
    for (const auto& [path, vec] : in.ku)
        if (!in.labels.count(path)) ++js.feature_only;

    if (js.matched == 0)
        throw Error("empty join: no labeled path matches any analyzed file");
    if (stats) *stats = js;
    return table;
}

namespace {

const std::vector<std::string> kFlagColumns = {"parse_failed",
                                               "features_missing",
                                               "count_path_capped"};

} // namespace

std::string export_table_csv(const FeatureTable& table) {
    std::string out;
    std::vector<std::string> header = {"release", "path"};
    header.insert(header.end(), kFlagColumns.begin(), kFlagColumns.end());
    for (const auto& c : table.columns()) header.push_back(c);
    header.push_back("defect");
    out += csv::join_row(header);
    for (const auto& r : table.rows()) {
        std::vector<std::string> fields = {
            r.release, r.path, r.parse_failed ? "1" : "0",
            r.features_missing ? "1" : "0", r.count_path_capped ? "1" : "0"};
        for (double v : r.values) fields.push_back(format_double(v));
        fields.push_back(std::to_string(r.label));
        out += csv::join_row(fields);
    }
    return out;
}

FeatureTable import_table_csv(const std::string& text,
                              const std::vector<std::string>* expected_columns) {
    auto rows = csv::parse(text);
    if (rows.empty()) throw SchemaError("empty table file");
    const auto& header = rows[0];
    size_t fixed = 2 + kFlagColumns.size();
    if (header.size() < fixed + 1 || header[0] != "release" ||
        header[1] != "path" || header.back() != "defect")
        throw SchemaError("feature table header mismatch");
    for (size_t i = 0; i < kFlagColumns.size(); ++i)
        if (header[2 + i] != kFlagColumns[i])
            throw SchemaError("feature table flag columns mismatch");
    std::vector<std::string> cols(header.begin() + static_cast<long>(fixed),
                                  header.end() - 1);
    if (expected_columns && cols != *expected_columns)
        throw SchemaError("feature columns differ from the expected schema "
                          "(missing, extra or reordered)");
    FeatureTable table(cols);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != header.size())
            throw SchemaError("row " + std::to_string(i) + " width mismatch");
        FeatureRow row;
        row.release = r[0];
        row.path = r[1];
        row.parse_failed = r[2] == "1";
        row.features_missing = r[3] == "1";
        row.count_path_capped = r[4] == "1";
        for (size_t j = fixed; j + 1 < r.size(); ++j)
            row.values.push_back(parse_double(r[j]));
        row.label = static_cast<int>(parse_double(r.back()));
        table.add_row(std::move(row));
    }
    return table;
}

void write_table_csv(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << export_table_csv(table);
}

FeatureTable read_table_csv(const std::string& path,
                            const std::vector<std::string>* expected_columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return import_table_csv(ss.str(), expected_columns);
}

std::string export_table_jsonl(const FeatureTable& table) {
    std::string out;
    json head;
    head["columns"] = table.columns();
    out += head.dump() + "\n";
    for (const auto& r : table.rows()) {
        json j;
        j["release"] = r.release;
        j["path"] = r.path;
        j["parse_failed"] = r.parse_failed;
        j["features_missing"] = r.features_missing;
        j["count_path_capped"] = r.count_path_capped;
        json vals = json::array();
        for (double v : r.values) {
            if (std::isnan(v)) vals.push_back(nullptr);
            else vals.push_back(v);
        }
        j["values"] = std::move(vals);
        j["defect"] = r.label;
        out += j.dump() + "\n";
    }
    return out;
}

FeatureTable import_table_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty jsonl table");
    json head = json::parse(line);
    FeatureTable table(head.at("columns").get<std::vector<std::string>>());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        FeatureRow r;
        r.release = j.at("release").get<std::string>();
        r.path = j.at("path").get<std::string>();
        r.parse_failed = j.at("parse_failed").get<bool>();
        r.features_missing = j.at("features_missing").get<bool>();
        r.count_path_capped = j.at("count_path_capped").get<bool>();
        for (const auto& v : j.at("values")) {
            if (v.is_null()) r.values.push_back(std::nan(""));
            else r.values.push_back(v.get<double>());
        }
        r.label = j.at("defect").get<int>();
        table.add_row(std::move(r));
    }
    return table;
}

} // namespace kupred::data
