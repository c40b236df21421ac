#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kupred/ku/rules.hpp"
#include "kupred/metrics/process.hpp"
#include "kupred/metrics/product.hpp"

namespace kupred::data {

// Row flags live in fixed columns so exports are self-describing.
struct FeatureRow {
    std::string release;
    std::string path;
    bool parse_failed = false;
    bool features_missing = false;  // labeled but absent from the snapshot
    bool count_path_capped = false;
    std::vector<double> values;     // NaN marks a missing feature value
    int label = 0;                  // defect in {0,1}
};

class FeatureTable {
public:
    FeatureTable() = default;
    explicit FeatureTable(std::vector<std::string> columns)
        : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<FeatureRow>& rows() const { return rows_; }
    std::vector<FeatureRow>& rows() { return rows_; }
    size_t column_index(const std::string& name) const;  // throws SchemaError

    void add_row(FeatureRow row);  // throws on duplicate (release, path)

    // New table with the given feature columns, same rows and flags.
    FeatureTable select(const std::vector<std::string>& names) const;

    // Rows usable for training: not features_missing, label in {0,1}.
    std::vector<size_t> trainable_rows() const;

    bool operator==(const FeatureTable& o) const;

private:
    std::vector<std::string> columns_;
    std::vector<FeatureRow> rows_;
    std::map<std::pair<std::string, std::string>, size_t> index_;
};

// Full canonical schema: K1..K28, 54 product metrics, the 4 Mean extras,
// then COMM/ADDED_LINES/DEL_LINES/ADEV/DDEV.
const std::vector<std::string>& full_feature_schema();

enum class FeatureSet { KU, PROD, PROD_PROC, KU_CC, COST_EFF10 };

// Named column subsets per the study's model families.
std::vector<std::string> feature_set_columns(FeatureSet set);
std::optional<FeatureSet> feature_set_from_name(const std::string& name);
const char* feature_set_name(FeatureSet set);

// select with a named set; COST_EFF10 resolves to its fixed 10 columns.
FeatureTable select_feature_set(const FeatureTable& table, FeatureSet set);

// ---- label ingest -----------------------------------------------------------

struct LabelConfig {
    std::string path_column;   // "" = detect among common names
    std::string label_column;  // "" = detect
};

struct LabelIngest {
    std::map<std::string, int> labels;  // normalized path -> 0/1
    std::vector<std::string> warnings;  // duplicate paths etc.
};

// Forward slashes, no leading "./"; the single point of truth for joins.
std::string normalize_path(const std::string& path);

LabelIngest ingest_defect_labels(const std::string& csv_path,
                                 const LabelConfig& cfg = {});

// ---- assembly ---------------------------------------------------------------

struct JoinStats {
    size_t labeled = 0;
    size_t matched = 0;
    size_t label_only = 0;    // labeled rows kept with features_missing
    size_t feature_only = 0;  // feature rows dropped (unlabeled)
};

struct AssemblyInput {
    std::string release_id;
    std::map<std::string, ku::KuVector> ku;  // by normalized path
    std::map<std::string, bool> parse_failed;
    std::map<std::string, metrics::ProductMetricVector> product;
    std::map<std::string, metrics::ProcessMetricVector> process;
    std::map<std::string, int> labels;
};

// Inner join on label paths; labeled-but-missing files stay as flagged rows
// excluded from training. Throws Error when nothing joins.
FeatureTable assemble_feature_table(const AssemblyInput& in,
                                    JoinStats* stats = nullptr);

// ---- persistence ------------------------------------------------------------

// CSV with a fixed header; import(export(t)) == t byte-for-byte. When
// `expected_columns` is given, a file whose feature columns differ (missing,
// extra or reordered) is rejected with SchemaError.
std::string export_table_csv(const FeatureTable& table);
FeatureTable import_table_csv(
    const std::string& text,
    const std::vector<std::string>* expected_columns = nullptr);
void write_table_csv(const FeatureTable& table, const std::string& path);
FeatureTable read_table_csv(
    const std::string& path,
    const std::vector<std::string>* expected_columns = nullptr);

// JSON-lines alternative (one row object per line).
std::string export_table_jsonl(const FeatureTable& table);
FeatureTable import_table_jsonl(const std::string& text);

} // namespace kupred::data
