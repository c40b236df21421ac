#pragma once

#include <array>
#include <string>
#include <vector>

#include "kupred/java/ast.hpp"
#include "kupred/java/type_origin.hpp"

namespace kupred::metrics {

// Canonical 54 product metrics in export order, followed by the four Mean
// aggregates of the method-level metrics (exported as extra columns).
enum ProductMetric : int {
    kAvgCyclomatic = 0,
    kAvgCyclomaticModified,
    kAvgCyclomaticStrict,
    kAvgEssential,
    kAvgLine,
    kAvgLineBlank,
    kAvgLineCode,
    kAvgLineComment,
    kCountDeclClass,
    kCountDeclClassMethod,
    kCountDeclClassVariable,
    kCountDeclFunction,
    kCountDeclInstanceMethod,
    kCountDeclInstanceVariable,
    kCountDeclMethod,
    kCountDeclMethodDefault,
    kCountDeclMethodPrivate,
    kCountDeclMethodProtected,
    kCountDeclMethodPublic,
    kCountLine,
    kCountLineBlank,
    kCountLineCode,
    kCountLineCodeDecl,
    kCountLineCodeExe,
    kCountLineComment,
    kCountSemicolon,
    kCountStmt,
    kCountStmtDecl,
    kCountStmtExe,
    kMaxCyclomatic,
    kMaxCyclomaticModified,
    kMaxCyclomaticStrict,
    kRatioCommentToCode,
    kSumCyclomatic,
    kSumCyclomaticModified,
    kSumCyclomaticStrict,
    kSumEssential,
    kCountClassCoupled,
    kCountClassDerived,
    kMaxInheritanceTree,
    kPercentLackOfCohesion,
    kCountDeclMethodAll,
    kCountInputMin,
    kCountInputMedian,
    kCountInputMax,
    kCountOutputMin,
    kCountOutputMedian,
    kCountOutputMax,
    kCountPathMin,
    kCountPathMedian,
    kCountPathMax,
    kMaxNestingMin,
    kMaxNestingMedian,
    kMaxNestingMax,
    // extras beyond the canonical 54
    kCountInputMean,
    kCountOutputMean,
    kCountPathMean,
    kMaxNestingMean,
    kProductMetricCount,
};

constexpr int kCanonicalProductMetrics = 54;

struct ProductMetricVector {
    std::array<double, kProductMetricCount> values{};
    bool ast_metrics_valid = true;   // false for parse-failed files
    bool count_path_capped = false;  // NPATH hit the 1e9 cap somewhere

    double operator[](int m) const { return values[static_cast<size_t>(m)]; }
    double& operator[](int m) { return values[static_cast<size_t>(m)]; }
};

// Column names per the Understand-style API names; method-level aggregates
// use the FooBar_Min / _Median / _Max / _Mean spelling.
const std::vector<std::string>& product_metric_names();
int product_metric_index(const std::string& name);  // -1 if unknown

// Order statistics used for the method-level aggregates. An empty list
// aggregates to 0 and sets *empty when provided.
enum class Aggregate { Min, Mean, Median, Max };
double aggregate_method_level(const std::vector<double>& per_method_values,
                              Aggregate which, bool* empty = nullptr);

// Computes all product metrics for one parsed file. `origins` supplies the
// release-wide type graph for CountClassDerived / MaxInheritanceTree /
// CountDeclMethodAll; when null those fall back to file-local resolution.
ProductMetricVector compute_product_metrics(
    const java::SyntaxTree& tree, const std::string& text,
    const java::TypeOriginTable* origins = nullptr);

// NPATH cap; pathological methods clamp here and set count_path_capped.
constexpr double kCountPathCap = 1e9;

} // namespace kupred::metrics
