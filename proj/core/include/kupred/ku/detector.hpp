#pragma once

#include <map>
#include <string>
#include <vector>

#include "kupred/java/ast.hpp"
#include "kupred/java/parser.hpp"
#include "kupred/java/type_origin.hpp"
#include "kupred/ku/rules.hpp"

namespace kupred::ku {

struct DetectorConfig {
    // Recall-favoring defaults: Unknown type origins count as project code,
    // and an unresolved simple name that matches a distinctive API name
    // counts for that API capability.
    bool unknown_as_project_local = true;
    bool match_unresolved_api_names = true;
};

struct FileDetection {
    KuVector vector;
    DetectionTrace trace;
};

// Counts KU capability occurrences in one parsed file. Pure function of
// (tree, origins, config); safe to call concurrently.
FileDetection detect_kus(const java::SyntaxTree& tree,
                         const java::TypeOriginTable& origins,
                         const DetectorConfig& cfg = {});

struct FileKuRow {
    std::string path;
    bool parse_failed = false;
    KuVector vector;
};

struct ReleaseDetection {
    std::string release_id;
    std::vector<FileKuRow> rows;  // ordered by path
    java::TypeOriginTable origins;
};

// Parses all units of one release, classifies type origins and detects KUs
// per file. Parse-failed files get a zero vector and the parse_failed flag.
// Throws Error when `units` is empty.
ReleaseDetection detect_release(const std::vector<java::SourceUnit>& units,
                                const DetectorConfig& cfg = {},
                                unsigned threads = 0);

// CSV with the fixed header release,path,parse_failed,K1..K28, and a JSON
// array carrying the same rows.
std::string release_csv(const ReleaseDetection& det);
std::string release_json(const ReleaseDetection& det);

} // namespace kupred::ku
