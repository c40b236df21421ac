#pragma once

#include <string>

#include "kupred/java/ast.hpp"

namespace kupred::java {

// A Java source file queued for analysis. `text` must be valid UTF-8.
struct SourceUnit {
    std::string path;        // forward-slash relative path, unique per release
    std::string release_id;
    std::string text;
};

// Parses Java SE 8 source. Syntax errors yield a partial tree plus error
// records; `fatal` is set only when no top-level structure was recovered.
// Throws IoError for non-UTF-8 input (unreadable unit).
SyntaxTree parse_java(const SourceUnit& unit);

// Reads a file from disk into a SourceUnit. Throws IoError.
SourceUnit read_source(const std::string& fs_path, const std::string& rel_path,
                       const std::string& release_id);

} // namespace kupred::java
