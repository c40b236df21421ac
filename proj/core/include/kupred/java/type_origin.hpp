#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kupred/java/ast.hpp"

namespace kupred::java {

enum class TypeOrigin : uint8_t {
    ProjectLocal,
    JavaPlatform,  // java.* / javax.* packages
    External,      // imported from a third-party package
    Unknown,       // unresolvable without a classpath
};

// Import context of one compilation unit, extracted from its tree.
struct FileImports {
    std::string package;                       // declared package or ""
    std::map<std::string, std::string> single; // simple name -> qualified
    std::vector<std::string> on_demand;        // packages from `import p.*;`
    std::set<std::string> local_types;         // simple names declared in file
};

// Facts about one type declared somewhere in the release. Supertype names
// are kept as written and resolved on demand through the declaring file's
// imports.
struct DeclaredTypeInfo {
    std::string qualified;
    std::string simple;
    std::string file;                        // declaring file path
    std::vector<std::string> extends;        // superclass / superinterfaces
    std::vector<std::string> implements;
    std::set<std::pair<std::string, int>> method_sigs;  // (name, arity)
    std::set<std::pair<std::string, int>> inheritable_sigs;  // non-private, non-static
};

// Release-wide view of where type names come from. Built once per release
// from declarations and imports; no classpath is consulted.
class TypeOriginTable {
public:
    // Builds the table from all trees of one release. Order-independent.
    static TypeOriginTable build(const std::vector<const SyntaxTree*>& trees);

    // Resolution for a name as it appears in one file. `imports` must come
    // from the same release.
    TypeOrigin resolve(const std::string& name, const FileImports& imports) const;

    // Qualified name for a simple name, when an import or release
    // declaration pins one; "" otherwise.
    std::string qualified_of(const std::string& name,
                             const FileImports& imports) const;

    // Release-level map covering every declared or imported type name.
    const std::map<std::string, TypeOrigin>& entries() const { return entries_; }

    bool declares_qualified(const std::string& qualified) const {
        return declared_qualified_.count(qualified) > 0;
    }
    bool declares_simple(const std::string& simple) const {
        return declared_simple_.count(simple) > 0;
    }

    static FileImports imports_of(const SyntaxTree& tree);
    static bool is_platform_package(const std::string& qualified);
    static bool is_java_lang(const std::string& simple);

    // Declared-type index for inheritance-aware rules and class metrics.
    const DeclaredTypeInfo* type_info(const std::string& qualified) const {
        auto it = declared_types_.find(qualified);
        return it == declared_types_.end() ? nullptr : &it->second;
    }
    const std::map<std::string, DeclaredTypeInfo>& declared_types() const {
        return declared_types_;
    }
    // Resolves a supertype reference written in `fi`'s file to a declared
    // qualified name, or "" when the type is not project-local.
    std::string resolve_declared(const std::string& name,
                                 const FileImports& fi) const;
    // Imports of the file that declares `qualified`.
    const FileImports* imports_of_file(const std::string& file) const {
        auto it = file_imports_.find(file);
        return it == file_imports_.end() ? nullptr : &it->second;
    }

private:
    std::set<std::string> declared_qualified_;  // pkg.Outer, pkg.Outer.Inner
    std::set<std::string> declared_simple_;
    std::map<std::string, TypeOrigin> entries_;
    std::map<std::string, DeclaredTypeInfo> declared_types_;
    std::map<std::string, FileImports> file_imports_;  // by file path
};

const char* type_origin_name(TypeOrigin o);

} // namespace kupred::java
