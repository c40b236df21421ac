#include "kupred/java/type_origin.hpp"

#include <cctype>

namespace kupred::java {

namespace {

// java.lang is imported implicitly; this covers the types seen in practice.
const std::set<std::string>& java_lang_types() {
    static const std::set<std::string> names = {
        "Object", "String", "StringBuilder", "StringBuffer", "CharSequence",
        "Integer", "Long", "Short", "Byte", "Double", "Float", "Boolean",
        "Character", "Number", "Math", "System", "Thread", "Runnable",
        "Throwable", "Exception", "RuntimeException", "Error",
        "NullPointerException", "ArithmeticException",
        "ArrayIndexOutOfBoundsException", "IndexOutOfBoundsException",
        "ClassCastException", "IllegalArgumentException",
        "IllegalStateException", "NumberFormatException",
        "UnsupportedOperationException", "CloneNotSupportedException",
        "InterruptedException", "ClassNotFoundException",
        "NoSuchMethodException", "NoSuchFieldException", "StackOverflowError",
        "OutOfMemoryError", "AssertionError", "Class", "ClassLoader",
        "Comparable", "Iterable", "Cloneable", "AutoCloseable", "Appendable",
        "Readable", "Void", "Enum", "Package", "Process", "ProcessBuilder",
        "Runtime", "SecurityManager", "ThreadLocal", "ThreadGroup",
        "Deprecated", "Override", "SuppressWarnings", "SafeVarargs",
        "FunctionalInterface", "Iterator",
    };
    return names;
}

void collect_declared_types(const Node& n, const std::string& pkg,
                            const std::string& file,
                            std::vector<DeclaredTypeInfo>& infos,
                            std::set<std::string>& simple,
                            std::string enclosing) {
    if (is_type_decl(n.kind)) {
        std::string qual = enclosing.empty()
                               ? (pkg.empty() ? n.text : pkg + "." + n.text)
                               : enclosing + "." + n.text;
        simple.insert(n.text);
        DeclaredTypeInfo info;
        info.qualified = qual;
        info.simple = n.text;
        info.file = file;
        for (const auto& c : n.children) {
            if (c->kind == NodeKind::NamedType) {
                if (c->has_flag(1u << 30)) info.extends.push_back(c->text);
                if (c->has_flag(1u << 29)) info.implements.push_back(c->text);
            }
            if (c->kind == NodeKind::MethodDecl) {
                int arity = 0;
                for (const auto& p : c->children)
                    if (p->kind == NodeKind::Parameter) ++arity;
                info.method_sigs.insert({c->text, arity});
                if (!c->has_flag(kFlagPrivate) && !c->has_flag(kFlagStatic))
                    info.inheritable_sigs.insert({c->text, arity});
            }
        }
        infos.push_back(std::move(info));
        enclosing = qual;
    }
    for (const auto& c : n.children)
        collect_declared_types(*c, pkg, file, infos, simple, enclosing);
}

} // namespace

bool TypeOriginTable::is_platform_package(const std::string& q) {
    return q.rfind("java.", 0) == 0 || q.rfind("javax.", 0) == 0;
}

bool TypeOriginTable::is_java_lang(const std::string& simple) {
    return java_lang_types().count(simple) > 0;
}

FileImports TypeOriginTable::imports_of(const SyntaxTree& tree) {
    FileImports fi;
    if (!tree.root) return fi;
    for (const auto& c : tree.root->children) {
        if (c->kind == NodeKind::PackageDecl) fi.package = c->text;
        if (c->kind == NodeKind::ImportDecl) {
            if (c->has_flag(kFlagOnDemand)) {
                if (!c->has_flag(kFlagStaticImport)) fi.on_demand.push_back(c->text);
            } else if (!c->has_flag(kFlagStaticImport)) {
                auto dot = c->text.rfind('.');
                std::string simple =
                    dot == std::string::npos ? c->text : c->text.substr(dot + 1);
                fi.single.emplace(simple, c->text);
            }
        }
    }
    walk(*tree.root, [&](const Node& n) {
        if (is_type_decl(n.kind)) fi.local_types.insert(n.text);
        return true;
    });
    return fi;
}

TypeOriginTable TypeOriginTable::build(
    const std::vector<const SyntaxTree*>& trees) {
    TypeOriginTable table;
    std::vector<DeclaredTypeInfo> infos;
    for (const SyntaxTree* t : trees) {
        if (!t || !t->root) continue;
        std::string pkg;
        if (const Node* p = t->root->first(NodeKind::PackageDecl))
            pkg = p->text;
        collect_declared_types(*t->root, pkg, t->path, infos,
                               table.declared_simple_, "");
        table.file_imports_.emplace(t->path, imports_of(*t));
    }
    for (auto& info : infos) {
        table.declared_qualified_.insert(info.qualified);
        std::string key = info.qualified;
        table.declared_types_.emplace(std::move(key), std::move(info));
    }

    for (const std::string& q : table.declared_qualified_)
        table.entries_[q] = TypeOrigin::ProjectLocal;
    for (const std::string& s : table.declared_simple_)
        table.entries_[s] = TypeOrigin::ProjectLocal;

    // Imported names that the release does not declare.
    for (const SyntaxTree* t : trees) {
        if (!t || !t->root) continue;
        for (const auto& c : t->root->children) {
            if (c->kind != NodeKind::ImportDecl || c->has_flag(kFlagOnDemand))
                continue;
            const std::string& q = c->text;
            if (table.declared_qualified_.count(q)) continue;
            TypeOrigin o = is_platform_package(q) ? TypeOrigin::JavaPlatform
                                                  : TypeOrigin::External;
            table.entries_.emplace(q, o);
            auto dot = q.rfind('.');
            std::string simple = dot == std::string::npos ? q : q.substr(dot + 1);
            table.entries_.emplace(simple, o);  // declared names keep priority
        }
    }
    return table;
}

std::string TypeOriginTable::resolve_declared(const std::string& name,
                                              const FileImports& fi) const {
    std::string base = name;
    auto lt = base.find('<');
    if (lt != std::string::npos) base = base.substr(0, lt);
    if (declared_qualified_.count(base)) return base;
    std::string q = qualified_of(base, fi);
    if (!q.empty() && declared_qualified_.count(q)) return q;
    return "";
}

std::string TypeOriginTable::qualified_of(const std::string& name,
                                          const FileImports& fi) const {
    if (name.find('.') != std::string::npos) return name;
    auto it = fi.single.find(name);
    if (it != fi.single.end()) return it->second;
    if (fi.local_types.count(name))
        return fi.package.empty() ? name : fi.package + "." + name;
    std::string same_pkg = fi.package.empty() ? name : fi.package + "." + name;
    if (declared_qualified_.count(same_pkg)) return same_pkg;
    for (const std::string& pkg : fi.on_demand) {
        std::string cand = pkg + "." + name;
        if (declared_qualified_.count(cand)) return cand;
    }
    return "";
}

TypeOrigin TypeOriginTable::resolve(const std::string& name,
                                    const FileImports& fi) const {
    if (name.empty()) return TypeOrigin::Unknown;
    // qualified name
    if (name.find('.') != std::string::npos) {
        if (declared_qualified_.count(name)) return TypeOrigin::ProjectLocal;
        if (is_platform_package(name)) return TypeOrigin::JavaPlatform;
        // Outer.Inner written relative to an import or the same package
        auto dot = name.find('.');
        std::string head = name.substr(0, dot);
        if (std::isupper(static_cast<unsigned char>(head[0]))) {
            TypeOrigin h = resolve(head, fi);
            if (h != TypeOrigin::Unknown) return h;
        }
        return TypeOrigin::External;
    }
    // simple name
    if (fi.local_types.count(name)) return TypeOrigin::ProjectLocal;
    auto it = fi.single.find(name);
    if (it != fi.single.end()) {
        const std::string& q = it->second;
        if (declared_qualified_.count(q)) return TypeOrigin::ProjectLocal;
        if (is_platform_package(q)) return TypeOrigin::JavaPlatform;
        return TypeOrigin::External;
    }
    std::string same_pkg = fi.package.empty() ? name : fi.package + "." + name;
    if (declared_qualified_.count(same_pkg)) return TypeOrigin::ProjectLocal;
    for (const std::string& pkg : fi.on_demand) {
        if (declared_qualified_.count(pkg + "." + name))
            return TypeOrigin::ProjectLocal;
    }
    if (is_java_lang(name)) return TypeOrigin::JavaPlatform;
    // Wildcard imports cannot pin a package for an undeclared simple name.
    // When every wildcard is a platform package the name can only have come
    // from the platform; one foreign wildcard makes it unresolvable.
    if (!fi.on_demand.empty()) {
        bool all_platform = true;
        for (const std::string& pkg : fi.on_demand)
            if (!is_platform_package(pkg + ".")) all_platform = false;
        if (all_platform) return TypeOrigin::JavaPlatform;
    }
    return TypeOrigin::Unknown;
}

const char* type_origin_name(TypeOrigin o) {
    switch (o) {
        case TypeOrigin::ProjectLocal: return "ProjectLocal";
        case TypeOrigin::JavaPlatform: return "JavaPlatform";
        case TypeOrigin::External: return "External";
        case TypeOrigin::Unknown: return "Unknown";
    }
    return "?";
}

} // namespace kupred::java
