#include "kupred/metrics/product.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "kupred/java/token.hpp"

namespace kupred::metrics {

using java::Node;
using java::NodeKind;
using java::SyntaxTree;

namespace {

std::string last_segment(const std::string& name) {
    auto dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(dot + 1);
}

bool is_callable_with_body(const Node& n) {
    return (n.kind == NodeKind::MethodDecl ||
            n.kind == NodeKind::ConstructorDecl) &&
           n.first(NodeKind::Block) != nullptr;
}

// Walks a subtree without descending into nested type declarations,
// anonymous bodies or lambda bodies. Used for per-method analyses so a
// local class inside a method is charged to its own methods.
void walk_method_scope(const Node& n, const std::function<void(const Node&)>& fn,
                       bool root = true) {
    if (!root) {
        if (java::is_type_decl(n.kind) || n.kind == NodeKind::AnonymousBody ||
            n.kind == NodeKind::LambdaExpr)
            return;
        fn(n);
    }
    for (const auto& c : n.children) walk_method_scope(*c, fn, false);
}

// ---- cyclomatic family ---------------------------------------------------

struct CyclomaticCounts {
    int decisions = 0;        // if, loops, ternary, catch + case labels
    int decisions_mod = 0;    // switch counted once instead of per case
    int bool_ops = 0;         // && and ||
};

CyclomaticCounts cyclomatic_of(const Node& body) {
    CyclomaticCounts c;
    walk_method_scope(body, [&](const Node& n) {
        switch (n.kind) {
            case NodeKind::IfStmt:
            case NodeKind::ForStmt:
            case NodeKind::EnhancedForStmt:
            case NodeKind::WhileStmt:
            case NodeKind::DoStmt:
            case NodeKind::Conditional:
            case NodeKind::CatchClause:
                ++c.decisions;
                ++c.decisions_mod;
                break;
            case NodeKind::CaseLabel:
                if (!n.has_flag(java::kFlagDefaultLabel)) ++c.decisions;
                break;
            case NodeKind::SwitchStmt:
                ++c.decisions_mod;
                break;
            case NodeKind::Binary:
                if (n.text == "&&" || n.text == "||") ++c.bool_ops;
                break;
            default:
                break;
        }
    });
    return c;
}

// ---- essential complexity --------------------------------------------------

// A construct is reducible when control cannot jump out of it: returns and
// throws always escape; break/continue escape unless their target construct
// lies strictly inside (or, for break, is the construct itself when that
// construct is a switch).
struct JumpInfo {
    const Node* node;
    NodeKind kind;       // Break/Continue/Return/Throw
    std::string label;
};

bool is_loop(NodeKind k) {
    return k == NodeKind::ForStmt || k == NodeKind::EnhancedForStmt ||
           k == NodeKind::WhileStmt || k == NodeKind::DoStmt;
}

int case_label_count(const Node& sw) {
    int n = 0;
    for (const auto& g : sw.children)
        if (g->kind == NodeKind::SwitchGroup)
            for (const auto& l : g->children)
                if (l->kind == NodeKind::CaseLabel &&
                    !l->has_flag(java::kFlagDefaultLabel))
                    ++n;
    return n;
}

int essential_of(const Node& body) {
    // collect decision constructs with their ancestor chains
    struct Entry {
        const Node* node;
        std::vector<const Node*> ancestors;  // within the method scope
    };
    std::vector<Entry> constructs;
    std::vector<Entry> jumps;
    std::vector<const Node*> stack;
    std::function<void(const Node&)> rec = [&](const Node& n) {
        for (const auto& c : n.children) {
            if (java::is_type_decl(c->kind) ||
                c->kind == NodeKind::AnonymousBody ||
                c->kind == NodeKind::LambdaExpr)
                continue;
            NodeKind k = c->kind;
            if (k == NodeKind::IfStmt || is_loop(k) || k == NodeKind::SwitchStmt)
                constructs.push_back({c.get(), stack});
            if (k == NodeKind::BreakStmt || k == NodeKind::ContinueStmt ||
                k == NodeKind::ReturnStmt || k == NodeKind::ThrowStmt)
                jumps.push_back({c.get(), stack});
            stack.push_back(c.get());
            rec(*c);
            stack.pop_back();
        }
    };
    rec(body);

    auto target_of = [&](const Entry& j) -> const Node* {
        const Node& stmt = *j.node;
        for (auto it = j.ancestors.rbegin(); it != j.ancestors.rend(); ++it) {
            const Node* a = *it;
            if (!stmt.text.empty()) {  // labeled break/continue
                if (a->kind == NodeKind::LabeledStmt && a->text == stmt.text)
                    return a;
                continue;
            }
            if (stmt.kind == NodeKind::BreakStmt &&
                (is_loop(a->kind) || a->kind == NodeKind::SwitchStmt))
                return a;
            if (stmt.kind == NodeKind::ContinueStmt && is_loop(a->kind))
                return a;
        }
        return nullptr;
    };

    auto inside = [](const Node* inner, const Node* outer) {
        return inner->span.begin >= outer->span.begin &&
               inner->span.end <= outer->span.end && inner != outer;
    };

    int essential = 1;
    for (const auto& d : constructs) {
        bool unstructured = false;
        for (const auto& j : jumps) {
            if (!(j.node->span.begin >= d.node->span.begin &&
                  j.node->span.end <= d.node->span.end))
                continue;  // jump not inside this construct
            if (j.node->kind == NodeKind::ReturnStmt ||
                j.node->kind == NodeKind::ThrowStmt) {
                unstructured = true;
                break;
            }
            const Node* target = target_of(j);
            if (!target) {
                unstructured = true;  // unresolved target: assume escape
                break;
            }
            if (target == d.node) {
                // break out of this switch is the normal exit; break or
                // continue addressed at this loop is an extra exit/entry
                if (!(j.node->kind == NodeKind::BreakStmt &&
                      d.node->kind == NodeKind::SwitchStmt)) {
                    unstructured = true;
                    break;
                }
            } else if (!inside(target, d.node)) {
                unstructured = true;  // escapes past this construct
                break;
            }
        }
        if (unstructured) {
            if (d.node->kind == NodeKind::SwitchStmt)
                essential += case_label_count(*d.node);
            else
                essential += 1;
        }
    }
    return essential;
}

// ---- NPATH -----------------------------------------------------------------

int bool_ops_in(const Node& expr) {
    int n = 0;
    walk_method_scope(expr, [&](const Node& c) {
        if (c.kind == NodeKind::Binary && (c.text == "&&" || c.text == "||"))
            ++n;
    });
    if (expr.kind == NodeKind::Binary && (expr.text == "&&" || expr.text == "||"))
        ++n;
    return n;
}

double np_cap(double v) { return std::min(v, kCountPathCap); }

double npath_stmt(const Node& n, bool& capped);

double npath_list(const std::vector<std::unique_ptr<Node>>& stmts, size_t from,
                  bool& capped) {
    double prod = 1.0;
    for (size_t i = from; i < stmts.size(); ++i) {
        const Node& c = *stmts[i];
        if (!java::is_statement(c.kind)) continue;
        prod = np_cap(prod * npath_stmt(c, capped));
        if (prod >= kCountPathCap) capped = true;
    }
    return prod;
}

double npath_stmt(const Node& n, bool& capped) {
    switch (n.kind) {
        case NodeKind::Block:
            return npath_list(n.children, 0, capped);
        case NodeKind::IfStmt: {
            const Node* cond = n.child(0);
            const Node* then = n.child(1);
            const Node* els = n.child(2);
            double np = cond ? bool_ops_in(*cond) : 0;
            double t = then ? npath_stmt(*then, capped) : 1;
            double e = els ? npath_stmt(*els, capped) : 1;
            return np_cap(np + t + e);
        }
        case NodeKind::WhileStmt:
        case NodeKind::DoStmt: {
            const Node* cond = n.kind == NodeKind::WhileStmt ? n.child(0)
                                                             : n.child(1);
            const Node* body = n.kind == NodeKind::WhileStmt ? n.child(1)
                                                             : n.child(0);
            double np = cond ? bool_ops_in(*cond) : 0;
            double b = body ? npath_stmt(*body, capped) : 1;
            return np_cap(np + b + 1);
        }
        case NodeKind::ForStmt: {
            const Node* cond = nullptr;
            const Node* body = nullptr;
            for (const auto& c : n.children) {
                if (c->kind != NodeKind::ForInit &&
                    c->kind != NodeKind::ForUpdate &&
                    !java::is_statement(c->kind) && !cond)
                    cond = c.get();
                if (java::is_statement(c->kind)) body = c.get();
            }
            double np = cond ? bool_ops_in(*cond) : 0;
            double b = body ? npath_stmt(*body, capped) : 1;
            return np_cap(np + b + 1);
        }
        case NodeKind::EnhancedForStmt: {
            const Node* body = n.children.empty()
                                   ? nullptr
                                   : n.children.back().get();
            double b = body ? npath_stmt(*body, capped) : 1;
            return np_cap(b + 1);
        }
        case NodeKind::SwitchStmt: {
            const Node* sel = n.child(0);
            double total = sel ? bool_ops_in(*sel) : 0;
            bool has_default = false;
            for (const auto& g : n.children) {
                if (g->kind != NodeKind::SwitchGroup) continue;
                for (const auto& l : g->children)
                    if (l->kind == NodeKind::CaseLabel &&
                        l->has_flag(java::kFlagDefaultLabel))
                        has_default = true;
                total = np_cap(total + npath_list(g->children, 0, capped));
            }
            if (!has_default) total += 1;
            return np_cap(total);
        }
        case NodeKind::TryStmt: {
            double total = 0;
            double fin = 1;
            for (const auto& c : n.children) {
                if (c->kind == NodeKind::Block)
                    total = np_cap(total + npath_stmt(*c, capped));
                if (c->kind == NodeKind::CatchClause)
                    if (const Node* b = c->first(NodeKind::Block))
                        total = np_cap(total + npath_stmt(*b, capped));
                if (c->kind == NodeKind::FinallyClause)
                    if (const Node* b = c->first(NodeKind::Block))
                        fin = npath_stmt(*b, capped);
            }
            return np_cap(std::max(total, 1.0) * fin);
        }
        case NodeKind::LabeledStmt:
            return n.children.empty() ? 1 : npath_stmt(*n.children[0], capped);
        case NodeKind::SynchronizedStmt: {
            const Node* b = n.first(NodeKind::Block);
            return b ? npath_stmt(*b, capped) : 1;
        }
        default:
            return 1;
    }
}

double npath_of(const Node& body, bool& capped) {
    double v = npath_stmt(body, capped);
    if (v >= kCountPathCap) capped = true;
    return np_cap(v);
}

// ---- nesting ----------------------------------------------------------------

bool is_nesting_construct(NodeKind k) {
    return k == NodeKind::IfStmt || is_loop(k) || k == NodeKind::SwitchStmt ||
           k == NodeKind::TryStmt || k == NodeKind::SynchronizedStmt;
}

int max_nesting_of(const Node& body) {
    int best = 0;
    std::function<void(const Node&, int)> rec = [&](const Node& n, int depth) {
        for (const auto& c : n.children) {
            if (java::is_type_decl(c->kind) ||
                c->kind == NodeKind::AnonymousBody ||
                c->kind == NodeKind::LambdaExpr)
                continue;
            int d = depth;
            if (is_nesting_construct(c->kind)) {
                d = depth + 1;
                best = std::max(best, d);
            }
            rec(*c, d);
        }
    };
    rec(body, 0);
    return best;
}

// ---- fan-in / fan-out --------------------------------------------------------

struct MethodFacts {
    const Node* decl;
    std::set<std::string> invoked;         // distinct callee names
    std::set<std::string> reads;           // static fields read
    std::set<std::string> writes;          // static fields written
};

// ---- per-line classification ---------------------------------------------

struct LineFacts {
    uint32_t line_count = 0;
    std::set<uint32_t> code_lines;
    std::set<uint32_t> comment_lines;
};

LineFacts classify_lines(const std::string& text) {
    LineFacts lf;
    auto lexed = java::lex(text);
    lf.line_count = lexed.line_count;
    for (const auto& t : lexed.tokens) {
        if (t.kind == java::TokenKind::EndOfFile) break;
        lf.code_lines.insert(t.line);
        // multi-line string literals are impossible; tokens sit on one line
    }
    for (const auto& c : lexed.comments)
        for (uint32_t l = c.line_begin; l <= c.line_end; ++l)
            lf.comment_lines.insert(l);
    return lf;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

const std::vector<std::string>& product_metric_names() {
    static const std::vector<std::string> names = {
        "AvgCyclomatic", "AvgCyclomaticModified", "AvgCyclomaticStrict",
        "AvgEssential", "AvgLine", "AvgLineBlank", "AvgLineCode",
        "AvgLineComment", "CountDeclClass", "CountDeclClassMethod",
        "CountDeclClassVariable", "CountDeclFunction",
        "CountDeclInstanceMethod", "CountDeclInstanceVariable",
        "CountDeclMethod", "CountDeclMethodDefault", "CountDeclMethodPrivate",
        "CountDeclMethodProtected", "CountDeclMethodPublic", "CountLine",
        "CountLineBlank", "CountLineCode", "CountLineCodeDecl",
        "CountLineCodeExe", "CountLineComment", "CountSemicolon", "CountStmt",
        "CountStmtDecl", "CountStmtExe", "MaxCyclomatic",
        "MaxCyclomaticModified", "MaxCyclomaticStrict", "RatioCommentToCode",
        "SumCyclomatic", "SumCyclomaticModified", "SumCyclomaticStrict",
        "SumEssential", "CountClassCoupled", "CountClassDerived",
        "MaxInheritanceTree", "PercentLackOfCohesion", "CountDeclMethodAll",
        "CountInput_Min", "CountInput_Median", "CountInput_Max",
        "CountOutput_Min", "CountOutput_Median", "CountOutput_Max",
        "CountPath_Min", "CountPath_Median", "CountPath_Max",
        "MaxNesting_Min", "MaxNesting_Median", "MaxNesting_Max",
        "CountInput_Mean", "CountOutput_Mean", "CountPath_Mean",
        "MaxNesting_Mean",
    };
    return names;
}

int product_metric_index(const std::string& name) {
    const auto& names = product_metric_names();
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

double aggregate_method_level(const std::vector<double>& per_method_values,
                              Aggregate which, bool* empty) {
    if (empty) *empty = per_method_values.empty();
    if (per_method_values.empty()) return 0.0;
    switch (which) {
        case Aggregate::Min:
            return *std::min_element(per_method_values.begin(),
                                     per_method_values.end());
        case Aggregate::Max:
            return *std::max_element(per_method_values.begin(),
                                     per_method_values.end());
        case Aggregate::Mean:
            return mean_of(per_method_values);
        case Aggregate::Median:
            return median_of(per_method_values);
    }
    return 0.0;
}

ProductMetricVector compute_product_metrics(
    const SyntaxTree& tree, const std::string& text,
    const java::TypeOriginTable* origins) {
    ProductMetricVector out;

    // line metrics are computable even without a tree
    LineFacts lf = classify_lines(text);
    out[kCountLine] = lf.line_count;
    out[kCountLineComment] = static_cast<double>(lf.comment_lines.size());
    out[kCountLineCode] = static_cast<double>(lf.code_lines.size());
    std::set<uint32_t> nonblank = lf.code_lines;
    nonblank.insert(lf.comment_lines.begin(), lf.comment_lines.end());
    out[kCountLineBlank] =
        static_cast<double>(lf.line_count) - static_cast<double>(nonblank.size());
    out[kRatioCommentToCode] =
        lf.code_lines.empty()
            ? 0.0
            : static_cast<double>(lf.comment_lines.size()) /
                  static_cast<double>(lf.code_lines.size());
    out[kCountSemicolon] = tree.semicolon_count;

    if (!tree.root || tree.fatal) {
        out.ast_metrics_valid = false;
        return out;
    }
    const Node& root = *tree.root;

    // ---- declaration counts ----
    int decl_class = 0, class_methods = 0, class_vars = 0, inst_methods = 0,
        inst_vars = 0, methods = 0, funcs = 0, m_default = 0, m_private = 0,
        m_protected = 0, m_public = 0;
    java::walk(root, [&](const Node& n) {
        if (java::is_type_decl(n.kind)) ++decl_class;
        if (n.kind == NodeKind::FieldDecl) {
            int declarators = 0;
            for (const auto& c : n.children)
                if (c->kind == NodeKind::VariableDeclarator) ++declarators;
            if (n.has_flag(java::kFlagStatic))
                class_vars += declarators;
            else
                inst_vars += declarators;
        }
        if (n.kind == NodeKind::MethodDecl) {
            ++methods;
            ++funcs;
            if (n.has_flag(java::kFlagStatic))
                ++class_methods;
            else
                ++inst_methods;
            if (n.has_flag(java::kFlagPublic)) ++m_public;
            else if (n.has_flag(java::kFlagPrivate)) ++m_private;
            else if (n.has_flag(java::kFlagProtected)) ++m_protected;
            else ++m_default;
        }
        if (n.kind == NodeKind::ConstructorDecl) ++funcs;
        return true;
    });
    out[kCountDeclClass] = decl_class;
    out[kCountDeclClassMethod] = class_methods;
    out[kCountDeclClassVariable] = class_vars;
    out[kCountDeclFunction] = funcs;
    out[kCountDeclInstanceMethod] = inst_methods;
    out[kCountDeclInstanceVariable] = inst_vars;
    out[kCountDeclMethod] = methods;
    out[kCountDeclMethodDefault] = m_default;
    out[kCountDeclMethodPrivate] = m_private;
    out[kCountDeclMethodProtected] = m_protected;
    out[kCountDeclMethodPublic] = m_public;

    // ---- statement counts and decl/exe line sets ----
    int stmt_decl = 0, stmt_exe = 0;
    std::set<uint32_t> decl_lines, exe_lines;
    auto add_lines = [](std::set<uint32_t>& into, uint32_t from, uint32_t to) {
        for (uint32_t l = from; l <= to; ++l) into.insert(l);
    };
    java::walk(root, [&](const Node& n) {
        switch (n.kind) {
            case NodeKind::PackageDecl:
            case NodeKind::ImportDecl:
                ++stmt_decl;
                add_lines(decl_lines, n.span.line_begin, n.span.line_end);
                break;
            case NodeKind::ClassDecl:
            case NodeKind::InterfaceDecl:
            case NodeKind::EnumDecl:
            case NodeKind::AnnotationDecl:
                ++stmt_decl;
                decl_lines.insert(n.span.line_begin);
                break;
            case NodeKind::EnumConstant:
                ++stmt_decl;
                add_lines(decl_lines, n.span.line_begin, n.span.line_end);
                break;
            case NodeKind::FieldDecl:
            case NodeKind::LocalVarDecl:
                ++stmt_decl;
                add_lines(decl_lines, n.span.line_begin, n.span.line_end);
                break;
            case NodeKind::MethodDecl:
            case NodeKind::ConstructorDecl: {
                ++stmt_decl;
                const Node* body = n.first(NodeKind::Block);
                uint32_t sig_end = body ? body->span.line_begin : n.span.line_end;
                add_lines(decl_lines, n.span.line_begin, sig_end);
                break;
            }
            case NodeKind::InitializerBlock:
                ++stmt_decl;
                break;
            case NodeKind::ExprStmt:
            case NodeKind::ReturnStmt:
            case NodeKind::ThrowStmt:
            case NodeKind::BreakStmt:
            case NodeKind::ContinueStmt:
            case NodeKind::AssertStmt:
            case NodeKind::ThisCall:
            case NodeKind::SuperCall:
                ++stmt_exe;
                add_lines(exe_lines, n.span.line_begin, n.span.line_end);
                break;
            case NodeKind::IfStmt:
            case NodeKind::ForStmt:
            case NodeKind::EnhancedForStmt:
            case NodeKind::WhileStmt:
            case NodeKind::DoStmt:
            case NodeKind::SwitchStmt:
            case NodeKind::TryStmt:
            case NodeKind::SynchronizedStmt:
                ++stmt_exe;
                exe_lines.insert(n.span.line_begin);
                break;
            default:
                break;
        }
        return true;
    });
    out[kCountStmtDecl] = stmt_decl;
    out[kCountStmtExe] = stmt_exe;
    out[kCountStmt] = stmt_decl + stmt_exe;
    {
        std::set<uint32_t> dl, el;
        for (uint32_t l : decl_lines)
            if (lf.code_lines.count(l)) dl.insert(l);
        for (uint32_t l : exe_lines)
            if (lf.code_lines.count(l)) el.insert(l);
        out[kCountLineCodeDecl] = static_cast<double>(dl.size());
        out[kCountLineCodeExe] = static_cast<double>(el.size());
    }

    // ---- per-method metrics ----
    std::vector<const Node*> callables;
    java::walk(root, [&](const Node& n) {
        if (is_callable_with_body(n)) callables.push_back(&n);
        return true;
    });

    std::vector<double> ccs, ccs_mod, ccs_strict, essentials;
    std::vector<double> mlines, mblank, mcode, mcomment;
    std::vector<double> npaths, nestings;
    std::vector<MethodFacts> facts;

    // static field names declared anywhere in this file
    std::set<std::string> static_fields;
    java::walk(root, [&](const Node& n) {
        if (n.kind == NodeKind::FieldDecl && n.has_flag(java::kFlagStatic))
            for (const auto& c : n.children)
                if (c->kind == NodeKind::VariableDeclarator)
                    static_fields.insert(c->text);
        return true;
    });

    for (const Node* m : callables) {
        const Node* body = m->first(NodeKind::Block);
        CyclomaticCounts cy = cyclomatic_of(*body);
        double cc = 1.0 + cy.decisions;
        ccs.push_back(cc);
        ccs_mod.push_back(1.0 + cy.decisions_mod);
        ccs_strict.push_back(cc + cy.bool_ops);
        essentials.push_back(essential_of(*body));

        uint32_t lb = m->span.line_begin, le = m->span.line_end;
        mlines.push_back(le - lb + 1);
        int code = 0, comment = 0;
        for (uint32_t l = lb; l <= le; ++l) {
            bool has_code = lf.code_lines.count(l) > 0;
            bool has_comment = lf.comment_lines.count(l) > 0;
            if (has_code) ++code;
            if (has_comment) ++comment;
        }
        mcode.push_back(code);
        mcomment.push_back(comment);
        double blank = static_cast<double>(le - lb + 1);
        for (uint32_t l = lb; l <= le; ++l)
            if (lf.code_lines.count(l) || lf.comment_lines.count(l)) blank -= 1;
        mblank.push_back(blank);

        bool capped = false;
        npaths.push_back(npath_of(*body, capped));
        if (capped) out.count_path_capped = true;
        nestings.push_back(max_nesting_of(*body));

        MethodFacts f;
        f.decl = m;
        walk_method_scope(*body, [&](const Node& n) {
            if (n.kind == NodeKind::MethodInvocation) f.invoked.insert(n.text);
            if (n.kind == NodeKind::Assignment && n.child(0)) {
                const Node& lhs = *n.child(0);
                std::string t;
                if (lhs.kind == NodeKind::NameExpr) t = lhs.text;
                if (lhs.kind == NodeKind::FieldAccess) t = lhs.text;
                if (!t.empty() && static_fields.count(t)) f.writes.insert(t);
            }
            if (n.kind == NodeKind::NameExpr || n.kind == NodeKind::FieldAccess) {
                // reads exclude names that are assignment targets at this spot
                if (static_fields.count(n.text)) f.reads.insert(n.text);
            }
        });
        for (const auto& w : f.writes) f.reads.erase(w);
        facts.push_back(std::move(f));
    }

    out[kAvgCyclomatic] = mean_of(ccs);
    out[kAvgCyclomaticModified] = mean_of(ccs_mod);
    out[kAvgCyclomaticStrict] = mean_of(ccs_strict);
    out[kAvgEssential] = mean_of(essentials);
    out[kAvgLine] = mean_of(mlines);
    out[kAvgLineBlank] = mean_of(mblank);
    out[kAvgLineCode] = mean_of(mcode);
    out[kAvgLineComment] = mean_of(mcomment);
    out[kMaxCyclomatic] = ccs.empty() ? 0.0 : *std::max_element(ccs.begin(), ccs.end());
    out[kMaxCyclomaticModified] =
        ccs_mod.empty() ? 0.0 : *std::max_element(ccs_mod.begin(), ccs_mod.end());
    out[kMaxCyclomaticStrict] =
        ccs_strict.empty() ? 0.0
                           : *std::max_element(ccs_strict.begin(), ccs_strict.end());
    auto sum_of = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s;
    };
    out[kSumCyclomatic] = sum_of(ccs);
    out[kSumCyclomaticModified] = sum_of(ccs_mod);
    out[kSumCyclomaticStrict] = sum_of(ccs_strict);
    out[kSumEssential] = sum_of(essentials);

    // fan-in: distinct callers within the file, by method name
    std::vector<double> inputs, outputs;
    for (size_t i = 0; i < facts.size(); ++i) {
        const MethodFacts& f = facts[i];
        int callers = 0;
        for (size_t j = 0; j < facts.size(); ++j) {
            if (j == i) continue;
            if (facts[j].invoked.count(f.decl->text)) ++callers;
        }
        inputs.push_back(static_cast<double>(callers) +
                         static_cast<double>(f.reads.size()));
        outputs.push_back(static_cast<double>(f.invoked.size()) +
                          static_cast<double>(f.writes.size()));
    }
    auto fill_agg = [&](const std::vector<double>& v, int mn, int med, int mx,
                        int mean) {
        out[mn] = aggregate_method_level(v, Aggregate::Min);
        out[med] = aggregate_method_level(v, Aggregate::Median);
        out[mx] = aggregate_method_level(v, Aggregate::Max);
        out[mean] = aggregate_method_level(v, Aggregate::Mean);
    };
    fill_agg(inputs, kCountInputMin, kCountInputMedian, kCountInputMax,
             kCountInputMean);
    fill_agg(outputs, kCountOutputMin, kCountOutputMedian, kCountOutputMax,
             kCountOutputMean);
    fill_agg(npaths, kCountPathMin, kCountPathMedian, kCountPathMax,
             kCountPathMean);
    fill_agg(nestings, kMaxNestingMin, kMaxNestingMedian, kMaxNestingMax,
             kMaxNestingMean);

    // ---- class-level metrics, aggregated as max over top-level types ----
    java::FileImports fi = java::TypeOriginTable::imports_of(tree);
    double cbo = 0, noc = 0, dit = 0, lcom = 0, rfc = 0;
    for (const auto& c : root.children) {
        if (!java::is_type_decl(c->kind)) continue;
        const Node& type = *c;

        // CBO: distinct referenced simple type names minus self and type vars
        std::set<std::string> referenced, type_vars;
        java::walk(type, [&](const Node& n) {
            if (n.kind == NodeKind::TypeParameter) type_vars.insert(n.text);
            if (n.kind == NodeKind::NamedType)
                referenced.insert(last_segment(n.text));
            return true;
        });
        referenced.erase(type.text);
        for (const auto& tv : type_vars) referenced.erase(tv);
        cbo = std::max(cbo, static_cast<double>(referenced.size()));

        // LCOM
        std::vector<const Node*> own_methods;
        std::set<std::string> own_fields;
        for (const auto& mem : type.children) {
            if (mem->kind == NodeKind::MethodDecl &&
                mem->first(NodeKind::Block))
                own_methods.push_back(mem.get());
            if (mem->kind == NodeKind::FieldDecl)
                for (const auto& d : mem->children)
                    if (d->kind == NodeKind::VariableDeclarator)
                        own_fields.insert(d->text);
        }
        if (!own_methods.empty() && !own_fields.empty()) {
            double acc = 0;
            for (const auto& field : own_fields) {
                int using_it = 0;
                for (const Node* m : own_methods) {
                    bool uses = false;
                    walk_method_scope(*m->first(NodeKind::Block),
                                      [&](const Node& n) {
                                          if ((n.kind == NodeKind::NameExpr ||
                                               n.kind == NodeKind::FieldAccess) &&
                                              n.text == field)
                                              uses = true;
                                      });
                    if (uses) ++using_it;
                }
                acc += 1.0 - static_cast<double>(using_it) /
                                 static_cast<double>(own_methods.size());
            }
            lcom = std::max(lcom, 100.0 * acc /
                                      static_cast<double>(own_fields.size()));
        }

        // inheritance metrics via the release type graph
        std::string pkg;
        if (const Node* p = root.first(NodeKind::PackageDecl)) pkg = p->text;
        std::string qualified = pkg.empty() ? type.text : pkg + "." + type.text;

        int own_method_count = 0;
        for (const auto& mem : type.children)
            if (mem->kind == NodeKind::MethodDecl) ++own_method_count;

        if (origins) {
            // NOC: declared types whose extends resolves here
            int children_count = 0;
            for (const auto& [q, info] : origins->declared_types()) {
                if (q == qualified) continue;
                const java::FileImports* dfi = origins->imports_of_file(info.file);
                if (!dfi) continue;
                for (const auto& s : info.extends)
                    if (origins->resolve_declared(s, *dfi) == qualified)
                        ++children_count;
            }
            noc = std::max(noc, static_cast<double>(children_count));

            // DIT: walk project-local extends chain
            int depth = 1;
            std::set<std::string> visited{qualified};
            std::string cur = qualified;
            const java::FileImports* cfi = &fi;
            for (int hop = 0; hop < 64; ++hop) {
                const java::DeclaredTypeInfo* info = origins->type_info(cur);
                if (!info || info->extends.empty()) break;
                std::string sq = origins->resolve_declared(info->extends[0], *cfi);
                if (sq.empty()) {
                    ++depth;  // parent exists but is not project-local
                    break;
                }
                if (visited.count(sq)) break;
                visited.insert(sq);
                ++depth;
                cur = sq;
                const java::DeclaredTypeInfo* si = origins->type_info(cur);
                cfi = si ? origins->imports_of_file(si->file) : nullptr;
                if (!cfi) break;
            }
            dit = std::max(dit, static_cast<double>(depth));

            // RFC: own methods plus inherited, not overridden
            const java::DeclaredTypeInfo* self = origins->type_info(qualified);
            std::set<std::pair<std::string, int>> inherited;
            if (self) {
                std::set<std::string> seen{qualified};
                std::function<void(const std::string&)> up =
                    [&](const std::string& q) {
                        const java::DeclaredTypeInfo* info = origins->type_info(q);
                        if (!info) return;
                        const java::FileImports* ufi =
                            origins->imports_of_file(info->file);
                        if (!ufi) return;
                        std::vector<std::string> supers = info->extends;
                        supers.insert(supers.end(), info->implements.begin(),
                                      info->implements.end());
                        for (const auto& s : supers) {
                            std::string sq = origins->resolve_declared(s, *ufi);
                            if (sq.empty() || seen.count(sq)) continue;
                            seen.insert(sq);
                            const java::DeclaredTypeInfo* si = origins->type_info(sq);
                            if (si)
                                for (const auto& sig : si->inheritable_sigs)
                                    if (!self->method_sigs.count(sig))
                                        inherited.insert(sig);
                            up(sq);
                        }
                    };
                up(qualified);
            }
            rfc = std::max(rfc, static_cast<double>(own_method_count) +
                                    static_cast<double>(inherited.size()));
        } else {
            bool has_extends = false;
            for (const auto& mem : type.children)
                if (mem->kind == NodeKind::NamedType && mem->has_flag(1u << 30))
                    has_extends = true;
            dit = std::max(dit, has_extends ? 2.0 : 1.0);
            rfc = std::max(rfc, static_cast<double>(own_method_count));
        }
    }
    out[kCountClassCoupled] = cbo;
    out[kCountClassDerived] = noc;
    out[kMaxInheritanceTree] = dit;
    out[kPercentLackOfCohesion] = lcom;
    out[kCountDeclMethodAll] = rfc;

    return out;
}

} // namespace kupred::metrics
