#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace kupred::java {

// Byte offsets into the source plus 1-based line numbers. A parent span
// always contains its children's spans.
struct Span {
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t line_begin = 0;
    uint32_t line_end = 0;
};

enum class NodeKind : uint8_t {
    CompilationUnit,
    PackageDecl,       // text = package name
    ImportDecl,        // text = imported name (without trailing .*)
    ClassDecl,         // text = simple name
    InterfaceDecl,
    EnumDecl,
    AnnotationDecl,    // @interface
    EnumConstant,      // text = constant name; children: args, optional body
    FieldDecl,         // children: annotations, modifiers, type, declarators
    VariableDeclarator,// text = variable name; child: initializer if any
    MethodDecl,        // text = method name
    ConstructorDecl,   // text = type name
    InitializerBlock,  // static or instance initializer
    Parameter,         // text = parameter name
    TypeParameter,     // text = type variable name; children: bounds
    Modifier,          // text = keyword ("public", "final", ...)
    Annotation,        // text = annotation type name (may be qualified)
    AnnotationValue,   // text = element name ("" for single-element form)

    PrimitiveType,     // text = keyword
    NamedType,         // text = possibly qualified name; children: type args
    ArrayType,         // child: element type; flags low byte = dimensions
    WildcardType,      // child: bound if any
    UnionType,         // multi-catch alternatives

    Block,
    LocalVarDecl,      // children: modifiers, type, declarators
    LocalTypeDecl,     // wraps a ClassDecl/InterfaceDecl/EnumDecl statement
    EmptyStmt,
    ExprStmt,
    IfStmt,            // children: cond, then, [else]
    ForStmt,           // children: ForInit, [cond], ForUpdate, body
    ForInit,
    ForUpdate,
    EnhancedForStmt,   // children: Parameter, iterable, body
    WhileStmt,         // children: cond, body
    DoStmt,            // children: body, cond
    SwitchStmt,        // children: selector, SwitchGroup...
    SwitchGroup,       // children: CaseLabel..., statements...
    CaseLabel,         // child: expr; no child means `default`
    TryStmt,           // children: [ResourceList], Block, CatchClause..., [FinallyClause]
    ResourceList,
    Resource,          // a try-with-resources declaration or name
    CatchClause,       // children: Parameter (type may be UnionType), Block
    FinallyClause,     // child: Block
    ReturnStmt,
    ThrowStmt,
    BreakStmt,         // text = label or ""
    ContinueStmt,      // text = label or ""
    SynchronizedStmt,  // children: monitor expr, Block
    LabeledStmt,       // text = label; child: statement
    AssertStmt,
    ThisCall,          // this(...) in a constructor; children: ArgumentList
    SuperCall,         // super(...) in a constructor; children: ArgumentList

    Assignment,        // text = operator; children: lhs, rhs
    Conditional,       // children: cond, then, else
    Binary,            // text = operator; children: lhs, rhs
    InstanceOfExpr,    // children: expr, type
    Unary,             // text = operator (prefix)
    Postfix,           // text = operator ("++"/"--")
    CastExpr,          // children: type, expr
    LambdaExpr,        // children: LambdaParams, body (expr or Block)
    LambdaParams,
    MethodRef,         // text = referenced name; child: qualifier (expr or type)
    MethodInvocation,  // text = method name; children: [qualifier expr], ArgumentList
    ArgumentList,
    FieldAccess,       // text = field name; child: qualifier expr
    ArrayAccess,       // children: array expr, index expr
    NewObject,         // children: NamedType, ArgumentList, [anonymous class Block-of-members]
    AnonymousBody,     // member list of an anonymous class
    NewArray,          // children: element type, dim exprs..., [ArrayInitializer]
    ArrayInitializer,
    NameExpr,          // text = simple or qualified name
    ThisExpr,          // text = qualifier or ""
    SuperExpr,
    ClassLiteral,      // child: type
    Literal,           // text = literal spelling; flags carry LiteralKind
    ParenExpr,
};

// Modifier and context bits stored in Node::flags.
enum NodeFlag : uint32_t {
    kFlagStatic = 1u << 0,
    kFlagFinal = 1u << 1,
    kFlagAbstract = 1u << 2,
    kFlagPublic = 1u << 3,
    kFlagPrivate = 1u << 4,
    kFlagProtected = 1u << 5,
    kFlagSynchronized = 1u << 6,
    kFlagVarargs = 1u << 7,   // on Parameter
    kFlagOnDemand = 1u << 8,  // on ImportDecl (trailing .*)
    kFlagStaticImport = 1u << 9,
    kFlagHasInit = 1u << 10,  // on VariableDeclarator
    kFlagDefaultLabel = 1u << 11,
    kFlagDiamond = 1u << 12,  // new Foo<>() on NewObject's NamedType
    kFlagNative = 1u << 13,
    kFlagTransient = 1u << 14,
    kFlagVolatile = 1u << 15,
    kFlagStrictfp = 1u << 16,
    kFlagDefaultMethod = 1u << 17,  // interface default method
};

enum class LiteralKind : uint8_t {
    Int, Long, Float, Double, Char, String, Bool, Null,
};

struct Node {
    NodeKind kind;
    Span span;
    std::string text;
    uint32_t flags = 0;
    LiteralKind literal = LiteralKind::Int;
    std::vector<std::unique_ptr<Node>> children;

    Node(NodeKind k) : kind(k) {}

    Node* add(std::unique_ptr<Node> child) {
        children.push_back(std::move(child));
        return children.back().get();
    }
    const Node* child(size_t i) const {
        return i < children.size() ? children[i].get() : nullptr;
    }
    const Node* first(NodeKind k) const {
        for (const auto& c : children)
            if (c->kind == k) return c.get();
        return nullptr;
    }
    bool has_flag(uint32_t f) const { return (flags & f) != 0; }
};

struct ParseError {
    std::string message;
    uint32_t line = 0;
    uint32_t offset = 0;
};

// One parsed file. `root` is a CompilationUnit even when errors occurred;
// fatal == true means nothing useful could be recovered.
struct SyntaxTree {
    std::unique_ptr<Node> root;
    std::vector<ParseError> errors;
    bool fatal = false;

    std::string path;        // relative path within the release
    std::string release_id;

    // lexical facts the metric extractor needs
    std::vector<std::pair<uint32_t, uint32_t>> comment_lines;  // line ranges
    uint32_t line_count = 0;
    uint32_t semicolon_count = 0;
    uint32_t byte_count = 0;
};

bool is_type_decl(NodeKind k);
bool is_statement(NodeKind k);

// Pre-order walk; callback returns false to skip the node's children.
void walk(const Node& node, const std::function<bool(const Node&)>& fn);

// Pre-order walk with the ancestor chain available to the callback.
void walk_with_ancestors(
    const Node& node,
    const std::function<bool(const Node&, const std::vector<const Node*>&)>& fn);

// All nodes of the given kinds in pre-order (the enumerate surface used by
// the detector and the metric extractor).
std::vector<const Node*> collect(const Node& root,
                                 std::initializer_list<NodeKind> kinds);

const char* node_kind_name(NodeKind k);

} // namespace kupred::java
