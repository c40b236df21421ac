#include "kupred/java/ast.hpp"

namespace kupred::java {

bool is_type_decl(NodeKind k) {
    return k == NodeKind::ClassDecl || k == NodeKind::InterfaceDecl ||
           k == NodeKind::EnumDecl || k == NodeKind::AnnotationDecl;
}

bool is_statement(NodeKind k) {
    switch (k) {
        case NodeKind::Block:
        case NodeKind::LocalVarDecl:
        case NodeKind::LocalTypeDecl:
        case NodeKind::EmptyStmt:
        case NodeKind::ExprStmt:
        case NodeKind::IfStmt:
        case NodeKind::ForStmt:
        case NodeKind::EnhancedForStmt:
        case NodeKind::WhileStmt:
        case NodeKind::DoStmt:
        case NodeKind::SwitchStmt:
        case NodeKind::TryStmt:
        case NodeKind::ReturnStmt:
        case NodeKind::ThrowStmt:
        case NodeKind::BreakStmt:
        case NodeKind::ContinueStmt:
        case NodeKind::SynchronizedStmt:
        case NodeKind::LabeledStmt:
        case NodeKind::AssertStmt:
        case NodeKind::ThisCall:
        case NodeKind::SuperCall:
            return true;
        default:
            return false;
    }
}

void walk(const Node& node, const std::function<bool(const Node&)>& fn) {
    if (!fn(node)) return;
    for (const auto& c : node.children) walk(*c, fn);
}

void walk_with_ancestors(
    const Node& node,
    const std::function<bool(const Node&, const std::vector<const Node*>&)>& fn) {
    std::vector<const Node*> stack;
    std::function<void(const Node&)> rec = [&](const Node& n) {
        if (!fn(n, stack)) return;
        stack.push_back(&n);
        for (const auto& c : n.children) rec(*c);
        stack.pop_back();
    };
    rec(node);
}

std::vector<const Node*> collect(const Node& root,
                                 std::initializer_list<NodeKind> kinds) {
    std::vector<const Node*> out;
    walk(root, [&](const Node& n) {
        for (NodeKind k : kinds)
            if (n.kind == k) {
                out.push_back(&n);
                break;
            }
        return true;
    });
    return out;
}

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::CompilationUnit: return "CompilationUnit";
        case NodeKind::PackageDecl: return "PackageDecl";
        case NodeKind::ImportDecl: return "ImportDecl";
        case NodeKind::ClassDecl: return "ClassDecl";
        case NodeKind::InterfaceDecl: return "InterfaceDecl";
        case NodeKind::EnumDecl: return "EnumDecl";
        case NodeKind::AnnotationDecl: return "AnnotationDecl";
        case NodeKind::EnumConstant: return "EnumConstant";
        case NodeKind::FieldDecl: return "FieldDecl";
        case NodeKind::VariableDeclarator: return "VariableDeclarator";
        case NodeKind::MethodDecl: return "MethodDecl";
        case NodeKind::ConstructorDecl: return "ConstructorDecl";
        case NodeKind::InitializerBlock: return "InitializerBlock";
        case NodeKind::Parameter: return "Parameter";
        case NodeKind::TypeParameter: return "TypeParameter";
        case NodeKind::Modifier: return "Modifier";
        case NodeKind::Annotation: return "Annotation";
        case NodeKind::AnnotationValue: return "AnnotationValue";
        case NodeKind::PrimitiveType: return "PrimitiveType";
        case NodeKind::NamedType: return "NamedType";
        case NodeKind::ArrayType: return "ArrayType";
        case NodeKind::WildcardType: return "WildcardType";
        case NodeKind::UnionType: return "UnionType";
        case NodeKind::Block: return "Block";
        case NodeKind::LocalVarDecl: return "LocalVarDecl";
        case NodeKind::LocalTypeDecl: return "LocalTypeDecl";
        case NodeKind::EmptyStmt: return "EmptyStmt";
        case NodeKind::ExprStmt: return "ExprStmt";
        case NodeKind::IfStmt: return "IfStmt";
        case NodeKind::ForStmt: return "ForStmt";
        case NodeKind::ForInit: return "ForInit";
        case NodeKind::ForUpdate: return "ForUpdate";
        case NodeKind::EnhancedForStmt: return "EnhancedForStmt";
        case NodeKind::WhileStmt: return "WhileStmt";
        case NodeKind::DoStmt: return "DoStmt";
        case NodeKind::SwitchStmt: return "SwitchStmt";
        case NodeKind::SwitchGroup: return "SwitchGroup";
        case NodeKind::CaseLabel: return "CaseLabel";
        case NodeKind::TryStmt: return "TryStmt";
        case NodeKind::ResourceList: return "ResourceList";
        case NodeKind::Resource: return "Resource";
        case NodeKind::CatchClause: return "CatchClause";
        case NodeKind::FinallyClause: return "FinallyClause";
        case NodeKind::ReturnStmt: return "ReturnStmt";
        case NodeKind::ThrowStmt: return "ThrowStmt";
        case NodeKind::BreakStmt: return "BreakStmt";
        case NodeKind::ContinueStmt: return "ContinueStmt";
        case NodeKind::SynchronizedStmt: return "SynchronizedStmt";
        case NodeKind::LabeledStmt: return "LabeledStmt";
        case NodeKind::AssertStmt: return "AssertStmt";
        case NodeKind::ThisCall: return "ThisCall";
        case NodeKind::SuperCall: return "SuperCall";
        case NodeKind::Assignment: return "Assignment";
        case NodeKind::Conditional: return "Conditional";
        case NodeKind::Binary: return "Binary";
        case NodeKind::InstanceOfExpr: return "InstanceOfExpr";
        case NodeKind::Unary: return "Unary";
        case NodeKind::Postfix: return "Postfix";
        case NodeKind::CastExpr: return "CastExpr";
        case NodeKind::LambdaExpr: return "LambdaExpr";
        case NodeKind::LambdaParams: return "LambdaParams";
        case NodeKind::MethodRef: return "MethodRef";
        case NodeKind::MethodInvocation: return "MethodInvocation";
        case NodeKind::ArgumentList: return "ArgumentList";
        case NodeKind::FieldAccess: return "FieldAccess";
        case NodeKind::ArrayAccess: return "ArrayAccess";
        case NodeKind::NewObject: return "NewObject";
        case NodeKind::AnonymousBody: return "AnonymousBody";
        case NodeKind::NewArray: return "NewArray";
        case NodeKind::ArrayInitializer: return "ArrayInitializer";
        case NodeKind::NameExpr: return "NameExpr";
        case NodeKind::ThisExpr: return "ThisExpr";
        case NodeKind::SuperExpr: return "SuperExpr";
        case NodeKind::ClassLiteral: return "ClassLiteral";
        case NodeKind::Literal: return "Literal";
        case NodeKind::ParenExpr: return "ParenExpr";
    }
    return "?";
}

} // namespace kupred::java
