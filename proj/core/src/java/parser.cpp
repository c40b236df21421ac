#include "kupred/java/parser.hpp"

#include <cassert>
#include <fstream>
#include <sstream>

#include "kupred/java/token.hpp"
#include "kupred/util/error.hpp"

namespace kupred::java {

namespace {

struct ParseFail {
    std::string message;
    uint32_t line;
    uint32_t offset;
};

using NodePtr = std::unique_ptr<Node>;

NodePtr mk(NodeKind k) { return std::make_unique<Node>(k); }

bool is_primitive_name(std::string_view t) {
    return t == "boolean" || t == "byte" || t == "short" || t == "int" ||
           t == "long" || t == "char" || t == "float" || t == "double";
}

uint32_t modifier_flag(std::string_view t) {
    if (t == "static") return kFlagStatic;
    if (t == "final") return kFlagFinal;
    if (t == "abstract") return kFlagAbstract;
    if (t == "public") return kFlagPublic;
    if (t == "private") return kFlagPrivate;
    if (t == "protected") return kFlagProtected;
    if (t == "synchronized") return kFlagSynchronized;
    if (t == "native") return kFlagNative;
    if (t == "transient") return kFlagTransient;
    if (t == "volatile") return kFlagVolatile;
    if (t == "strictfp") return kFlagStrictfp;
    if (t == "default") return kFlagDefaultMethod;
    return 0;
}

class Parser {
public:
    Parser(std::string_view src, LexResult lexed, SyntaxTree& out)
        : src_(src), toks_(std::move(lexed.tokens)), tree_(out) {}

    void run() {
        auto unit = mk(NodeKind::CompilationUnit);
        unit->span = {0, static_cast<uint32_t>(src_.size()), 1,
                      toks_.empty() ? 1 : toks_.back().line};
        // package declaration (possibly annotated)
        size_t save = pos_;
        try {
            std::vector<NodePtr> leading;
            while (at_annotation()) leading.push_back(parse_annotation());
            if (at_keyword("package")) {
                size_t m = pos_;
                advance();
                auto pkg = mk(NodeKind::PackageDecl);
                pkg->text = parse_qualified_name();
                for (auto& a : leading) pkg->add(std::move(a));
                expect_op(";");
                finish(*pkg, m);
                unit->add(std::move(pkg));
            } else {
                pos_ = save;  // annotations belonged to a type decl
            }
        } catch (const ParseFail& f) {
            record(f);
            pos_ = save;
            sync_to_semi();
        }
        while (at_keyword("import")) {
            size_t m = pos_;
            try {
                advance();
                auto imp = mk(NodeKind::ImportDecl);
                if (at_keyword("static")) {
                    imp->flags |= kFlagStaticImport;
                    advance();
                }
                std::string name = expect_identifier();
                while (at_op(".")) {
                    advance();
                    if (at_op("*")) {
                        advance();
                        imp->flags |= kFlagOnDemand;
                        break;
                    }
                    name += '.';
                    name += expect_identifier();
                }
                imp->text = std::move(name);
                expect_op(";");
                finish(*imp, m);
                unit->add(std::move(imp));
            } catch (const ParseFail& f) {
                record(f);
                sync_to_semi();
            }
        }
        // type declarations
        while (!at_eof()) {
            if (at_op(";")) {
                advance();
                continue;
            }
            size_t before = pos_;
            try {
                unit->add(parse_type_decl());
            } catch (const ParseFail& f) {
                record(f);
                if (pos_ == before) advance();
                sync_top_level();
            }
        }
        bool any_type = unit->first(NodeKind::ClassDecl) ||
                        unit->first(NodeKind::InterfaceDecl) ||
                        unit->first(NodeKind::EnumDecl) ||
                        unit->first(NodeKind::AnnotationDecl);
        tree_.fatal = !any_type && !tree_.errors.empty();
        tree_.root = std::move(unit);
    }

private:
    std::string_view src_;
    std::vector<Token> toks_;
    SyntaxTree& tree_;
    size_t pos_ = 0;
    int speculation_depth_ = 0;
    std::vector<std::pair<size_t, Token>> split_undo_;

    // ---- token stream -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t k = 1) const {
        size_t i = pos_ + k;
        return toks_[i < toks_.size() ? i : toks_.size() - 1];
    }
    const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
    bool at_eof() const { return cur().kind == TokenKind::EndOfFile; }
    void advance() {
        if (!at_eof()) ++pos_;
    }

    bool at_op(std::string_view t) const {
        return cur().kind == TokenKind::Operator && cur().text == t;
    }
    bool at_keyword(std::string_view t) const {
        return cur().kind == TokenKind::Keyword && cur().text == t;
    }
    bool at_ident() const { return cur().kind == TokenKind::Identifier; }
    bool at_annotation() const {
        // `@interface` is a declaration, not an annotation use
        return at_op("@") && !(peek().kind == TokenKind::Keyword &&
                               peek().text == "interface");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseFail{msg, cur().line, cur().begin};
    }

    void record(const ParseFail& f) {
        tree_.errors.push_back({f.message, f.line, f.offset});
    }

    void expect_op(std::string_view t) {
        if (!at_op(t)) fail("expected '" + std::string(t) + "'");
        advance();
    }
    // Body-closing brace. At EOF the error is recorded, not thrown, so a
    // truncated file still yields the partial declarations parsed so far.
    void close_brace() {
        if (at_op("}")) {
            advance();
            return;
        }
        if (at_eof()) {
            record({"expected '}' before end of file", cur().line, cur().begin});
            return;
        }
        fail("expected '}'");
    }
    void expect_keyword(std::string_view t) {
        if (!at_keyword(t)) fail("expected '" + std::string(t) + "'");
        advance();
    }
    std::string expect_identifier() {
        if (!at_ident()) fail("expected identifier");
        std::string s(cur().text);
        advance();
        return s;
    }

    // Splits composite shift/relational tokens so nested generics close.
    void expect_type_close() {
        if (at_op(">")) {
            advance();
            return;
        }
        if (cur().kind == TokenKind::Operator && !cur().text.empty() &&
            cur().text[0] == '>' && cur().text.size() > 1) {
            Token orig = cur();
            if (speculation_depth_ > 0) split_undo_.push_back({pos_, orig});
            Token rest = orig;
            rest.text = orig.text.substr(1);
            rest.begin = orig.begin + 1;
            Token gt = orig;
            gt.text = orig.text.substr(0, 1);
            gt.end = orig.begin + 1;
            toks_[pos_] = rest;
            toks_.insert(toks_.begin() + static_cast<long>(pos_), gt);
            advance();
            return;
        }
        fail("expected '>'");
    }

    size_t mark() const { return pos_; }
    void finish(Node& n, size_t m) {
        const Token& b = toks_[m < toks_.size() ? m : toks_.size() - 1];
        const Token& e = prev();
        n.span = {b.begin, e.end, b.line, e.line};
    }

    struct Speculation {
        Parser& p;
        size_t saved_pos;
        size_t saved_undo;
        bool committed = false;
        explicit Speculation(Parser& parser)
            : p(parser), saved_pos(parser.pos_),
              saved_undo(parser.split_undo_.size()) {
            ++p.speculation_depth_;
        }
        void commit() { committed = true; }
        ~Speculation() {
            --p.speculation_depth_;
            if (!committed) {
                // undo token splits newest-first, then restore position
                while (p.split_undo_.size() > saved_undo) {
                    auto [idx, orig] = p.split_undo_.back();
                    p.split_undo_.pop_back();
                    p.toks_.erase(p.toks_.begin() + static_cast<long>(idx));
                    p.toks_[idx] = orig;
                }
                p.pos_ = saved_pos;
            } else if (p.speculation_depth_ == 0) {
                p.split_undo_.clear();
            }
        }
    };

    // ---- error recovery -----------------------------------------------

    void sync_to_semi() {
        int depth = 0;
        while (!at_eof()) {
            if (at_op("{")) ++depth;
            if (at_op("}")) {
                if (depth == 0) return;
                --depth;
            }
            if (at_op(";") && depth == 0) {
                advance();
                return;
            }
            advance();
        }
    }

    void sync_top_level() {
        int depth = 0;
        while (!at_eof()) {
            if (at_op("{")) ++depth;
            if (at_op("}")) {
                if (depth <= 1) {
                    advance();
                    return;
                }
                --depth;
            }
            if (depth == 0 &&
                (at_keyword("class") || at_keyword("interface") ||
                 at_keyword("enum") || at_keyword("public") ||
                 at_keyword("import")))
                return;
            advance();
        }
    }

    // ---- names, annotations, modifiers ---------------------------------

    std::string parse_qualified_name() {
        std::string name = expect_identifier();
        while (at_op(".") && peek().kind == TokenKind::Identifier) {
            advance();
            name += '.';
            name += expect_identifier();
        }
        return name;
    }

    NodePtr parse_annotation() {
        size_t m = mark();
        expect_op("@");
        auto ann = mk(NodeKind::Annotation);
        ann->text = parse_qualified_name();
        if (at_op("(")) {
            advance();
            if (!at_op(")")) {
                // either name=value pairs or a single element value
                bool pairs = at_ident() && peek().text == "=" &&
                             peek().kind == TokenKind::Operator;
                if (pairs) {
                    for (;;) {
                        auto el = mk(NodeKind::AnnotationValue);
                        size_t em = mark();
                        el->text = expect_identifier();
                        expect_op("=");
                        el->add(parse_element_value());
                        finish(*el, em);
                        ann->add(std::move(el));
                        if (at_op(",")) {
                            advance();
                            continue;
                        }
                        break;
                    }
                } else {
                    auto el = mk(NodeKind::AnnotationValue);
                    size_t em = mark();
                    el->add(parse_element_value());
                    finish(*el, em);
                    ann->add(std::move(el));
                }
            }
            expect_op(")");
        }
        finish(*ann, m);
        return ann;
    }

    NodePtr parse_element_value() {
        if (at_annotation()) return parse_annotation();
        if (at_op("{")) {
            size_t m = mark();
            advance();
            auto arr = mk(NodeKind::ArrayInitializer);
            while (!at_op("}") && !at_eof()) {
                arr->add(parse_element_value());
                if (at_op(","))
                    advance();
                else
                    break;
            }
            close_brace();
            finish(*arr, m);
            return arr;
        }
        return parse_expression(/*no_assign=*/true);
    }

    // Collects annotations and modifier keywords. `allow_default` admits the
    // interface default-method modifier.
    void parse_modifiers(Node& target, bool allow_default = false) {
        for (;;) {
            if (at_annotation()) {
                target.add(parse_annotation());
                continue;
            }
            if (cur().kind == TokenKind::Keyword) {
                std::string_view t = cur().text;
                uint32_t f = modifier_flag(t);
                if (f == kFlagDefaultMethod && !allow_default) break;
                if (f != 0) {
                    auto modn = mk(NodeKind::Modifier);
                    modn->text = std::string(t);
                    modn->span = {cur().begin, cur().end, cur().line, cur().line};
                    target.add(std::move(modn));
                    target.flags |= f;
                    advance();
                    continue;
                }
            }
            break;
        }
    }

    // ---- types ----------------------------------------------------------

    bool at_type_start() const {
        return at_ident() ||
               (cur().kind == TokenKind::Keyword &&
                (is_primitive_name(cur().text) || cur().text == "void"));
    }

    NodePtr parse_type(bool allow_void = false) {
        size_t m = mark();
        NodePtr base;
        if (cur().kind == TokenKind::Keyword &&
            (is_primitive_name(cur().text) ||
             (allow_void && cur().text == "void"))) {
            base = mk(NodeKind::PrimitiveType);
            base->text = std::string(cur().text);
            advance();
        } else if (at_ident()) {
            base = mk(NodeKind::NamedType);
            std::string name = expect_identifier();
            if (at_op("<")) parse_type_arguments(*base);
            while (at_op(".") && peek().kind == TokenKind::Identifier) {
                advance();
                name += '.';
                name += expect_identifier();
                if (at_op("<")) parse_type_arguments(*base);
            }
            base->text = std::move(name);
        } else {
            fail("expected type");
        }
        finish(*base, m);
        uint32_t dims = parse_dims();
        if (dims > 0) {
            auto arr = mk(NodeKind::ArrayType);
            arr->flags = dims;
            arr->add(std::move(base));
            finish(*arr, m);
            return arr;
        }
        return base;
    }

    uint32_t parse_dims() {
        uint32_t dims = 0;
        while (at_op("[") || at_annotation()) {
            if (at_annotation()) {  // type annotations on dims
                parse_annotation();
                continue;
            }
            if (!(peek().kind == TokenKind::Operator && peek().text == "]"))
                break;
            advance();
            expect_op("]");
            ++dims;
        }
        return dims;
    }

    void parse_type_arguments(Node& into) {
        expect_op("<");
        if (at_op(">") || (cur().kind == TokenKind::Operator &&
                           !cur().text.empty() && cur().text[0] == '>')) {
            into.flags |= kFlagDiamond;
            expect_type_close();
            return;
        }
        for (;;) {
            if (at_op("?")) {
                size_t m = mark();
                advance();
                auto wc = mk(NodeKind::WildcardType);
                if (at_keyword("extends") || at_keyword("super")) {
                    wc->text = std::string(cur().text);
                    advance();
                    wc->add(parse_type());
                }
                finish(*wc, m);
                into.add(std::move(wc));
            } else {
                into.add(parse_type());
            }
            if (at_op(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_type_close();
    }

    // ---- type declarations ----------------------------------------------

    NodePtr parse_type_decl() {
        size_t m = mark();
        auto holder = mk(NodeKind::ClassDecl);  // reparented below
        parse_modifiers(*holder);
        if (at_keyword("class")) {
            advance();
            return parse_class_rest(std::move(holder), m, NodeKind::ClassDecl);
        }
        if (at_keyword("interface")) {
            advance();
            return parse_class_rest(std::move(holder), m,
                                    NodeKind::InterfaceDecl);
        }
        if (at_keyword("enum")) {
            advance();
            return parse_enum_rest(std::move(holder), m);
        }
        if (at_op("@") && peek().kind == TokenKind::Keyword &&
            peek().text == "interface") {
            advance();
            advance();
            return parse_class_rest(std::move(holder), m,
                                    NodeKind::AnnotationDecl);
        }
        fail("expected type declaration");
    }

    NodePtr parse_class_rest(NodePtr holder, size_t m, NodeKind kind) {
        holder->kind = kind;
        holder->text = expect_identifier();
        if (at_op("<")) parse_type_parameters(*holder);
        if (at_keyword("extends")) {
            advance();
            // interfaces may extend a list
            for (;;) {
                auto sup = parse_type();
                sup->flags |= 1u << 30;  // marks an extends-clause type
                holder->add(std::move(sup));
                if (kind == NodeKind::InterfaceDecl && at_op(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        if (at_keyword("implements")) {
            advance();
            for (;;) {
                auto itf = parse_type();
                itf->flags |= 1u << 29;  // marks an implements-clause type
                holder->add(std::move(itf));
                if (at_op(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        parse_class_body(*holder, kind);
        finish(*holder, m);
        return holder;
    }

    void parse_type_parameters(Node& into) {
        expect_op("<");
        for (;;) {
            auto tp = mk(NodeKind::TypeParameter);
            size_t m = mark();
            while (at_annotation()) parse_annotation();
            tp->text = expect_identifier();
            if (at_keyword("extends")) {
                advance();
                tp->add(parse_type());
                while (at_op("&")) {
                    advance();
                    tp->add(parse_type());
                }
            }
            finish(*tp, m);
            into.add(std::move(tp));
            if (at_op(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_type_close();
    }

    NodePtr parse_enum_rest(NodePtr holder, size_t m) {
        holder->kind = NodeKind::EnumDecl;
        holder->text = expect_identifier();
        if (at_keyword("implements")) {
            advance();
            for (;;) {
                auto itf = parse_type();
                itf->flags |= 1u << 29;
                holder->add(std::move(itf));
                if (at_op(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect_op("{");
        // constants
        while (at_ident() || at_annotation()) {
            size_t cm = mark();
            auto konst = mk(NodeKind::EnumConstant);
            while (at_annotation()) konst->add(parse_annotation());
            if (!at_ident()) break;
            konst->text = expect_identifier();
            if (at_op("(")) konst->add(parse_argument_list());
            if (at_op("{")) {
                auto body = mk(NodeKind::AnonymousBody);
                size_t bm = mark();
                advance();
                while (!at_op("}") && !at_eof()) parse_member(*body, holder->text);
                close_brace();
                finish(*body, bm);
                konst->add(std::move(body));
            }
            finish(*konst, cm);
            holder->add(std::move(konst));
            if (at_op(",")) {
                advance();
                continue;
            }
            break;
        }
        if (at_op(";")) {
            advance();
            while (!at_op("}") && !at_eof()) parse_member(*holder, holder->text);
        }
        close_brace();
        finish(*holder, m);
        return holder;
    }

    void parse_class_body(Node& into, NodeKind kind) {
        expect_op("{");
        while (!at_op("}") && !at_eof())
            parse_member(into, into.text,
                         kind == NodeKind::InterfaceDecl ||
                             kind == NodeKind::AnnotationDecl);
        close_brace();
    }

    void parse_member(Node& into, const std::string& type_name,
                      bool in_interface = false) {
        size_t before = pos_;
        try {
            parse_member_inner(into, type_name, in_interface);
        } catch (const ParseFail& f) {
            record(f);
            if (pos_ == before) advance();
            sync_to_semi();
        }
    }

    void parse_member_inner(Node& into, const std::string& type_name,
                            bool in_interface) {
        if (at_op(";")) {
            advance();
            return;
        }
        size_t m = mark();
        auto holder = mk(NodeKind::MethodDecl);
        parse_modifiers(*holder, /*allow_default=*/in_interface);

        // initializer block
        if (at_op("{")) {
            holder->kind = NodeKind::InitializerBlock;
            holder->add(parse_block());
            finish(*holder, m);
            into.add(std::move(holder));
            return;
        }
        // nested type declarations
        if (at_keyword("class")) {
            advance();
            into.add(parse_class_rest(std::move(holder), m, NodeKind::ClassDecl));
            return;
        }
        if (at_keyword("interface")) {
            advance();
            into.add(parse_class_rest(std::move(holder), m,
                                      NodeKind::InterfaceDecl));
            return;
        }
        if (at_keyword("enum")) {
            advance();
            into.add(parse_enum_rest(std::move(holder), m));
            return;
        }
        if (at_op("@") && peek().kind == TokenKind::Keyword &&
            peek().text == "interface") {
            advance();
            advance();
            into.add(parse_class_rest(std::move(holder), m,
                                      NodeKind::AnnotationDecl));
            return;
        }
        // generic method
        if (at_op("<")) parse_type_parameters(*holder);
        // constructor: TypeName (
        if (at_ident() && cur().text == type_name && peek().text == "(" &&
            peek().kind == TokenKind::Operator) {
            holder->kind = NodeKind::ConstructorDecl;
            holder->text = expect_identifier();
            parse_method_rest(*holder, /*is_ctor=*/true);
            finish(*holder, m);
            into.add(std::move(holder));
            return;
        }
        // field or method: Type name ...
        auto type = parse_type(/*allow_void=*/true);
        std::string name = expect_identifier();
        if (at_op("(")) {
            holder->kind = NodeKind::MethodDecl;
            holder->text = std::move(name);
            holder->add(std::move(type));
            parse_method_rest(*holder, /*is_ctor=*/false);
            finish(*holder, m);
            into.add(std::move(holder));
            return;
        }
        // field declaration
        holder->kind = NodeKind::FieldDecl;
        holder->add(std::move(type));
        parse_declarators(*holder, std::move(name));
        expect_op(";");
        finish(*holder, m);
        into.add(std::move(holder));
    }

    void parse_declarators(Node& into, std::string first_name) {
        for (;;) {
            auto var = mk(NodeKind::VariableDeclarator);
            size_t m = pos_ == 0 ? 0 : pos_ - 1;
            var->text = std::move(first_name);
            uint32_t extra = parse_dims();
            var->flags |= (extra & 0xF) << 24;
            if (at_op("=")) {
                advance();
                var->flags |= kFlagHasInit;
                if (at_op("{"))
                    var->add(parse_array_initializer());
                else
                    var->add(parse_expression());
            }
            finish(*var, m);
            into.add(std::move(var));
            if (at_op(",")) {
                advance();
                first_name = expect_identifier();
                continue;
            }
            break;
        }
    }

    void parse_method_rest(Node& method, bool is_ctor) {
        expect_op("(");
        while (!at_op(")") && !at_eof()) {
            auto param = mk(NodeKind::Parameter);
            size_t m = mark();
            parse_modifiers(*param);
            param->add(parse_type());
            if (at_op("...")) {
                advance();
                param->flags |= kFlagVarargs;
            }
            param->text = expect_identifier();
            uint32_t extra = parse_dims();
            param->flags |= (extra & 0xF) << 24;
            finish(*param, m);
            method.add(std::move(param));
            if (at_op(",")) advance();
        }
        expect_op(")");
        parse_dims();  // legacy array return dims, ignored
        if (at_keyword("throws")) {
            advance();
            for (;;) {
                auto t = parse_type();
                t->flags |= 1u << 28;  // marks a throws-clause type
                method.add(std::move(t));
                if (at_op(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        if (at_keyword("default")) {  // annotation member default
            advance();
            method.add(parse_element_value());
        }
        if (at_op(";")) {
            advance();
            return;  // abstract/native/interface method
        }
        (void)is_ctor;
        method.add(parse_block());
    }

    // ---- statements -------------------------------------------------------

    NodePtr parse_block() {
        size_t m = mark();
        expect_op("{");
        auto block = mk(NodeKind::Block);
        while (!at_op("}") && !at_eof()) {
            size_t before = pos_;
            try {
                block->add(parse_statement());
            } catch (const ParseFail& f) {
                record(f);
                if (pos_ == before) advance();
                sync_to_semi();
            }
        }
        close_brace();
        finish(*block, m);
        return block;
    }

    NodePtr parse_statement() {
        size_t m = mark();
        if (at_op("{")) return parse_block();
        if (at_op(";")) {
            advance();
            auto s = mk(NodeKind::EmptyStmt);
            finish(*s, m);
            return s;
        }
        if (at_keyword("if")) return parse_if();
        if (at_keyword("for")) return parse_for();
        if (at_keyword("while")) return parse_while();
        if (at_keyword("do")) return parse_do();
        if (at_keyword("switch")) return parse_switch();
        if (at_keyword("try")) return parse_try();
        if (at_keyword("return")) {
            advance();
            auto s = mk(NodeKind::ReturnStmt);
            if (!at_op(";")) s->add(parse_expression());
            expect_op(";");
            finish(*s, m);
            return s;
        }
        if (at_keyword("throw")) {
            advance();
            auto s = mk(NodeKind::ThrowStmt);
            s->add(parse_expression());
            expect_op(";");
            finish(*s, m);
            return s;
        }
        if (at_keyword("break")) {
            advance();
            auto s = mk(NodeKind::BreakStmt);
            if (at_ident()) s->text = expect_identifier();
            expect_op(";");
            finish(*s, m);
            return s;
        }
        if (at_keyword("continue")) {
            advance();
            auto s = mk(NodeKind::ContinueStmt);
            if (at_ident()) s->text = expect_identifier();
            expect_op(";");
            finish(*s, m);
            return s;
        }
        if (at_keyword("synchronized")) {
            advance();
            auto s = mk(NodeKind::SynchronizedStmt);
            expect_op("(");
            s->add(parse_expression());
            expect_op(")");
            s->add(parse_block());
            finish(*s, m);
            return s;
        }
        if (at_keyword("assert")) {
            advance();
            auto s = mk(NodeKind::AssertStmt);
            s->add(parse_expression());
            if (at_op(":")) {
                advance();
                s->add(parse_expression());
            }
            expect_op(";");
            finish(*s, m);
            return s;
        }
        if (at_keyword("this") && peek().text == "(" &&
            peek().kind == TokenKind::Operator) {
            advance();
            auto s = mk(NodeKind::ThisCall);
            s->add(parse_argument_list());
            expect_op(";");
            finish(*s, m);
            return s;
        }
        if (at_keyword("super") && peek().text == "(" &&
            peek().kind == TokenKind::Operator) {
            advance();
            auto s = mk(NodeKind::SuperCall);
            s->add(parse_argument_list());
            expect_op(";");
            finish(*s, m);
            return s;
        }
        // local type declaration
        if (at_keyword("class") || at_keyword("enum") ||
            at_keyword("interface")) {
            auto s = mk(NodeKind::LocalTypeDecl);
            s->add(parse_type_decl());
            finish(*s, m);
            return s;
        }
        // `abstract/final/static class ...` or annotated local class
        {
            Speculation spec(*this);
            try {
                auto probe = mk(NodeKind::LocalTypeDecl);
                parse_modifiers(*probe);
                if (at_keyword("class") || at_keyword("enum") ||
                    at_keyword("interface")) {
                    spec.commit();
                    pos_ = spec.saved_pos;
                    auto s = mk(NodeKind::LocalTypeDecl);
                    s->add(parse_type_decl());
                    finish(*s, m);
                    return s;
                }
            } catch (const ParseFail&) {
            }
        }
        // labeled statement
        if (at_ident() && peek().kind == TokenKind::Operator &&
            peek().text == ":") {
            auto s = mk(NodeKind::LabeledStmt);
            s->text = expect_identifier();
            advance();  // ':'
            s->add(parse_statement());
            finish(*s, m);
            return s;
        }
        // local variable declaration?
        if (auto lv = try_parse_local_var()) {
            finish(*lv, m);
            return lv;
        }
        // expression statement
        auto s = mk(NodeKind::ExprStmt);
        s->add(parse_expression());
        expect_op(";");
        finish(*s, m);
        return s;
    }

    NodePtr try_parse_local_var() {
        Speculation spec(*this);
        try {
            auto decl = mk(NodeKind::LocalVarDecl);
            parse_modifiers(*decl);
            if (!at_type_start()) return nullptr;
            auto type = parse_type();
            if (!at_ident()) return nullptr;
            std::string name(cur().text);
            const Token& after = peek();
            bool looks_decl =
                after.kind == TokenKind::Operator &&
                (after.text == "=" || after.text == ";" || after.text == "," ||
                 after.text == "[");
            if (!looks_decl) return nullptr;
            advance();  // identifier
            decl->add(std::move(type));
            parse_declarators(*decl, std::move(name));
            expect_op(";");
            spec.commit();
            return decl;
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    NodePtr parse_if() {
        size_t m = mark();
        expect_keyword("if");
        auto s = mk(NodeKind::IfStmt);
        expect_op("(");
        s->add(parse_expression());
        expect_op(")");
        s->add(parse_statement());
        if (at_keyword("else")) {
            advance();
            s->add(parse_statement());
        }
        finish(*s, m);
        return s;
    }

    NodePtr parse_while() {
        size_t m = mark();
        expect_keyword("while");
        auto s = mk(NodeKind::WhileStmt);
        expect_op("(");
        s->add(parse_expression());
        expect_op(")");
        s->add(parse_statement());
        finish(*s, m);
        return s;
    }

    NodePtr parse_do() {
        size_t m = mark();
        expect_keyword("do");
        auto s = mk(NodeKind::DoStmt);
        s->add(parse_statement());
        expect_keyword("while");
        expect_op("(");
        s->add(parse_expression());
        expect_op(")");
        expect_op(";");
        finish(*s, m);
        return s;
    }

    NodePtr parse_for() {
        size_t m = mark();
        expect_keyword("for");
        expect_op("(");
        // enhanced for: [modifiers] Type ident : expr
        {
            Speculation spec(*this);
            try {
                auto param = mk(NodeKind::Parameter);
                size_t pm = mark();
                parse_modifiers(*param);
                param->add(parse_type());
                param->text = expect_identifier();
                param->flags |= (parse_dims() & 0xF) << 24;
                if (at_op(":")) {
                    advance();
                    spec.commit();
                    finish(*param, pm);
                    auto s = mk(NodeKind::EnhancedForStmt);
                    s->add(std::move(param));
                    s->add(parse_expression());
                    expect_op(")");
                    s->add(parse_statement());
                    finish(*s, m);
                    return s;
                }
            } catch (const ParseFail&) {
            }
        }
        auto s = mk(NodeKind::ForStmt);
        auto init = mk(NodeKind::ForInit);
        size_t im = mark();
        if (!at_op(";")) {
            if (auto lv = try_parse_local_var_in_for()) {
                init->add(std::move(lv));
            } else {
                init->add(parse_expression());
                while (at_op(",")) {
                    advance();
                    init->add(parse_expression());
                }
                expect_op(";");
            }
        } else {
            advance();
        }
        finish(*init, im);
        s->add(std::move(init));
        if (!at_op(";")) s->add(parse_expression());
        expect_op(";");
        auto update = mk(NodeKind::ForUpdate);
        size_t um = mark();
        if (!at_op(")")) {
            update->add(parse_expression());
            while (at_op(",")) {
                advance();
                update->add(parse_expression());
            }
        }
        finish(*update, um);
        s->add(std::move(update));
        expect_op(")");
        s->add(parse_statement());
        finish(*s, m);
        return s;
    }

    NodePtr try_parse_local_var_in_for() {
        Speculation spec(*this);
        try {
            auto decl = mk(NodeKind::LocalVarDecl);
            size_t m = mark();
            parse_modifiers(*decl);
            if (!at_type_start()) return nullptr;
            auto type = parse_type();
            if (!at_ident()) return nullptr;
            std::string name(cur().text);
            const Token& after = peek();
            bool looks_decl = after.kind == TokenKind::Operator &&
                              (after.text == "=" || after.text == ";" ||
                               after.text == "," || after.text == "[");
            if (!looks_decl) return nullptr;
            advance();
            decl->add(std::move(type));
            parse_declarators(*decl, std::move(name));
            expect_op(";");
            spec.commit();
            finish(*decl, m);
            return decl;
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    NodePtr parse_switch() {
        size_t m = mark();
        expect_keyword("switch");
        auto s = mk(NodeKind::SwitchStmt);
        expect_op("(");
        s->add(parse_expression());
        expect_op(")");
        expect_op("{");
        while (!at_op("}") && !at_eof()) {
            auto group = mk(NodeKind::SwitchGroup);
            size_t gm = mark();
            bool any_label = false;
            while (at_keyword("case") || at_keyword("default")) {
                auto label = mk(NodeKind::CaseLabel);
                size_t lm = mark();
                if (at_keyword("case")) {
                    advance();
                    label->add(parse_expression(/*no_assign=*/true));
                } else {
                    advance();
                    label->flags |= kFlagDefaultLabel;
                }
                expect_op(":");
                finish(*label, lm);
                group->add(std::move(label));
                any_label = true;
            }
            if (!any_label) fail("expected case or default label");
            while (!at_keyword("case") && !at_keyword("default") &&
                   !at_op("}") && !at_eof()) {
                size_t before = pos_;
                try {
                    group->add(parse_statement());
                } catch (const ParseFail& f) {
                    record(f);
                    if (pos_ == before) advance();
                    sync_to_semi();
                }
            }
            finish(*group, gm);
            s->add(std::move(group));
        }
        close_brace();
        finish(*s, m);
        return s;
    }

    NodePtr try_parse_typed_resource() {
        Speculation spec(*this);
        try {
            auto r = mk(NodeKind::Resource);
            parse_modifiers(*r);
            if (!at_type_start()) return nullptr;
            auto t = parse_type();
            if (!at_ident()) return nullptr;
            r->text = expect_identifier();
            if (!at_op("=")) return nullptr;
            advance();
            r->add(std::move(t));
            r->add(parse_expression());
            spec.commit();
            return r;
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    NodePtr parse_try() {
        size_t m = mark();
        expect_keyword("try");
        auto s = mk(NodeKind::TryStmt);
        if (at_op("(")) {
            advance();
            auto res = mk(NodeKind::ResourceList);
            size_t rm = mark();
            while (!at_op(")") && !at_eof()) {
                size_t rim = mark();
                auto r = try_parse_typed_resource();
                if (!r) {
                    // bare-name resource (post-SE8 form); accept leniently
                    r = mk(NodeKind::Resource);
                    r->add(parse_expression());
                }
                finish(*r, rim);
                res->add(std::move(r));
                if (at_op(";")) advance();
            }
            expect_op(")");
            finish(*res, rm);
            s->add(std::move(res));
        }
        s->add(parse_block());
        while (at_keyword("catch")) {
            auto cc = mk(NodeKind::CatchClause);
            size_t cm = mark();
            advance();
            expect_op("(");
            auto param = mk(NodeKind::Parameter);
            size_t pm = mark();
            parse_modifiers(*param);
            auto first = parse_type();
            if (at_op("|")) {
                auto uni = mk(NodeKind::UnionType);
                uni->add(std::move(first));
                while (at_op("|")) {
                    advance();
                    uni->add(parse_type());
                }
                finish(*uni, pm);
                param->add(std::move(uni));
            } else {
                param->add(std::move(first));
            }
            param->text = expect_identifier();
            finish(*param, pm);
            cc->add(std::move(param));
            expect_op(")");
            cc->add(parse_block());
            finish(*cc, cm);
            s->add(std::move(cc));
        }
        if (at_keyword("finally")) {
            auto fin = mk(NodeKind::FinallyClause);
            size_t fm = mark();
            advance();
            fin->add(parse_block());
            finish(*fin, fm);
            s->add(std::move(fin));
        }
        finish(*s, m);
        return s;
    }

    // ---- expressions ------------------------------------------------------

    NodePtr parse_argument_list() {
        size_t m = mark();
        expect_op("(");
        auto args = mk(NodeKind::ArgumentList);
        while (!at_op(")") && !at_eof()) {
            args->add(parse_expression());
            if (at_op(","))
                advance();
            else
                break;
        }
        expect_op(")");
        finish(*args, m);
        return args;
    }

    bool at_assignment_op() const {
        if (cur().kind != TokenKind::Operator) return false;
        std::string_view t = cur().text;
        return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" ||
               t == "%=" || t == "&=" || t == "|=" || t == "^=" ||
               t == "<<=" || t == ">>=" || t == ">>>=";
    }

    NodePtr parse_expression(bool no_assign = false) {
        size_t m = mark();
        auto lhs = parse_conditional();
        if (!no_assign && at_assignment_op()) {
            auto assign = mk(NodeKind::Assignment);
            assign->text = std::string(cur().text);
            advance();
            assign->add(std::move(lhs));
            assign->add(parse_expression());
            finish(*assign, m);
            return assign;
        }
        return lhs;
    }

    NodePtr parse_conditional() {
        size_t m = mark();
        auto cond = parse_binary(0);
        if (at_op("?")) {
            advance();
            auto t = mk(NodeKind::Conditional);
            t->add(std::move(cond));
            t->add(parse_expression());
            expect_op(":");
            t->add(parse_conditional_or_lambda());
            finish(*t, m);
            return t;
        }
        return cond;
    }

    NodePtr parse_conditional_or_lambda() {
        if (auto lam = try_parse_lambda()) return lam;
        // assignment is allowed on the rhs of ':' per JLS conditional grammar
        auto e = parse_conditional();
        if (at_assignment_op()) {
            size_t m = mark();
            auto assign = mk(NodeKind::Assignment);
            assign->text = std::string(cur().text);
            advance();
            assign->add(std::move(e));
            assign->add(parse_expression());
            finish(*assign, m);
            return assign;
        }
        return e;
    }

    // binary precedence levels, low to high
    static int op_level(std::string_view t) {
        if (t == "||") return 1;
        if (t == "&&") return 2;
        if (t == "|") return 3;
        if (t == "^") return 4;
        if (t == "&") return 5;
        if (t == "==" || t == "!=") return 6;
        if (t == "<" || t == ">" || t == "<=" || t == ">=") return 7;
        if (t == "<<" || t == ">>" || t == ">>>") return 8;
        if (t == "+" || t == "-") return 9;
        if (t == "*" || t == "/" || t == "%") return 10;
        return 0;
    }

    NodePtr parse_binary(int min_level) {
        size_t m = mark();
        auto lhs = parse_unary();
        for (;;) {
            if (at_keyword("instanceof") && min_level <= 7) {
                advance();
                auto io = mk(NodeKind::InstanceOfExpr);
                io->add(std::move(lhs));
                io->add(parse_type());
                finish(*io, m);
                lhs = std::move(io);
                continue;
            }
            if (cur().kind != TokenKind::Operator) break;
            int level = op_level(cur().text);
            if (level == 0 || level < min_level) break;
            // `<` could open explicit type args of a following call; Java
            // grammar resolves this at primary level, so `<` here is less-than.
            auto bin = mk(NodeKind::Binary);
            bin->text = std::string(cur().text);
            advance();
            bin->add(std::move(lhs));
            bin->add(parse_binary(level + 1));
            finish(*bin, m);
            lhs = std::move(bin);
        }
        return lhs;
    }

    NodePtr try_parse_lambda() {
        // ident -> ...
        if (at_ident() && peek().kind == TokenKind::Operator &&
            peek().text == "->") {
            size_t m = mark();
            auto lam = mk(NodeKind::LambdaExpr);
            auto params = mk(NodeKind::LambdaParams);
            auto p = mk(NodeKind::Parameter);
            p->text = expect_identifier();
            p->span = {prev().begin, prev().end, prev().line, prev().line};
            params->add(std::move(p));
            finish(*params, m);
            lam->add(std::move(params));
            advance();  // ->
            if (at_op("{"))
                lam->add(parse_block());
            else
                lam->add(parse_expression());
            finish(*lam, m);
            return lam;
        }
        // ( ... ) -> : scan for the arrow after the matching paren
        if (at_op("(")) {
            size_t i = pos_ + 1;
            int depth = 1;
            while (i < toks_.size() &&
                   toks_[i].kind != TokenKind::EndOfFile && depth > 0) {
                if (toks_[i].kind == TokenKind::Operator) {
                    if (toks_[i].text == "(") ++depth;
                    if (toks_[i].text == ")") --depth;
                }
                ++i;
            }
            if (i < toks_.size() && toks_[i].kind == TokenKind::Operator &&
                toks_[i].text == "->") {
                size_t m = mark();
                auto lam = mk(NodeKind::LambdaExpr);
                auto params = mk(NodeKind::LambdaParams);
                advance();  // (
                while (!at_op(")") && !at_eof()) {
                    auto p = mk(NodeKind::Parameter);
                    size_t pm = mark();
                    parse_modifiers(*p);
                    // typed or inferred parameter
                    bool typed = false;
                    if (at_type_start()) {
                        Speculation spec(*this);
                        try {
                            auto t = parse_type();
                            if (at_ident()) {
                                std::string nm(cur().text);
                                const Token& after = peek();
                                if (after.kind == TokenKind::Operator &&
                                    (after.text == "," || after.text == ")")) {
                                    advance();
                                    p->add(std::move(t));
                                    p->text = std::move(nm);
                                    typed = true;
                                }
                            }
                        } catch (const ParseFail&) {
                        }
                        if (typed) spec.commit();
                    }
                    if (!typed) p->text = expect_identifier();
                    finish(*p, pm);
                    params->add(std::move(p));
                    if (at_op(",")) advance();
                }
                expect_op(")");
                finish(*params, m);
                lam->add(std::move(params));
                expect_op("->");
                if (at_op("{"))
                    lam->add(parse_block());
                else
                    lam->add(parse_expression());
                finish(*lam, m);
                return lam;
            }
        }
        return nullptr;
    }

    NodePtr parse_unary() {
        size_t m = mark();
        if (auto lam = try_parse_lambda()) return lam;
        if (at_op("+") || at_op("-") || at_op("!") || at_op("~") ||
            at_op("++") || at_op("--")) {
            auto u = mk(NodeKind::Unary);
            u->text = std::string(cur().text);
            advance();
            u->add(parse_unary());
            finish(*u, m);
            return u;
        }
        // cast?
        if (at_op("(")) {
            if (auto cast = try_parse_cast()) return cast;
        }
        return parse_postfix();
    }

    NodePtr try_parse_cast() {
        Speculation spec(*this);
        try {
            size_t m = mark();
            expect_op("(");
            if (!at_type_start()) return nullptr;
            auto type = parse_type();
            if (!at_op(")")) return nullptr;
            advance();
            bool primitive = type->kind == NodeKind::PrimitiveType ||
                             (type->kind == NodeKind::ArrayType &&
                              type->child(0)->kind == NodeKind::PrimitiveType);
            // A cast must be followed by something that can start a
            // unary-not-plus-minus expression, else `(a) - b` would be a cast.
            const Token& t = cur();
            bool next_ok = false;
            switch (t.kind) {
                case TokenKind::Identifier:
                case TokenKind::IntLiteral:
                case TokenKind::LongLiteral:
                case TokenKind::FloatLiteral:
                case TokenKind::DoubleLiteral:
                case TokenKind::CharLiteral:
                case TokenKind::StringLiteral:
                case TokenKind::BoolLiteral:
                case TokenKind::NullLiteral:
                    next_ok = true;
                    break;
                case TokenKind::Keyword:
                    next_ok = t.text == "new" || t.text == "this" ||
                              t.text == "super" || is_primitive_name(t.text);
                    break;
                case TokenKind::Operator:
                    next_ok = t.text == "(" || t.text == "!" || t.text == "~";
                    if (primitive && (t.text == "+" || t.text == "-"))
                        next_ok = true;
                    break;
                default:
                    break;
            }
            if (!next_ok) return nullptr;
            auto cast = mk(NodeKind::CastExpr);
            cast->add(std::move(type));
            cast->add(parse_unary());
            finish(*cast, m);
            spec.commit();
            return cast;
        } catch (const ParseFail&) {
            return nullptr;
        }
    }

    NodePtr parse_postfix() {
        size_t m = mark();
        auto expr = parse_primary();
        for (;;) {
            if (at_op(".")) {
                // .name(...) | .name | .<T>name(...) | .new Type() | .this | .class
                advance();
                if (at_op("<")) {  // explicit type args for a call
                    auto dummy = mk(NodeKind::NamedType);
                    parse_type_arguments(*dummy);
                }
                if (at_keyword("new")) {
                    advance();
                    auto inner = mk(NodeKind::NewObject);
                    inner->add(parse_type());
                    inner->add(parse_argument_list());
                    if (at_op("{")) inner->add(parse_anonymous_body());
                    inner->add(std::move(expr));  // outer instance last
                    finish(*inner, m);
                    expr = std::move(inner);
                    continue;
                }
                if (at_keyword("this")) {
                    advance();
                    auto t = mk(NodeKind::ThisExpr);
                    t->add(std::move(expr));
                    finish(*t, m);
                    expr = std::move(t);
                    continue;
                }
                if (at_keyword("super")) {
                    advance();
                    auto s = mk(NodeKind::SuperExpr);
                    s->add(std::move(expr));
                    finish(*s, m);
                    expr = std::move(s);
                    continue;
                }
                if (at_keyword("class")) {
                    advance();
                    auto cl = mk(NodeKind::ClassLiteral);
                    cl->add(std::move(expr));
                    finish(*cl, m);
                    expr = std::move(cl);
                    continue;
                }
                std::string name = expect_identifier();
                if (at_op("(")) {
                    auto call = mk(NodeKind::MethodInvocation);
                    call->text = std::move(name);
                    call->add(std::move(expr));
                    call->add(parse_argument_list());
                    finish(*call, m);
                    expr = std::move(call);
                } else {
                    auto fa = mk(NodeKind::FieldAccess);
                    fa->text = std::move(name);
                    fa->add(std::move(expr));
                    finish(*fa, m);
                    expr = std::move(fa);
                }
                continue;
            }
            if (at_op("[")) {
                advance();
                auto aa = mk(NodeKind::ArrayAccess);
                aa->add(std::move(expr));
                aa->add(parse_expression());
                expect_op("]");
                finish(*aa, m);
                expr = std::move(aa);
                continue;
            }
            if (at_op("::")) {
                advance();
                auto mr = mk(NodeKind::MethodRef);
                if (at_keyword("new")) {
                    advance();
                    mr->text = "new";
                } else {
                    mr->text = expect_identifier();
                }
                mr->add(std::move(expr));
                finish(*mr, m);
                expr = std::move(mr);
                continue;
            }
            if (at_op("++") || at_op("--")) {
                auto pf = mk(NodeKind::Postfix);
                pf->text = std::string(cur().text);
                advance();
                pf->add(std::move(expr));
                finish(*pf, m);
                expr = std::move(pf);
                continue;
            }
            break;
        }
        return expr;
    }

    NodePtr parse_anonymous_body() {
        size_t m = mark();
        expect_op("{");
        auto body = mk(NodeKind::AnonymousBody);
        while (!at_op("}") && !at_eof()) parse_member(*body, "");
        close_brace();
        finish(*body, m);
        return body;
    }

    NodePtr parse_primary() {
        size_t m = mark();
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::IntLiteral:
            case TokenKind::LongLiteral:
            case TokenKind::FloatLiteral:
            case TokenKind::DoubleLiteral:
            case TokenKind::CharLiteral:
            case TokenKind::StringLiteral:
            case TokenKind::BoolLiteral:
            case TokenKind::NullLiteral: {
                auto lit = mk(NodeKind::Literal);
                lit->text = std::string(t.text);
                switch (t.kind) {
                    case TokenKind::IntLiteral: lit->literal = LiteralKind::Int; break;
                    case TokenKind::LongLiteral: lit->literal = LiteralKind::Long; break;
                    case TokenKind::FloatLiteral: lit->literal = LiteralKind::Float; break;
                    case TokenKind::DoubleLiteral: lit->literal = LiteralKind::Double; break;
                    case TokenKind::CharLiteral: lit->literal = LiteralKind::Char; break;
                    case TokenKind::StringLiteral: lit->literal = LiteralKind::String; break;
                    case TokenKind::BoolLiteral: lit->literal = LiteralKind::Bool; break;
                    default: lit->literal = LiteralKind::Null; break;
                }
                advance();
                finish(*lit, m);
                return lit;
            }
            default:
                break;
        }
        if (at_op("(")) {
            advance();
            auto inner = parse_expression();
            expect_op(")");
            auto paren = mk(NodeKind::ParenExpr);
            paren->add(std::move(inner));
            finish(*paren, m);
            return paren;
        }
        if (at_keyword("new")) return parse_new();
        if (at_keyword("this")) {
            advance();
            auto e = mk(NodeKind::ThisExpr);
            finish(*e, m);
            return e;
        }
        if (at_keyword("super")) {
            advance();
            auto e = mk(NodeKind::SuperExpr);
            finish(*e, m);
            return e;
        }
        if (at_keyword("void") && peek().text == "." &&
            peek().kind == TokenKind::Operator) {
            advance();  // void . class
            advance();
            expect_keyword("class");
            auto cl = mk(NodeKind::ClassLiteral);
            finish(*cl, m);
            return cl;
        }
        if (cur().kind == TokenKind::Keyword && is_primitive_name(cur().text)) {
            // int.class, int[].class; also primitive type in method refs
            auto type = parse_type();
            if (at_op(".") && peek().kind == TokenKind::Keyword &&
                peek().text == "class") {
                advance();
                advance();
                auto cl = mk(NodeKind::ClassLiteral);
                cl->add(std::move(type));
                finish(*cl, m);
                return cl;
            }
            fail("unexpected primitive type in expression");
        }
        if (at_ident()) {
            // Name, possibly qualified; a trailing segment with '(' becomes a
            // method invocation with the prefix as qualifier.
            std::string name = expect_identifier();
            if (at_op("(")) {
                auto call = mk(NodeKind::MethodInvocation);
                call->text = std::move(name);
                call->add(parse_argument_list());
                finish(*call, m);
                return call;
            }
            auto nameExpr = mk(NodeKind::NameExpr);
            nameExpr->text = std::move(name);
            finish(*nameExpr, m);
            // generic type prefix of a class literal: List<String>.class is
            // illegal in Java, so plain name handling suffices here.
            return nameExpr;
        }
        fail("unexpected token '" + std::string(t.text) + "'");
    }

    NodePtr parse_new() {
        size_t m = mark();
        expect_keyword("new");
        if (at_op("<")) {  // explicit ctor type args
            auto dummy = mk(NodeKind::NamedType);
            parse_type_arguments(*dummy);
        }
        // primitive or named array creation
        if (cur().kind == TokenKind::Keyword && is_primitive_name(cur().text)) {
            auto elem = mk(NodeKind::PrimitiveType);
            elem->text = std::string(cur().text);
            elem->span = {cur().begin, cur().end, cur().line, cur().line};
            advance();
            return parse_new_array(std::move(elem), m);
        }
        auto type = mk(NodeKind::NamedType);
        size_t tm = mark();
        std::string name = expect_identifier();
        if (at_op("<")) parse_type_arguments(*type);
        while (at_op(".") && peek().kind == TokenKind::Identifier) {
            advance();
            name += '.';
            name += expect_identifier();
            if (at_op("<")) parse_type_arguments(*type);
        }
        type->text = std::move(name);
        finish(*type, tm);
        if (at_op("[")) return parse_new_array(std::move(type), m);
        auto obj = mk(NodeKind::NewObject);
        obj->add(std::move(type));
        obj->add(parse_argument_list());
        if (at_op("{")) obj->add(parse_anonymous_body());
        finish(*obj, m);
        return obj;
    }

    NodePtr parse_new_array(NodePtr elem, size_t m) {
        auto arr = mk(NodeKind::NewArray);
        arr->add(std::move(elem));
        uint32_t dims = 0;
        bool any_sized = false;
        while (at_op("[")) {
            advance();
            ++dims;
            if (!at_op("]")) {
                arr->add(parse_expression());
                any_sized = true;
            }
            expect_op("]");
        }
        arr->flags = dims;
        if (!any_sized || at_op("{")) {
            if (at_op("{")) arr->add(parse_array_initializer());
        }
        finish(*arr, m);
        return arr;
    }

    NodePtr parse_array_initializer() {
        size_t m = mark();
        expect_op("{");
        auto init = mk(NodeKind::ArrayInitializer);
        while (!at_op("}") && !at_eof()) {
            if (at_op("{"))
                init->add(parse_array_initializer());
            else
                init->add(parse_expression());
            if (at_op(","))
                advance();
            else
                break;
        }
        close_brace();
        finish(*init, m);
        return init;
    }
};

bool valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = s[i];
        size_t extra = 0;
        if (c < 0x80) extra = 0;
        else if ((c >> 5) == 0x6) extra = 1;
        else if ((c >> 4) == 0xE) extra = 2;
        else if ((c >> 3) == 0x1E) extra = 3;
        else return false;
        if (i + extra >= s.size() && extra > 0) return false;
        for (size_t k = 1; k <= extra; ++k)
            if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
        i += extra + 1;
    }
    return true;
}

} // namespace

SyntaxTree parse_java(const SourceUnit& unit) {
    if (!valid_utf8(unit.text))
        throw IoError("not valid UTF-8: " + unit.path);
    SyntaxTree tree;
    tree.path = unit.path;
    tree.release_id = unit.release_id;
    tree.byte_count = static_cast<uint32_t>(unit.text.size());

    LexResult lexed = lex(unit.text);
    tree.line_count = lexed.line_count;
    tree.semicolon_count = lexed.semicolon_count;
    for (const auto& c : lexed.comments)
        tree.comment_lines.push_back({c.line_begin, c.line_end});
    for (const auto& e : lexed.errors)
        tree.errors.push_back({e.message, e.line, e.offset});

    Parser parser(unit.text, std::move(lexed), tree);
    parser.run();
    return tree;
}

SourceUnit read_source(const std::string& fs_path, const std::string& rel_path,
                       const std::string& release_id) {
    std::ifstream in(fs_path, std::ios::binary);
    if (!in) throw IoError("cannot read " + fs_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return SourceUnit{rel_path, release_id, ss.str()};
}

} // namespace kupred::java
