#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>

#include "kupred/java/parser.hpp"
#include "kupred/java/token.hpp"
#include "kupred/java/type_origin.hpp"
#include "kupred/util/error.hpp"

using namespace kupred::java;

namespace {

SyntaxTree parse(const std::string& text, const std::string& path = "A.java") {
    return parse_java(SourceUnit{path, "r1", text});
}

size_t count_kind(const SyntaxTree& t, NodeKind k) {
    return collect(*t.root, {k}).size();
}

} // namespace

TEST_CASE("lexer basics") {
    auto lexed = lex("int x = 1; // y\n/* z */ String s = \"a,b\";\n");
    CHECK(lexed.errors.empty());
    CHECK(lexed.comments.size() == 2);
    CHECK(lexed.semicolon_count == 2);
    CHECK(lexed.line_count == 2);
}

TEST_CASE("lexer splits operators greedily") {
    auto lexed = lex("a >>>= b >>> c >> d >= e > f");
    std::vector<std::string> ops;
    for (auto& t : lexed.tokens)
        if (t.kind == TokenKind::Operator) ops.emplace_back(t.text);
    CHECK(ops == std::vector<std::string>{">>>=", ">>>", ">>", ">=", ">"});
}

TEST_CASE("minimal class yields one class declaration") {
    auto t = parse("class A {}");
    REQUIRE(t.root != nullptr);
    CHECK(!t.fatal);
    CHECK(t.errors.empty());
    CHECK(count_kind(t, NodeKind::ClassDecl) == 1);
}

TEST_CASE("generic class declaration carries a type parameter") {
    auto t = parse("class Box<T> { T v; }");
    CHECK(t.errors.empty());
    auto classes = collect(*t.root, {NodeKind::ClassDecl});
    REQUIRE(classes.size() == 1);
    CHECK(classes[0]->first(NodeKind::TypeParameter) != nullptr);
    CHECK(count_kind(t, NodeKind::FieldDecl) == 1);
}

TEST_CASE("missing closing brace yields partial tree plus error") {
    auto t = parse("class A { void m() { int x = 1; \n");
    REQUIRE(t.root != nullptr);
    CHECK(!t.fatal);  // the class declaration was recovered
    CHECK(t.errors.size() >= 1);
    CHECK(count_kind(t, NodeKind::ClassDecl) == 1);
    CHECK(count_kind(t, NodeKind::MethodDecl) == 1);
    CHECK(count_kind(t, NodeKind::LocalVarDecl) == 1);
}

TEST_CASE("statements and expressions parse with correct shapes") {
    const char* src = R"(
package p;
import java.util.List;
import java.util.*;
public class A extends B implements C, D {
    static int s = 3;
    private final List<String> xs = new ArrayList<>();
    A() { this(1); }
    A(int v) { super(); }
    public <T extends Comparable<T>> T max(List<T> l) throws Exception {
        for (int i = 0, j = 1; i < 10; i++, j--) { if (i > j) break; else continue; }
        for (T t : l) { while (t != null) { t = null; } }
        do { s += 1; } while (s < 5);
        switch (s) { case 1: s = 2; break; default: s = 0; }
        try (java.io.StringWriter w = new java.io.StringWriter()) {
            throw new Exception("x");
        } catch (RuntimeException | Error e) {
            assert s > 0 : "bad";
        } finally { s = 1; }
        Object o = (Comparable<T>) null;
        int[][] grid = new int[2][];
        int[] one = {1, 2, 3};
        Runnable r = () -> System.out.println("hi");
        java.util.function.Function<Integer, Integer> f = x -> x + 1;
        Runnable m = A::noop;
        boolean b = o instanceof Comparable ? true : false;
        long mask = 1L << 3 >>> 1;
        return l.isEmpty() ? null : l.get(0);
    }
    static void noop() {}
    class Inner {}
    static class Nested {}
    enum E { ONE, TWO { void x() {} }; void x() {} }
    interface I { default int d() { return 1; } }
    @interface Ann { int value() default 3; }
}
)";
    auto t = parse(src);
    for (auto& e : t.errors)
        MESSAGE(e.message, " at line ", e.line);
    CHECK(t.errors.empty());
    CHECK(count_kind(t, NodeKind::ClassDecl) == 3);  // A, Inner, Nested
    CHECK(count_kind(t, NodeKind::EnumDecl) == 1);
    CHECK(count_kind(t, NodeKind::InterfaceDecl) == 1);
    CHECK(count_kind(t, NodeKind::AnnotationDecl) == 1);
    CHECK(count_kind(t, NodeKind::ForStmt) == 1);
    CHECK(count_kind(t, NodeKind::EnhancedForStmt) == 1);
    CHECK(count_kind(t, NodeKind::WhileStmt) == 1);
    CHECK(count_kind(t, NodeKind::DoStmt) == 1);
    CHECK(count_kind(t, NodeKind::SwitchStmt) == 1);
    CHECK(count_kind(t, NodeKind::TryStmt) == 1);
    CHECK(count_kind(t, NodeKind::CatchClause) == 1);
    CHECK(count_kind(t, NodeKind::FinallyClause) == 1);
    CHECK(count_kind(t, NodeKind::UnionType) == 1);
    CHECK(count_kind(t, NodeKind::LambdaExpr) == 2);
    CHECK(count_kind(t, NodeKind::MethodRef) == 1);
    CHECK(count_kind(t, NodeKind::CastExpr) == 1);
    CHECK(count_kind(t, NodeKind::ThisCall) == 1);
    CHECK(count_kind(t, NodeKind::SuperCall) == 1);
    CHECK(count_kind(t, NodeKind::AssertStmt) == 1);
    CHECK(count_kind(t, NodeKind::BreakStmt) == 2);  // loop + switch
    CHECK(count_kind(t, NodeKind::ContinueStmt) == 1);
    CHECK(count_kind(t, NodeKind::InstanceOfExpr) == 1);
    CHECK(count_kind(t, NodeKind::Conditional) == 2);
}

TEST_CASE("parsing is deterministic") {
    const std::string src = "class A { void m() { int x = 1 + 2; } }";
    auto t1 = parse(src);
    auto t2 = parse(src);
    std::string d1, d2;
    walk(*t1.root, [&](const Node& n) {
        d1 += node_kind_name(n.kind);
        d1 += ':' + std::to_string(n.span.begin) + '-' +
              std::to_string(n.span.end) + ';';
        return true;
    });
    walk(*t2.root, [&](const Node& n) {
        d2 += node_kind_name(n.kind);
        d2 += ':' + std::to_string(n.span.begin) + '-' +
              std::to_string(n.span.end) + ';';
        return true;
    });
    CHECK(d1 == d2);
}

TEST_CASE("child spans are contained in parent spans") {
    const char* src = R"(
class A {
    int f(int a) { if (a > 0) { return a * 2; } return -a; }
}
)";
    auto t = parse(src);
    REQUIRE(t.errors.empty());
    bool ok = true;
    walk(*t.root, [&](const Node& n) {
        for (const auto& c : n.children) {
            if (c->span.begin < n.span.begin || c->span.end > n.span.end)
                ok = false;
        }
        return true;
    });
    CHECK(ok);
}

TEST_CASE("top-level declaration spans plus gaps reconstruct the file") {
    const std::string src =
        "package p;\n\nclass A { int x; }\n\nclass B { }\n// tail\n";
    auto t = parse(src);
    REQUIRE(t.errors.empty());
    std::vector<std::pair<uint32_t, uint32_t>> spans;
    for (const auto& c : t.root->children)
        spans.push_back({c->span.begin, c->span.end});
    std::sort(spans.begin(), spans.end());
    uint32_t covered = 0;
    uint32_t cursor = 0;
    uint32_t gaps = 0;
    for (auto [b, e] : spans) {
        REQUIRE(b >= cursor);  // non-overlapping, ordered
        gaps += b - cursor;
        covered += e - b;
        cursor = e;
    }
    gaps += static_cast<uint32_t>(src.size()) - cursor;
    CHECK(covered + gaps == src.size());
}

TEST_CASE("a UTF-8 byte-order mark is tolerated") {
    std::string src = "\xEF\xBB\xBF";
    src += "class Bom { int x = 1; }\n";
    auto t = parse(src);
    CHECK(t.errors.empty());
    CHECK(count_kind(t, NodeKind::ClassDecl) == 1);
    CHECK(count_kind(t, NodeKind::VariableDeclarator) == 1);
}

TEST_CASE("torture file: hairy but legal constructs parse cleanly") {
    const char* src = R"(
package torture;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;
import java.util.function.Function;

public final class Torture<T extends Comparable<T> & Cloneable> {
    private static final Map<String, List<Map<Integer, String>>> DEEP =
        new HashMap<String, List<Map<Integer, String>>>();
    private final int[] counts = new int[] {1, 2, 3};
    private final int[][] grid = {{1, 2}, {3, 4}};
    private long bits = 0b1010_1010L;
    private int hex = 0xFF_EC;
    private double d = 1_000.5e-3;
    private char tab = '\t';
    private String esc = "a\"b\\c\n";

    interface Maker {
        Torture<?> make();
        default int rank() { return 1; }
        static int zero() { return 0; }
    }

    enum Mode {
        FAST(1), SLOW(2) { @Override int weight() { return 9; } };
        private final int w;
        Mode(int w) { this.w = w; }
        int weight() { return w; }
    }

    <U extends T> U pick(List<? extends U> from, U fallback) {
        outer:
        for (int i = 0, n = from.size(); i < n; i++) {
            for (U u : from) {
                if (u == null) continue outer;
                if (u.compareTo(fallback) > 0) return u;
            }
            break outer;
        }
        return fallback;
    }

    Runnable mk(final int base) {
        return new Runnable() {
            public void run() {
                int v = base > 0 ? base : base < -5 ? -base : 0;
                synchronized (Torture.this) { bits ^= v; }
            }
        };
    }

    static Function<String, Integer> parser() { return Integer::parseInt; }
    static Function<String, StringBuilder> builder() { return StringBuilder::new; }

    void casts(Object o) {
        List<String> xs = (List<String>) o;
        int n = ((Number) o).intValue();
        byte b = (byte) (n >>> 3);
        boolean is = o instanceof Map<?, ?> || o instanceof List;
        assert is || xs != null && n >= 0 : "unreachable " + n;
    }
}
)";
    auto t = parse(src);
    for (auto& e : t.errors) MESSAGE(e.message, " at line ", e.line);
    CHECK(t.errors.empty());
    CHECK(!t.fatal);
    CHECK(count_kind(t, NodeKind::EnumDecl) == 1);
    CHECK(count_kind(t, NodeKind::InterfaceDecl) == 1);
    CHECK(count_kind(t, NodeKind::MethodRef) == 2);
    CHECK(count_kind(t, NodeKind::LabeledStmt) == 1);
    CHECK(count_kind(t, NodeKind::AnonymousBody) == 2);  // enum body + Runnable
    CHECK(count_kind(t, NodeKind::SynchronizedStmt) == 1);
    CHECK(count_kind(t, NodeKind::InstanceOfExpr) == 2);
}

TEST_CASE("mutated inputs never crash the frontend") {
    const std::string base =
        "class M { int f(int a) { for (int i = 0; i < a; i++) { if (i > 2) "
        "{ a += i; } } return a; } }";
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 300; ++trial) {
        std::string mutated = base;
        int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            size_t pos = rng() % mutated.size();
            switch (rng() % 3) {
                case 0: mutated.erase(pos, 1); break;
                case 1: mutated.insert(pos, 1, "{}()<>;,.+-*/&|!?:"[rng() % 18]); break;
                default: mutated[pos] = static_cast<char>(' ' + rng() % 94); break;
            }
        }
        try {
            auto t = parse(mutated, "Mut.java");
            (void)t;
        } catch (const kupred::IoError&) {
            // non-UTF-8 mutations are reported as unreadable: acceptable
        }
    }
    CHECK(true);  // survival is the property
}

TEST_CASE("non-utf8 input is rejected as unreadable") {
    std::string bad = "class A {}";
    bad += static_cast<char>(0xFF);
    CHECK_THROWS_AS(parse(bad), kupred::IoError);
}

TEST_CASE("type origins: declared, platform, external, unknown") {
    auto t1 = parse("package com.acme;\npublic class Foo {}", "Foo.java");
    auto t2 = parse(
        "package com.acme.app;\n"
        "import com.acme.Foo;\n"
        "import java.util.List;\n"
        "import org.apache.commons.lang.StringUtils;\n"
        "class App { Foo f; List<Foo> l; StringUtils s; Mystery m; }",
        "App.java");
    auto table = TypeOriginTable::build({&t1, &t2});
    auto fi = TypeOriginTable::imports_of(t2);
    CHECK(table.resolve("Foo", fi) == TypeOrigin::ProjectLocal);
    CHECK(table.resolve("List", fi) == TypeOrigin::JavaPlatform);
    CHECK(table.resolve("StringUtils", fi) == TypeOrigin::External);
    CHECK(table.resolve("Mystery", fi) == TypeOrigin::Unknown);
    CHECK(table.resolve("java.util.Map", fi) == TypeOrigin::JavaPlatform);
    CHECK(table.entries().at("com.acme.Foo") == TypeOrigin::ProjectLocal);
}

TEST_CASE("type origins: wildcard imports resolve against declarations") {
    auto t1 = parse("package com.acme;\nclass Helper {}", "Helper.java");
    auto t2 = parse(
        "package com.acme.app;\n"
        "import com.acme.*;\n"
        "import java.util.*;\n"
        "class App { Helper h; ArrayList a; Nope n; }",
        "App.java");
    auto table = TypeOriginTable::build({&t1, &t2});
    auto fi = TypeOriginTable::imports_of(t2);
    CHECK(table.resolve("Helper", fi) == TypeOrigin::ProjectLocal);
    // one non-platform wildcard makes undeclared names unresolvable
    CHECK(table.resolve("ArrayList", fi) == TypeOrigin::Unknown);
    CHECK(table.resolve("Nope", fi) == TypeOrigin::Unknown);

    auto t3 = parse("import java.util.*;\nclass B { ArrayList a; }", "B.java");
    auto table2 = TypeOriginTable::build({&t3});
    auto fi3 = TypeOriginTable::imports_of(t3);
    CHECK(table2.resolve("ArrayList", fi3) == TypeOrigin::JavaPlatform);
}

TEST_CASE("classify is order-independent") {
    auto t1 = parse("package a;\nclass X {}", "X.java");
    auto t2 = parse("package a;\nimport java.io.File;\nclass Y { X x; }",
                    "Y.java");
    auto ta = TypeOriginTable::build({&t1, &t2});
    auto tb = TypeOriginTable::build({&t2, &t1});
    CHECK(ta.entries() == tb.entries());
}
