#include <doctest.h>

#include <map>
#include <string>

#include "kupred/java/parser.hpp"
#include "kupred/ku/detector.hpp"
#include "kupred/util/csv.hpp"
#include "kupred/util/error.hpp"

#include <filesystem>
#include <set>

using namespace kupred;
using namespace kupred::ku;

namespace {

FileDetection detect_one(const std::string& text) {
    java::SourceUnit unit{"T.java", "r", text};
    auto tree = java::parse_java(unit);
    auto origins = java::TypeOriginTable::build({&tree});
    return detect_kus(tree, origins);
}

int64_t ku_count(const FileDetection& d, int k) {
    return d.vector[static_cast<size_t>(k - 1)];
}

std::map<std::string, int> by_capability(const FileDetection& d) {
    std::map<std::string, int> m;
    for (const auto& h : d.trace.hits) ++m[h.rule->id];
    return m;
}

} // namespace

TEST_CASE("rule registry covers all 28 KUs with the documented counts") {
    const auto& rules = all_rules();
    std::map<int, int> per_ku;
    for (const auto& r : rules) {
        CHECK(r.ku >= 1);
        CHECK(r.ku <= 28);
        ++per_ku[r.ku];
    }
    CHECK(per_ku.size() == 28);
    CHECK(per_ku[4] == 5);   // while, for, do-while, break, continue
    CHECK(per_ku[5] == 8);
    CHECK(per_ku[6] == 7);
    CHECK(per_ku[11] == 7);  // six catalogued plus assertions
    CHECK(per_ku[28] == 1);
    for (const auto& [k, n] : per_ku) CHECK(capability_count(k) == n);
}

TEST_CASE("generic class declaration increments K8 by one") {
    auto d = detect_one("class Box<T> {}");
    CHECK(ku_count(d, 8) == 1);
    CHECK(by_capability(d)["K8.C1"] == 1);
}

TEST_CASE("empty and package-only files have all-zero vectors") {
    auto d1 = detect_one("");
    CHECK(d1.vector.total() == 0);
    auto d2 = detect_one("package com.example;\n");
    CHECK(d2.vector.total() == 0);
}

TEST_CASE("try-catch, loop and collection instantiation are detected") {
    const char* src = R"(
import java.util.ArrayList;
import java.util.List;
class T {
    void m() {
        List<String> xs = new ArrayList<String>();
        try {
            for (int i = 0; i < 3; i++) { xs.add("x"); }
        } catch (RuntimeException e) {
        }
    }
}
)";
    auto d = detect_one(src);
    CHECK(ku_count(d, 11) >= 1);  // try-catch
    CHECK(ku_count(d, 4) >= 1);   // for loop
    CHECK(ku_count(d, 8) >= 1);   // ArrayList
    auto caps = by_capability(d);
    CHECK(caps["K11.C1"] == 1);
    CHECK(caps["K11.C2"] == 1);
    CHECK(caps["K11.C6"] == 1);  // RuntimeException catch type
    CHECK(caps["K4.C2"] == 1);
    CHECK(caps["K8.C2"] == 1);   // the `new ArrayList<String>` type reference
    CHECK(caps["K8.C1"] == 1);   // generic instantiation
}

TEST_CASE("keyword capabilities are AST matches, not text matches") {
    // 'final' and 'synchronized' in comments/strings must not count
    const char* src = R"(
class T {
    // final synchronized for while
    String s = "final synchronized";
}
)";
    auto d = detect_one(src);
    auto caps = by_capability(d);
    CHECK(caps["K7.C2"] == 0);
    CHECK(caps["K16.C2"] == 0);
    CHECK(ku_count(d, 4) == 0);

    auto d2 = detect_one("class T { final int x = 1; synchronized void m() {} }");
    auto caps2 = by_capability(d2);
    CHECK(caps2["K7.C2"] == 1);
    CHECK(caps2["K16.C2"] == 1);
}

TEST_CASE("API capabilities respect type origins") {
    // project-local ArrayList must not count for K8.C2
    java::SourceUnit u1{"my/ArrayList.java", "r",
                        "package my;\npublic class ArrayList {}"};
    java::SourceUnit u2{"my/Use.java", "r",
                        "package my;\nclass Use { ArrayList a = new ArrayList(); }"};
    auto t1 = java::parse_java(u1);
    auto t2 = java::parse_java(u2);
    auto origins = java::TypeOriginTable::build({&t1, &t2});
    auto d = detect_kus(t2, origins);
    CHECK(by_capability(d)["K8.C2"] == 0);

    // external import must not count either
    java::SourceUnit u3{"my/Ext.java", "r",
                        "package my;\nimport acme.collections.TreeMap;\n"
                        "class Ext { TreeMap t; }"};
    auto t3 = java::parse_java(u3);
    auto origins3 = java::TypeOriginTable::build({&t3});
    CHECK(by_capability(detect_kus(t3, origins3))["K8.C2"] == 0);

    // platform import counts; unresolved distinctive name counts in recall mode
    java::SourceUnit u4{"my/Plat.java", "r",
                        "import java.util.TreeMap;\nclass Plat { TreeMap t; }"};
    auto t4 = java::parse_java(u4);
    auto origins4 = java::TypeOriginTable::build({&t4});
    CHECK(by_capability(detect_kus(t4, origins4))["K8.C2"] == 1);

    java::SourceUnit u5{"my/Bare.java", "r", "class Bare { TreeMap t; }"};
    auto t5 = java::parse_java(u5);
    auto origins5 = java::TypeOriginTable::build({&t5});
    CHECK(by_capability(detect_kus(t5, origins5))["K8.C2"] == 1);
    DetectorConfig strict;
    strict.match_unresolved_api_names = false;
    CHECK(by_capability(detect_kus(t5, origins5, strict))["K8.C2"] == 0);
}

TEST_CASE("guarded generic names require a qualified confirmation") {
    // bare 'Session' could be anything: no K21 hit without an import
    auto d = detect_one("class T { Session s; }");
    CHECK(ku_count(d, 21) == 0);
    // with the javax.jms import it counts
    auto d2 = detect_one("import javax.jms.Session;\nclass T { Session s; }");
    CHECK(by_capability(d2)["K21.C1"] == 1);
}

TEST_CASE("inheritance capabilities") {
    const char* src = R"(
class Base { void run(int x) {} }
class Derived extends Base {
    @Override void run(int x) {}
    void other(Base b) {}
}
class Uses {
    Base b = new Derived();
    void m() { new Uses().other(new Derived()); }
}
abstract class A { abstract void x(); }
interface I { void y(); }
class Impl implements I { public void y() {} }
)";
    auto d = detect_one(src);
    auto caps = by_capability(d);
    CHECK(caps["K6.C1"] == 1);  // Base b = new Derived()
    CHECK(caps["K6.C2"] == 1);  // other(new Derived())
    CHECK(caps["K6.C3"] == 2);  // @Override; Impl.y() matches I.y() by signature
    CHECK(caps["K6.C4"] == 2);  // abstract class + abstract method
    CHECK(caps["K6.C5"] == 2);  // interface decl + implements clause
}

TEST_CASE("override detected by signature without annotation") {
    const char* src = R"(
class Base { void run(int x) {} }
class Derived extends Base { void run(int x) {} }
)";
    auto d = detect_one(src);
    CHECK(by_capability(d)["K6.C3"] == 1);
}

TEST_CASE("monotonicity: appending code never decreases any KU count") {
    std::string base = "class T { void m() { int x = 1; } }";
    std::string more = base +
        "\nclass U { void f() { for (int i = 0; i < 2; i++) {} } }";
    auto d1 = detect_one(base);
    auto d2 = detect_one(more);
    for (size_t k = 0; k < kKuCount; ++k) CHECK(d2.vector[k] >= d1.vector[k]);
}

TEST_CASE("locality: concatenating top-level classes sums the vectors") {
    std::string a = "class A { void m() { if (1 > 0) { int x = 2; } } }";
    std::string b = "class B { int[] xs = new int[3]; }";
    auto da = detect_one(a);
    auto db = detect_one(b);
    auto dab = detect_one(a + "\n" + b);
    for (size_t k = 0; k < kKuCount; ++k)
        CHECK(dab.vector[k] == da.vector[k] + db.vector[k]);
}

TEST_CASE("trace regrouping reproduces the vector") {
    const char* src = R"(
class T {
    void m(String s) {
        if (s.equals("x")) { int n = s.length(); n++; }
        while (true) { break; }
    }
}
)";
    auto d = detect_one(src);
    CHECK(d.trace.to_vector() == d.vector);
    CHECK(d.vector.total() > 0);
}

TEST_CASE("detect_release flags unparseable files with zero vectors") {
    std::vector<java::SourceUnit> units = {
        {"a/Good.java", "r1", "class Good { int x = 1; }"},
        {"a/Bad.java", "r1", "%%% not java at all %%%"},
        {"a/Also.java", "r1", "class Also {}"},
    };
    auto det = detect_release(units);
    REQUIRE(det.rows.size() == 3);
    std::map<std::string, const FileKuRow*> by_path;
    for (const auto& r : det.rows) by_path[r.path] = &r;
    CHECK(by_path["a/Bad.java"]->parse_failed);
    CHECK(by_path["a/Bad.java"]->vector.total() == 0);
    CHECK_FALSE(by_path["a/Good.java"]->parse_failed);
    CHECK(by_path["a/Good.java"]->vector.total() > 0);
}

TEST_CASE("detect_release determinism: identical files, identical vectors") {
    std::vector<java::SourceUnit> units = {
        {"x/One.java", "r1", "class One { void m() { int a = 1; } }"},
        {"y/Two.java", "r1", "class One { void m() { int a = 1; } }"},
    };
    auto det = detect_release(units);
    CHECK(det.rows[0].vector == det.rows[1].vector);
}

TEST_CASE("detect_release rejects an empty unit list") {
    CHECK_THROWS_AS(detect_release({}), Error);
}

TEST_CASE("golden corpus matches the hand-annotated count matrix exactly") {
    namespace fs = std::filesystem;
    const std::string dir = std::string(KUPRED_TEST_DATA_DIR) + "/ku_corpus";
    std::vector<java::SourceUnit> units;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".java")
            units.push_back(java::read_source(e.path().string(),
                                              e.path().filename().string(),
                                              "golden"));
    }
    REQUIRE(units.size() == 56);
    auto det = detect_release(units);

    auto expected = csv::read_file(dir + "/annotations.csv");
    REQUIRE(expected.size() == 57);  // header + 56 rows
    std::map<std::string, const FileKuRow*> by_path;
    for (const auto& r : det.rows) by_path[r.path] = &r;
    for (size_t i = 1; i < expected.size(); ++i) {
        const auto& row = expected[i];
        const std::string& path = row[0];
        REQUIRE(by_path.count(path));
        const FileKuRow* got = by_path[path];
        CHECK_FALSE(got->parse_failed);
        for (int k = 1; k <= 28; ++k) {
            int64_t want = std::stoll(row[static_cast<size_t>(k)]);
            INFO(path, " K", k);
            CHECK(got->vector[static_cast<size_t>(k - 1)] == want);
        }
    }
}

TEST_CASE("release csv has the fixed header contract") {
    std::vector<java::SourceUnit> units = {
        {"a/F.java", "r9", "class F {}"},
    };
    auto det = detect_release(units);
    auto text = release_csv(det);
    CHECK(text.rfind("release,path,parse_failed,K1,K2,", 0) == 0);
    CHECK(text.find("\nr9,a/F.java,0,0,") != std::string::npos);
    CHECK(text.find(",K28\n") != std::string::npos);
    auto jtext = release_json(det);
    CHECK(jtext.find("\"K28\"") != std::string::npos);
    CHECK(jtext.find("\"a/F.java\"") != std::string::npos);
}

TEST_CASE("node enumeration is pre-order and yields each match once") {
    auto unit = java::SourceUnit{"E.java", "r", R"(
class A { void m() { f(); g(); h(); f(); g(); f(); x.y(); } }
class B {}
)"};
    auto tree = java::parse_java(unit);
    auto classes = collect(*tree.root, {java::NodeKind::ClassDecl});
    REQUIRE(classes.size() == 2);
    CHECK(classes[0]->text == "A");  // pre-order: A before B
    CHECK(classes[1]->text == "B");
    auto calls = collect(*tree.root, {java::NodeKind::MethodInvocation});
    CHECK(calls.size() == 7);
    std::set<const java::Node*> unique(calls.begin(), calls.end());
    CHECK(unique.size() == 7);
}
