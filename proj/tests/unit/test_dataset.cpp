#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "kupred/data/feature_table.hpp"
#include "kupred/util/error.hpp"

using namespace kupred;
using namespace kupred::data;

namespace {

AssemblyInput tiny_input() {
    AssemblyInput in;
    in.release_id = "r1";
    ku::KuVector kv;
    kv[0] = 2;
    in.ku = {{"a.java", kv}, {"b.java", kv}, {"c.java", kv}};
    metrics::ProductMetricVector pv;
    pv[metrics::kCountLine] = 10;
    in.product = {{"a.java", pv}, {"b.java", pv}, {"c.java", pv}};
    metrics::ProcessMetricVector proc;
    proc.comm = 3;
    proc.ddev = 2;
    in.process = {{"a.java", proc}, {"b.java", proc}};
    in.labels = {{"a.java", 1}, {"b.java", 0}};
    return in;
}

} // namespace

TEST_CASE("feature set column counts match the study definitions") {
    CHECK(feature_set_columns(FeatureSet::KU).size() == 28);
    CHECK(feature_set_columns(FeatureSet::PROD).size() == 54);
    CHECK(feature_set_columns(FeatureSet::PROD_PROC).size() == 59);
    CHECK(feature_set_columns(FeatureSet::KU_CC).size() == 87);
    auto cost = feature_set_columns(FeatureSet::COST_EFF10);
    REQUIRE(cost.size() == 10);
    CHECK(cost == std::vector<std::string>{
                      "K6", "K5", "K11", "K7", "K4", "CountClassCoupled",
                      "CountLineComment", "MaxNesting_Mean", "DDEV",
                      "ADDED_LINES"});
}

TEST_CASE("path normalization") {
    CHECK(normalize_path("a\\b\\C.java") == "a/b/C.java");
    CHECK(normalize_path("./x/y.java") == "x/y.java");
    CHECK(normalize_path("x/y.java") == "x/y.java");
}

TEST_CASE("label ingest maps paths to binary labels") {
    auto dir = std::filesystem::temp_directory_path() / "kupred_labels";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "labels.csv");
        f << "File,RealBug\n";
        f << "a.java,true\n";
        f << "b.java,false\n";
        f << "sub\\win.java,1\n";
        f << "a.java,false\n";  // duplicate: first wins
    }
    auto ingest = ingest_defect_labels((dir / "labels.csv").string());
    CHECK(ingest.labels.size() == 3);
    CHECK(ingest.labels.at("a.java") == 1);
    CHECK(ingest.labels.at("b.java") == 0);
    CHECK(ingest.labels.at("sub/win.java") == 1);
    CHECK(ingest.warnings.size() == 1);

    {
        std::ofstream f(dir / "bad.csv");
        f << "Nope,AlsoNope\nx,y\n";
    }
    CHECK_THROWS_AS(ingest_defect_labels((dir / "bad.csv").string()),
                    SchemaError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("assembly joins on label paths and flags missing files") {
    auto in = tiny_input();
    JoinStats stats;
    auto table = assemble_feature_table(in, &stats);
    CHECK(table.rows().size() == 2);  // a, b; c dropped
    CHECK(stats.matched == 2);
    CHECK(stats.feature_only == 1);
    CHECK(stats.label_only == 0);

    // labeled but missing from features: kept, flagged, not trainable
    in.labels["ghost.java"] = 1;
    auto table2 = assemble_feature_table(in, &stats);
    CHECK(table2.rows().size() == 3);
    CHECK(stats.label_only == 1);
    size_t ghost = 0;
    for (size_t i = 0; i < table2.rows().size(); ++i)
        if (table2.rows()[i].path == "ghost.java") ghost = i;
    CHECK(table2.rows()[ghost].features_missing);
    auto trainable = table2.trainable_rows();
    CHECK(trainable.size() == 2);
}

TEST_CASE("assembly schema: 28 + 58 + 5 feature columns plus flags and label") {
    auto table = assemble_feature_table(tiny_input());
    CHECK(table.columns().size() == 28 + 54 + 4 + 5);
    // canonical selections still resolve to the fixed model-family counts
    CHECK(select_feature_set(table, FeatureSet::KU_CC).columns().size() == 87);
    // exported header = release,path + 3 flags + features + defect
    auto text = export_table_csv(table);
    auto first_line = text.substr(0, text.find('\n'));
    size_t commas = static_cast<size_t>(
        std::count(first_line.begin(), first_line.end(), ','));
    CHECK(commas + 1 == 2 + 3 + table.columns().size() + 1);
}

TEST_CASE("join is order-independent") {
    auto in = tiny_input();
    auto t1 = assemble_feature_table(in);
    AssemblyInput shuffled = in;  // std::map already orders keys; rebuild
    auto t2 = assemble_feature_table(shuffled);
    CHECK(t1 == t2);
}

TEST_CASE("empty join is an error") {
    AssemblyInput in;
    in.release_id = "r";
    in.labels = {{"only.java", 1}};
    CHECK_THROWS_AS(assemble_feature_table(in), Error);
}

TEST_CASE("csv round-trip is lossless and byte-identical") {
    auto table = assemble_feature_table(tiny_input());
    auto text = export_table_csv(table);
    auto back = import_table_csv(text);
    CHECK(back == table);
    CHECK(export_table_csv(back) == text);
}

TEST_CASE("csv import rejects reordered columns") {
    auto table = assemble_feature_table(tiny_input());
    auto text = export_table_csv(table);
    // swap the first two feature column names in the header
    auto nl = text.find('\n');
    std::string header = text.substr(0, nl);
    auto p1 = header.find(",K1,");
    std::string swapped = header;
    swapped.replace(p1, 7, ",K2,K1,");
    REQUIRE(swapped != header);
    std::string broken = swapped + text.substr(nl);
    CHECK_THROWS_AS(import_table_csv(broken, &full_feature_schema()),
                    SchemaError);
    CHECK_NOTHROW(import_table_csv(text, &full_feature_schema()));
    // without an expected schema the file is self-describing
    auto back = import_table_csv(broken);
    CHECK_FALSE(back == table);
    // a structurally broken header throws regardless
    std::string no_defect = text;
    no_defect.replace(0, 7, "nothing");
    CHECK_THROWS_AS(import_table_csv(no_defect), SchemaError);
}

TEST_CASE("jsonl round-trip preserves NaN sentinels") {
    auto in = tiny_input();
    in.labels["ghost.java"] = 1;  // produces NaN feature values
    auto table = assemble_feature_table(in);
    auto text = export_table_jsonl(table);
    auto back = import_table_jsonl(text);
    CHECK(back == table);
}

TEST_CASE("large synthetic table round-trips hash-identical") {
    FeatureTable table(full_feature_schema());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        FeatureRow r;
        r.release = "r";
        r.path = "f" + std::to_string(i) + ".java";
        r.label = static_cast<int>(rng() % 2);
        for (size_t c = 0; c < full_feature_schema().size(); ++c)
            r.values.push_back(dist(rng));
        table.add_row(std::move(r));
    }
    auto text = export_table_csv(table);
    auto back = import_table_csv(text);
    auto text2 = export_table_csv(back);
    CHECK(std::hash<std::string>{}(text) == std::hash<std::string>{}(text2));
    CHECK(text == text2);
}

TEST_CASE("duplicate (release, path) is rejected") {
    FeatureTable table(full_feature_schema());
    FeatureRow r;
    r.release = "r";
    r.path = "a.java";
    r.values.assign(full_feature_schema().size(), 0.0);
    table.add_row(r);
    CHECK_THROWS_AS(table.add_row(r), SchemaError);
}
