#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "kupred/explain/tree_shap.hpp"
#include "kupred/java/parser.hpp"
#include "kupred/ku/detector.hpp"
#include "kupred/learn/evaluate.hpp"
#include "kupred/metrics/product.hpp"

using namespace kupred;

namespace {

// A mid-sized synthetic compilation unit with a spread of constructs.
std::string synth_java(int methods) {
    std::ostringstream src;
    src << "import java.util.ArrayList;\nimport java.util.List;\n"
        << "public class Bench {\n"
        << "    private List<String> names = new ArrayList<String>();\n";
    for (int m = 0; m < methods; ++m) {
        src << "    int run" << m << "(int n, String s) {\n"
            << "        int acc = 0;\n"
            << "        for (int i = 0; i < n; i++) {\n"
            << "            if (i % 2 == 0) { acc += i; } else { acc -= i; }\n"
            << "            while (acc > 100) { acc /= 2; }\n"
            << "        }\n"
            << "        try {\n"
            << "            acc += s.substring(1).length();\n"
            << "        } catch (RuntimeException e) {\n"
            << "            acc = -1;\n"
            << "        }\n"
            << "        switch (acc) { case 0: return 0; default: break; }\n"
            << "        return acc > 0 ? acc : -acc;\n"
            << "    }\n";
    }
    src << "}\n";
    return src.str();
}

struct TrainFixture {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<std::string> cols;

    explicit TrainFixture(int n, int d) {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> g;
        X.resize(n, d);
        y.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = g(rng);
            y[static_cast<size_t>(i)] = X(i, 0) + 0.3 * X(i, 1) > 0;
        }
        for (int j = 0; j < d; ++j) cols.push_back("f" + std::to_string(j));
    }
};

void BM_parse(benchmark::State& state) {
    auto text = synth_java(static_cast<int>(state.range(0)));
    java::SourceUnit unit{"Bench.java", "r", text};
    for (auto _ : state) {
        auto tree = java::parse_java(unit);
        benchmark::DoNotOptimize(tree.root);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_parse)->Arg(4)->Arg(32);

void BM_detect_kus(benchmark::State& state) {
    java::SourceUnit unit{"Bench.java", "r",
                          synth_java(static_cast<int>(state.range(0)))};
    auto tree = java::parse_java(unit);
    auto origins = java::TypeOriginTable::build({&tree});
    for (auto _ : state) {
        auto det = ku::detect_kus(tree, origins);
        benchmark::DoNotOptimize(det.vector);
    }
}
BENCHMARK(BM_detect_kus)->Arg(4)->Arg(32);

void BM_product_metrics(benchmark::State& state) {
    java::SourceUnit unit{"Bench.java", "r",
                          synth_java(static_cast<int>(state.range(0)))};
    auto tree = java::parse_java(unit);
    auto origins = java::TypeOriginTable::build({&tree});
    for (auto _ : state) {
        auto v = metrics::compute_product_metrics(tree, unit.text, &origins);
        benchmark::DoNotOptimize(v.values);
    }
}
BENCHMARK(BM_product_metrics)->Arg(4)->Arg(32);

void BM_rf_train(benchmark::State& state) {
    TrainFixture fx(static_cast<int>(state.range(0)), 30);
    learn::ModelParams params;
    params.n_estimators = 50;
    for (auto _ : state) {
        auto model = learn::Model::train(learn::ClassifierKind::RF, fx.X, fx.y,
                                         fx.cols, params, 3);
        benchmark::DoNotOptimize(model.fingerprint());
    }
}
BENCHMARK(BM_rf_train)->Arg(200)->Arg(800);

void BM_tree_shap(benchmark::State& state) {
    TrainFixture fx(400, 30);
    auto model = learn::Model::train(learn::ClassifierKind::RF, fx.X, fx.y,
                                     fx.cols, {}, 3);
    for (auto _ : state) {
        auto phi = explain::shap_row(model, fx.X.row(0));
        benchmark::DoNotOptimize(phi);
    }
}
BENCHMARK(BM_tree_shap);

} // namespace

BENCHMARK_MAIN();
