#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "uiground/eval.hpp"
#include "uiground/hierarchy.hpp"
#include "uiground/loc_codec.hpp"
#include "uiground/mixture.hpp"

using namespace uiground;

static void BM_QuantizeBox(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    const Box b{u(rng), u(rng), 0.5 + u(rng), 0.5 + u(rng)};
    for (auto _ : state) benchmark::DoNotOptimize(loc::encode_box(b));
}
BENCHMARK(BM_QuantizeBox);

static void BM_ParseLocations(benchmark::State& state) {
    std::string text = "click";
    for (int i = 0; i < state.range(0); ++i) text += "<loc_" + std::to_string(i % 1000) + "> and ";
    for (auto _ : state) benchmark::DoNotOptimize(loc::parse_locations(text));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseLocations)->Arg(4)->Arg(256);

static void BM_Score(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BenchmarkCase> cases;
    std::vector<PredictionRecord> preds;
    const Group groups[] = {Group::Mobile, Group::Desktop, Group::Web};
    for (int i = 0; i < state.range(0); ++i) {
        BenchmarkCase c;
        c.id = "c" + std::to_string(i);
        c.image_ref = "x.png";
        c.command = "tap";
        const double x = u(rng) * 0.9, y = u(rng) * 0.9;
        c.gt_box = {x, y, x + 0.1, y + 0.1};
        c.group = groups[i % 3];
        c.element_class = i % 2 ? ElementClass::Icon : ElementClass::Text;
        cases.push_back(c);
        PredictionRecord p;
        p.sample_id = c.id;
        p.point = Point{u(rng), u(rng)};
        preds.push_back(p);
    }
    for (auto _ : state) benchmark::DoNotOptimize(eval::score(cases, preds));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Score)->Arg(1200)->Arg(3400);

static void BM_SelectRows(benchmark::State& state) {
    const auto mode = state.range(1) ? mixture::SamplingMode::Hash : mixture::SamplingMode::CountExact;
    for (auto _ : state)
        benchmark::DoNotOptimize(mixture::select_rows(static_cast<std::uint64_t>(state.range(0)), 0.3, 7, "src", mode));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectRows)->Args({100000, 0})->Args({100000, 1});

static void BM_ParseHierarchy(benchmark::State& state) {
    std::string xml = "<?xml version=\"1.0\"?>\n<hierarchy rotation=\"0\">\n";
    for (int i = 0; i < state.range(0); ++i) {
        const int y = (i * 37) % 1900;
        xml += "  <node class=\"android.widget.Button\" clickable=\"" + std::string(i % 3 ? "true" : "false") +
               "\" bounds=\"[10," + std::to_string(y) + "][500," + std::to_string(y + 80) + "]\" text=\"item " +
               std::to_string(i) + "\"/>\n";
    }
    xml += "</hierarchy>\n";
    for (auto _ : state) {
        auto tree = hierarchy::parse_hierarchy(xml);
        benchmark::DoNotOptimize(hierarchy::extract_clickables(tree.root, 1080, 2000));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * xml.size()));
}
BENCHMARK(BM_ParseHierarchy)->Arg(50)->Arg(1000);
BENCHMARK_MAIN();
