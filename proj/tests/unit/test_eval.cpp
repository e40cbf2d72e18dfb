#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "uiground/errors.hpp"
#include "uiground/eval.hpp"
#include "uiground/stats.hpp"

using namespace uiground;

namespace {

BenchmarkCase make_case(std::string id, Box gt, Group g = Group::Flat, std::optional<ElementClass> cls = {}) {
    BenchmarkCase c;
    c.id = std::move(id);
    c.image_ref = "x.png";
    c.command = "tap";
    c.gt_box = gt;
    c.group = g;
    c.element_class = cls;
    return c;
}

PredictionRecord click(std::string id, double x, double y) {
    PredictionRecord p;
    p.sample_id = std::move(id);
    p.point = Point{x, y};
    return p;
}

}  // namespace

TEST_CASE("significance threshold closed form") {
    CHECK(stats::significance_threshold(1200, 0.738) == doctest::Approx(0.02536).epsilon(1e-3));
    CHECK(stats::significance_threshold(3400, 0.583) == doctest::Approx(0.016905).epsilon(1e-3));
    const auto post = stats::accuracy_posterior(1200, 0.738);
    CHECK(post.alpha == 887);  // k = round(885.6) = 886 successes
    CHECK(post.beta == 315);
    CHECK_THROWS_AS(stats::accuracy_posterior(0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(stats::significance_threshold(10, 1.5), std::invalid_argument);
    CHECK(stats::significance_threshold(100000, 0.0) > 0.0);
    CHECK(stats::significance_threshold(100000, 1.0) > 0.0);
}

TEST_CASE("significance threshold agrees with numerical integration") {
    for (auto [n, p] : std::vector<std::pair<std::uint64_t, double>>{
             {1200, 0.738}, {3400, 0.583}, {50, 0.5}, {10, 0.0}, {10, 1.0}, {777, 0.123}}) {
        CHECK(stats::significance_threshold(n, p) == doctest::Approx(oracle::beta_two_sigma(n, p)).epsilon(1e-6));
    }
}

TEST_CASE("threshold shape") {
    for (std::uint64_t n = 2; n < 3000; n += 37)
        REQUIRE(stats::significance_threshold(n + 50, 0.7) < stats::significance_threshold(n, 0.7));
    for (double p = 0.0; p <= 1.0; p += 0.01)
        REQUIRE(stats::significance_threshold(1000, p) <= stats::significance_threshold(1000, 0.5) + 1e-15);
}

TEST_CASE("basic scoring") {
    std::vector<BenchmarkCase> cases{make_case("a", {0, 0, 0.5, 0.5}), make_case("b", {0, 0, 0.5, 0.5}),
                                     make_case("c", {0, 0, 0.5, 0.5})};
    std::vector<PredictionRecord> preds{click("a", 0.1, 0.1), click("b", 0.5, 0.5), click("c", 0.6, 0.1)};
    const auto r = eval::score(cases, preds);
    CHECK(r.groups.at(Group::Flat).accuracy() == doctest::Approx(2.0 / 3.0));
    CHECK(r.overall == doctest::Approx(2.0 / 3.0));
    CHECK(r.failure_ids == std::vector<std::string>{"c"});
    CHECK(r.threshold_observed == doctest::Approx(stats::significance_threshold(3, 2.0 / 3.0)));
}

TEST_CASE("box predictions click their center") {
    std::vector<BenchmarkCase> cases{make_case("a", {0.4, 0.4, 0.6, 0.6})};
    PredictionRecord p;
    p.sample_id = "a";
    p.box = Box{0.0, 0.0, 1.0, 1.0};
    CHECK(eval::score(cases, std::vector{p}).overall == 1.0);
    p.box = Box{0.0, 0.0, 0.5, 0.5};
    CHECK(eval::score(cases, std::vector{p}).overall == 0.0);
}

TEST_CASE("id errors") {
    std::vector<BenchmarkCase> cases{make_case("a", {0, 0, 1, 1}), make_case("b", {0, 0, 1, 1})};
    CHECK_THROWS_AS(eval::score(cases, std::vector{click("a", 0.5, 0.5)}), DataError);
    CHECK_THROWS_AS(eval::score(cases, std::vector{click("a", 0.5, 0.5), click("a", 0.5, 0.5), click("b", 0, 0)}),
                    DataError);
    CHECK_THROWS_AS(eval::score(cases, std::vector{click("a", 0.5, 0.5), click("b", 0, 0), click("z", 0, 0)}),
                    DataError);
    try {
        eval::score(cases, std::vector{click("a", 0.5, 0.5)});
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
    eval::ScoreOptions lenient;
    lenient.missing_as_fail = true;
    const auto r = eval::score(cases, std::vector{click("a", 0.5, 0.5)}, lenient);
    CHECK(r.overall == 0.5);
    PredictionRecord err;
    err.sample_id = "b";
    err.error = "timeout";
    CHECK(eval::score(cases, std::vector{click("a", 0.5, 0.5), err}).overall == 0.5);
}

TEST_CASE("score matches the brute-force enumerator") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> coord(0, 30);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 20;
        std::vector<BenchmarkCase> cases;
        std::vector<PredictionRecord> preds;
        std::vector<oracle::LatticePoint> lp;
        std::vector<oracle::LatticeBox> lb;
        for (int i = 0; i < n; ++i) {
            int x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
            if (x1 > x2) std::swap(x1, x2);
            if (y1 > y2) std::swap(y1, y2);
            const int px = coord(rng), py = coord(rng);
            cases.push_back(make_case("c" + std::to_string(i), {x1 / 30.0, y1 / 30.0, x2 / 30.0, y2 / 30.0}));
            preds.push_back(click("c" + std::to_string(i), px / 30.0, py / 30.0));
            lp.push_back({px, py});
            lb.push_back({x1, y1, x2, y2});
        }
        REQUIRE(eval::score(cases, preds).overall == oracle::enumerate_accuracy(lp, lb));
    }
}

TEST_CASE("score is invariant to input order") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BenchmarkCase> cases;
    std::vector<PredictionRecord> preds;
    const Group groups[] = {Group::Mobile, Group::Desktop, Group::Web};
    for (int i = 0; i < 300; ++i) {
        double x1 = u(rng), x2 = u(rng);
        if (x1 > x2) std::swap(x1, x2);
        cases.push_back(make_case("c" + std::to_string(i), {x1, 0.0, x2, 1.0}, groups[i % 3],
                                  i % 2 ? ElementClass::Icon : ElementClass::Text));
        preds.push_back(click("c" + std::to_string(i), u(rng), u(rng)));
    }
    const auto base = eval::score(cases, preds);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(cases.begin(), cases.end(), rng);
        std::shuffle(preds.begin(), preds.end(), rng);
        const auto r = eval::score(cases, preds);
        CHECK(r.overall == doctest::Approx(base.overall).epsilon(1e-15));
        CHECK(r.groups == base.groups);
        CHECK(r.cells == base.cells);
    }
}

TEST_CASE("overall is the group mean, not the pooled rate") {
    // mobile: 1 of 1, web: 1 of 4 -> group mean 0.625, pooled 0.4.
    std::vector<BenchmarkCase> cases{make_case("m", {0, 0, 1, 1}, Group::Mobile)};
    std::vector<PredictionRecord> preds{click("m", 0.5, 0.5)};
    for (int i = 0; i < 4; ++i) {
        cases.push_back(make_case("w" + std::to_string(i), {0, 0, 0.1, 0.1}, Group::Web));
        preds.push_back(i == 0 ? click("w0", 0.05, 0.05) : click("w" + std::to_string(i), 0.9, 0.9));
    }
    const auto r = eval::score(cases, preds);
    CHECK(r.overall == doctest::Approx(0.625));

    // Duplicating every web case leaves the group mean unchanged.
    auto cases2 = cases;
    auto preds2 = preds;
    for (int i = 0; i < 4; ++i) {
        auto c = cases[1 + i];
        c.id += "-dup";
        cases2.push_back(c);
        auto p = preds[1 + i];
        p.sample_id += "-dup";
        preds2.push_back(p);
    }
    const auto r2 = eval::score(cases2, preds2);
    CHECK(r2.overall == doctest::Approx(0.625));
    const double pooled = 3.0 / 9.0;
    CHECK(r2.overall != doctest::Approx(pooled));
}

TEST_CASE("screenspot row average") {
    const std::vector<double> cells{0.868, 0.62, 0.902, 0.542, 0.809, 0.563};
    CHECK(100.0 * eval::unweighted_mean(cells) == doctest::Approx(71.7).epsilon(0.0007));
    CHECK(eval::unweighted_mean(std::vector<double>{}) == 0.0);
}

TEST_CASE("report json round trip and text grid") {
    std::vector<BenchmarkCase> cases{make_case("m1", {0, 0, 1, 1}, Group::Mobile, ElementClass::Text),
                                     make_case("m2", {0, 0, 0.1, 0.1}, Group::Mobile, ElementClass::Icon),
                                     make_case("w1", {0, 0, 1, 1}, Group::Web, ElementClass::Icon)};
    std::vector<PredictionRecord> preds{click("m1", 0.5, 0.5), click("m2", 0.5, 0.5), click("w1", 0.2, 0.2)};
    const auto r = eval::score(cases, preds);
    const auto json = eval::to_json(r);
    const auto back = eval::report_from_json(json);
    CHECK(back.groups == r.groups);
    CHECK(back.cells == r.cells);
    CHECK(back.overall == r.overall);
    CHECK(back.failure_ids == r.failure_ids);
    CHECK(eval::to_json(back) == json);
    const auto text = eval::to_text(r);
    CHECK(text.find("mobile") != std::string::npos);
    CHECK(text.find("average") != std::string::npos);
    CHECK_THROWS_AS(eval::report_from_json("{}"), DataError);
}

TEST_CASE("compare runs") {
    auto report = [](std::uint64_t n, double acc) {
        eval::EvalReport r;
        r.groups[Group::Mobile] = eval::CellStats{n, static_cast<std::uint64_t>(std::llround(acc * n))};
        r.n = n;
        r.overall = eval::overall_accuracy(r.groups);
        return r;
    };
    const auto same = eval::compare_runs(report(1200, 0.7), report(1200, 0.7));
    for (const auto& c : same) {
        CHECK(c.difference == 0.0);
        CHECK(c.verdict == eval::Verdict::Inconclusive);
    }
    const auto big = eval::compare_runs(report(1200, 0.70), report(1200, 0.75));
    CHECK(big[0].verdict == eval::Verdict::Significant);
    CHECK(big[0].difference == doctest::Approx(0.05));
    const auto small = eval::compare_runs(report(1200, 0.70), report(1200, 0.71));
    CHECK(small[0].verdict == eval::Verdict::Inconclusive);
    CHECK(small.back().group == "overall");
    CHECK_THROWS_AS(eval::compare_runs(report(1200, 0.7), report(1000, 0.7)), DataError);
}

TEST_CASE("benchmark files") {
    const auto cases = read_benchmark(testing::fixture("pipeline/bench.jsonl"));
    REQUIRE(cases.size() == 6);
    CHECK(cases[0].group == Group::Mobile);
    CHECK(cases[0].element_class == ElementClass::Text);
    testing::TempDir dir;
    testing::spit(dir / "flat.jsonl", R"({"id": "o1", "image_ref": "a.png", "command": "x", "gt_box": [0, 0, 0.5, 0.5]})"
                                      "\n");
    CHECK(read_benchmark(dir / "flat.jsonl")[0].group == Group::Flat);
    testing::spit(dir / "dup.jsonl", R"({"id": "o1", "image_ref": "a.png", "command": "x", "gt_box": [0, 0, 0.5, 0.5]})"
                                     "\n"
                                     R"({"id": "o1", "image_ref": "a.png", "command": "x", "gt_box": [0, 0, 0.5, 0.5]})"
                                     "\n");
    CHECK_THROWS_AS(read_benchmark(dir / "dup.jsonl"), DataError);
    testing::spit(dir / "bad.jsonl", R"({"id": "o1", "image_ref": "a.png", "command": "x", "gt_box": [0.6, 0, 0.5, 0.5]})"
                                     "\n");
    CHECK_THROWS_AS(read_benchmark(dir / "bad.jsonl"), DataError);
    write_benchmark(dir / "out.jsonl", cases);
    CHECK(read_benchmark(dir / "out.jsonl") == cases);
}
