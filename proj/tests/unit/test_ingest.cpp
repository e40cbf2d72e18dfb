#include <doctest.h>

#include <stdexcept>

#include <set>

#include "support.hpp"
#include "uiground/contamination.hpp"
#include "uiground/errors.hpp"
#include "uiground/ingest.hpp"
#include "uiground/mixture.hpp"

using namespace uiground;

namespace {

ingest::SourceSpec waveui_fixture() {
    ingest::SourceSpec s;
    s.name = "waveui_fixture";
    s.format = ingest::SourceFormat::WaveUI;
    s.path = testing::fixture("pipeline/waveui.jsonl");
    return s;
}

}  // namespace

TEST_CASE("waveui converter") {
    ingest::ConvertReport rep;
    const auto samples = ingest::convert_all(waveui_fixture(), &rep);
    CHECK(rep.rows_in == 8);
    CHECK(rep.samples_out == 6);
    CHECK(rep.skipped.at("missing bbox") == 1);
    CHECK(rep.skipped.at("bbox outside image") == 1);
    REQUIRE(samples.size() == 6);
    const auto& s = samples[0];
    CHECK(s.task == TaskKind{Task::AgentAction, Direction::Grounding});
    CHECK(s.target_boxes[0] == Box{0.1, 0.1, 0.3, 0.2});
    CHECK(s.prompt.find("open the settings") != std::string::npos);
    CHECK(s.meta.at("caption") == "gear icon");
    CHECK(s.meta.at("purpose") == "opens the settings page");
    for (const auto& x : samples) CHECK(validate(x).empty());
}

TEST_CASE("converter with requested annotation tasks and QA") {
    testing::TempDir dir;
    testing::spit(dir / "qa.jsonl",
                  R"({"image": "q.png", "image_w": 10, "image_h": 20, "question": "What time is it?", "answer": "3pm"})"
                  "\n"
                  R"({"image": "q2.png", "image_w": 10, "image_h": 20, "question": "", "answer": "x"})"
                  "\n");
    ingest::SourceSpec qa;
    qa.name = "qa";
    qa.format = ingest::SourceFormat::ScreenQA;
    qa.path = dir / "qa.jsonl";
    ingest::ConvertReport rep;
    const auto out = ingest::convert_all(qa, &rep);
    REQUIRE(out.size() == 1);
    CHECK(out[0].task.kind == Task::QuestionAnswering);
    CHECK(out[0].target_text == std::optional<std::string>("3pm"));
    CHECK(rep.skipped_total() == 1);

    auto src = waveui_fixture();
    src.tasks = {ingest::parse_task_entry("element_purpose"), ingest::parse_task_entry("element_caption:grounding")};
    const auto multi = ingest::convert_all(src);
    std::set<std::pair<Task, Direction>> kinds;
    for (const auto& s : multi) kinds.insert({s.task.kind, s.task.direction});
    CHECK(kinds.count({Task::ElementPurpose, Direction::Annotation}) == 1);
    CHECK(kinds.count({Task::ElementCaption, Direction::Grounding}) == 1);
    CHECK(kinds.size() == 2);
}

TEST_CASE("field map overrides and box conventions") {
    testing::TempDir dir;
    testing::spit(dir / "g.jsonl", R"({"meta": {"img": "x.png", "w": 200, "h": 100}, "el": {"xywh": [20, 10, 40, 30]}, "cmd": "tap"})"
                                   "\n");
    ingest::SourceSpec s;
    s.name = "custom";
    s.format = ingest::SourceFormat::AndroidControl;
    s.path = dir / "g.jsonl";
    ingest::FieldMap m;
    m.image = "meta.img";
    m.width = "meta.w";
    m.height = "meta.h";
    m.box = "el.xywh";
    m.box_convention = ingest::BoxConvention::PixelXYWH;
    m.command = "cmd";
    s.fields = m;
    const auto out = ingest::convert_all(s);
    REQUIRE(out.size() == 1);
    CHECK(out[0].target_boxes[0].x1 == doctest::Approx(0.1));
    CHECK(out[0].target_boxes[0].y1 == doctest::Approx(0.1));
    CHECK(out[0].target_boxes[0].x2 == doctest::Approx(0.3));
    CHECK(out[0].target_boxes[0].y2 == doctest::Approx(0.4));
}

TEST_CASE("object detection rows read their hierarchy dump") {
    testing::TempDir dir;
    testing::spit(dir / "xml/notes.xml", testing::slurp(testing::fixture("android/notes.xml")));
    testing::spit(dir / "amex.jsonl",
                  R"({"image": "a.png", "image_w": 1000, "image_h": 2000, "xml": "xml/notes.xml"})"
                  "\n");
    ingest::SourceSpec s;
    s.name = "amex_od";
    s.format = ingest::SourceFormat::Amex;
    s.path = dir / "amex.jsonl";
    s.tasks = {ingest::parse_task_entry("object_detection")};
    const auto out = ingest::convert_all(s);
    REQUIRE(out.size() == 1);
    CHECK(out[0].target_boxes.size() == 4);
}

TEST_CASE("format and task names") {
    CHECK(ingest::parse_format("waveui") == ingest::SourceFormat::WaveUI);
    CHECK_THROWS_AS(ingest::parse_format("webui"), ConfigError);
    CHECK_THROWS_AS(ingest::parse_task_entry("element_caption:sideways"), ConfigError);
    CHECK(ingest::parse_task_entry("agent_action").direction == Direction::Grounding);
    CHECK(ingest::parse_task_entry("element_caption").direction == Direction::Annotation);
}

TEST_CASE("contamination filter") {
    const auto index = contamination::load_index({testing::fixture("pipeline/bench.jsonl")});
    CHECK(index.image_count() == 6);
    CHECK(index.matches_annotation("  SEARCH mail ", Box{0.2, 0.8, 0.4, 0.9}));
    CHECK_FALSE(index.matches_annotation("search mail", Box{0.5, 0.5, 0.7, 0.6}));
    CHECK(contamination::normalize_text("  A \t b\nC ") == "a b c");

    auto samples = ingest::convert_all(waveui_fixture());
    contamination::FileImageHasher hasher;
    contamination::FilterReport rep;
    auto kept = contamination::filter(samples, index, std::ref(hasher), &rep);
    CHECK(rep.dropped_image == 1);
    CHECK(rep.dropped_annotation == 1);
    CHECK(kept.size() == 4);

    // Idempotent: a second pass drops nothing.
    contamination::FilterReport again;
    auto twice = contamination::filter(kept, index, std::ref(hasher), &again);
    CHECK(again.dropped() == 0);
    CHECK(twice == kept);
}

TEST_CASE("select_rows") {
    SUBCASE("count exact hits round(fraction * n)") {
        for (std::uint64_t n : {0ull, 1ull, 7ull, 100ull, 98500ull}) {
            for (double f : {0.1, 0.3, 0.5, 0.999}) {
                const auto rows = mixture::select_rows(n, f, 1, "k", mixture::SamplingMode::CountExact);
                const double want = f * static_cast<double>(n);
                CHECK(std::abs(static_cast<double>(rows.size()) - want) <= 1.0);
                CHECK(std::is_sorted(rows.begin(), rows.end()));
                CHECK(std::set<std::uint64_t>(rows.begin(), rows.end()).size() == rows.size());
            }
        }
    }
    SUBCASE("deterministic per seed and key") {
        const auto a = mixture::select_rows(1000, 0.3, 5, "amex", mixture::SamplingMode::CountExact);
        CHECK(a == mixture::select_rows(1000, 0.3, 5, "amex", mixture::SamplingMode::CountExact));
        CHECK(a != mixture::select_rows(1000, 0.3, 6, "amex", mixture::SamplingMode::CountExact));
        CHECK(a != mixture::select_rows(1000, 0.3, 5, "other", mixture::SamplingMode::CountExact));
    }
    SUBCASE("hash mode is approximately right") {
        const auto rows = mixture::select_rows(20000, 0.25, 3, "k", mixture::SamplingMode::Hash);
        const double sd = std::sqrt(20000 * 0.25 * 0.75);
        CHECK(std::abs(static_cast<double>(rows.size()) - 5000.0) < 4 * sd);
    }
    SUBCASE("bad fractions") {
        CHECK_THROWS_AS(mixture::select_rows(10, 0.0, 1, "k", mixture::SamplingMode::CountExact), ConfigError);
        CHECK_THROWS_AS(mixture::select_rows(10, 1.5, 1, "k", mixture::SamplingMode::CountExact), ConfigError);
    }
}

TEST_CASE("planned mixture reproduces the table totals") {
    const auto m = mixture::load_manifest(testing::fixture("training_mixture.yaml"));
    const auto r = mixture::build_mixture(m);
    CHECK(r.realized.total_rows == 845350);
    CHECK(r.samples.empty());
    std::uint64_t sum = 0;
    for (const auto& s : r.realized.sources) sum += s.rows_kept;
    CHECK(sum == 845350);
    CHECK(mixture::to_yaml(r.realized) == mixture::to_yaml(mixture::build_mixture(m).realized));
}

TEST_CASE("manifest validation") {
    testing::TempDir dir;
    auto load = [&](const std::string& body) {
        testing::spit(dir / "m.yaml", body);
        return mixture::load_manifest(dir / "m.yaml");
    };
    CHECK_THROWS_AS(load("sources:\n  - {name: a, format: waveui, rows: 10, fraction: 0}\n"), ConfigError);
    CHECK_THROWS_AS(load("sources:\n  - {name: a, format: waveui, rows: 10, fraction: 120%}\n"), ConfigError);
    CHECK_THROWS_AS(load("sources:\n  - {name: a, format: nope, rows: 10}\n"), ConfigError);
    CHECK_THROWS_AS(load("sources:\n  - {name: a, format: waveui, rows: 10}\n  - {name: a, format: waveui, rows: 5}\n"),
                    ConfigError);
    CHECK_THROWS_AS(load("sources:\n  - {name: a, format: waveui}\n"), ConfigError);
    CHECK_THROWS_AS(load("sources:\n  - {name: a, format: waveui, rows: 4, align_with: b}\n"), ConfigError);
    CHECK_THROWS_AS(load("sources: [\n"), ConfigError);
    CHECK(load("sources:\n  - {name: a, format: waveui, rows: 10, fraction: 30%}\n").sources[0].fraction ==
          doctest::Approx(0.3));
}

TEST_CASE("aligned sources keep the same rows") {
    testing::TempDir dir;
    testing::spit(dir / "m.yaml", R"(seed: 4
sources:
  - {name: amex_functionality, format: amex, rows: 1000, fraction: 0.5}
  - {name: amex_purpose, format: amex, rows: 1000, fraction: 0.5, align_with: amex_functionality}
)");
    const auto m = mixture::load_manifest(dir / "m.yaml");
    CHECK(m.sources[1].align_with == std::optional<std::string>("amex_functionality"));
    CHECK(mixture::select_rows(1000, 0.5, 4, "amex_functionality", m.mode) ==
          mixture::select_rows(1000, 0.5, 4, *m.sources[1].align_with, m.mode));
}

TEST_CASE("mixture over real rows is deterministic and ordered") {
    mixture::MixtureManifest m;
    m.seed = 11;
    m.benchmarks = {testing::fixture("pipeline/bench.jsonl")};
    auto a = waveui_fixture();
    a.fraction = 0.5;
    auto b = waveui_fixture();
    b.name = "another";
    m.sources = {a, b};
    mixture::BuildOptions opts;
    opts.jobs = 2;
    const auto r1 = mixture::build_mixture(m, opts);
    const auto r2 = mixture::build_mixture(m, opts);
    CHECK(r1.samples == r2.samples);
    CHECK(mixture::to_yaml(r1.realized) == mixture::to_yaml(r2.realized));
    REQUIRE(r1.realized.sources.size() == 2);
    CHECK(r1.realized.sources[0].name == "another");
    CHECK(r1.realized.sources[0].rows_kept == 4);
    CHECK(r1.realized.sources[1].rows_kept == 2);
    CHECK(r1.realized.sources[1].rows_dropped_contamination == 2);
    CHECK(r1.samples.size() == 6);
    CHECK(r1.samples.front().source == "another");
}
