#include <doctest.h>

#include <stdexcept>

#include <random>

#include "support.hpp"
#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"
#include "uiground/sample.hpp"

using namespace uiground;

namespace {

Sample agent_sample() {
    Sample s;
    s.id = make_sample_id("src", "row1");
    s.source = "src";
    s.image_ref = "a.png";
    s.image_w = 100;
    s.image_h = 50;
    s.task = TaskKind{Task::AgentAction, Direction::Grounding};
    s.prompt = "click \"ok\"";
    s.target_text = "<loc_100><loc_200><loc_300><loc_400>";
    s.target_boxes = {Box{0.1, 0.2, 0.3, 0.4}};
    s.meta = {{"caption", "OK button"}, {"command", "click ok"}};
    return s;
}

}  // namespace

TEST_CASE("sha256 and base64 known answers") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
}

TEST_CASE("stable_hash is deterministic and seed dependent") {
    CHECK(stable_hash(1, "key") == stable_hash(1, "key"));
    CHECK(stable_hash(1, "key") != stable_hash(2, "key"));
    CHECK(stable_hash(1, "key", 0) != stable_hash(1, "key", 1));
    for (int i = 0; i < 1000; ++i) {
        const double u = unit_interval(stable_hash(7, "k", static_cast<std::uint64_t>(i)));
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("task direction rules") {
    CHECK(TaskKind{Task::AgentAction, Direction::Grounding}.valid());
    CHECK_FALSE(TaskKind{Task::AgentAction, Direction::Annotation}.valid());
    CHECK_FALSE(TaskKind{Task::ObjectDetection, Direction::Annotation}.valid());
    CHECK(TaskKind{Task::QuestionAnswering, Direction::NotApplicable}.valid());
    CHECK_FALSE(TaskKind{Task::QuestionAnswering, Direction::Grounding}.valid());
    for (auto t : {Task::ElementCaption, Task::ElementPurpose, Task::ElementExpectation, Task::ElementLocation}) {
        CHECK(is_dual_capable(t));
        CHECK(TaskKind{t, Direction::Grounding}.valid());
        CHECK(TaskKind{t, Direction::Annotation}.valid());
        CHECK_FALSE(TaskKind{t, Direction::NotApplicable}.valid());
    }
    CHECK(parse_task("element_caption") == Task::ElementCaption);
    CHECK_FALSE(parse_task("caption"));
    CHECK(to_string(Direction::NotApplicable) == "not_applicable");
}

TEST_CASE("sample validation") {
    auto s = agent_sample();
    CHECK(validate(s).empty());
    s.target_boxes.clear();
    CHECK_FALSE(validate(s).empty());
    s = agent_sample();
    s.task.direction = Direction::Annotation;
    CHECK_FALSE(validate(s).empty());
    s = agent_sample();
    s.target_boxes[0] = Box{0.5, 0, 0.4, 1};
    CHECK_FALSE(validate(s).empty());
    s = agent_sample();
    s.image_w = 0;
    CHECK_FALSE(validate(s).empty());
}

TEST_CASE("ids are content derived") {
    CHECK(make_sample_id("a", "b") == make_sample_id("a", "b"));
    CHECK(make_sample_id("a", "b") != make_sample_id("a", "c"));
    CHECK(make_sample_id("ab", "c") != make_sample_id("a", "bc"));
    CHECK(make_sample_id("a", "b").size() == 20);
}

TEST_CASE("jsonl field order and round trip") {
    const auto s = agent_sample();
    const auto line = to_jsonl(s);
    const std::vector<std::string> order{"\"id\"",     "\"source\"",      "\"image_ref\"",    "\"image_w\"",
                                         "\"image_h\"", "\"task\"",        "\"direction\"",    "\"prompt\"",
                                         "\"target_text\"", "\"target_boxes\"", "\"target_point\"", "\"meta\""};
    std::size_t pos = 0;
    for (const auto& key : order) {
        const auto at = line.find(key, pos);
        REQUIRE_MESSAGE(at != std::string::npos, key);
        pos = at;
    }
    CHECK(sample_from_jsonl(line) == s);

    testing::TempDir dir;
    write_samples(dir / "s.jsonl", {s, s});
    const auto back = read_samples(dir / "s.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[1] == s);
}

TEST_CASE("random samples survive a round trip") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        auto s = agent_sample();
        double x1 = u(rng), x2 = u(rng);
        if (x1 > x2) std::swap(x1, x2);
        s.target_boxes = {Box{x1, 0.0, x2, 1.0}};
        if (i % 2) s.target_point = Point{u(rng), u(rng)};
        s.prompt = "unicode ✓ \t tab " + std::to_string(i);
        REQUIRE(sample_from_jsonl(to_jsonl(s)) == s);
    }
}

TEST_CASE("malformed sample lines") {
    CHECK_THROWS_AS(sample_from_jsonl("{"), ParseError);
    CHECK_THROWS_AS(sample_from_jsonl("[]"), DataError);
    CHECK_THROWS_AS(sample_from_jsonl(R"({"id": "x"})"), DataError);
    testing::TempDir dir;
    testing::spit(dir / "bad.jsonl", to_jsonl(agent_sample()) + "\n{broken\n");
    try {
        read_samples(dir / "bad.jsonl");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("prediction records") {
    PredictionRecord p;
    p.sample_id = "c1";
    p.point = Point{0.2, 0.3};
    CHECK(p.valid());
    CHECK(p.click() == Point{0.2, 0.3});

    PredictionRecord b;
    b.sample_id = "c2";
    b.box = Box{0.2, 0.2, 0.4, 0.6};
    CHECK(b.valid());
    CHECK(b.click()->x == doctest::Approx(0.3));
    CHECK(b.click()->y == doctest::Approx(0.4));

    PredictionRecord both = p;
    both.box = b.box;
    CHECK_FALSE(both.valid());

    PredictionRecord err;
    err.sample_id = "c3";
    err.error = "timeout";
    CHECK(err.valid());
    CHECK_FALSE(err.click());

    for (const auto& r : {p, b, err}) CHECK(prediction_from_jsonl(to_jsonl(r)) == r);
    CHECK(prediction_from_jsonl(R"({"id": "c9", "point": [0.1, 0.2]})").sample_id == "c9");
    CHECK_THROWS_AS(prediction_from_jsonl(R"({"sample_id": "c9"})"), DataError);
    CHECK_THROWS_AS(prediction_from_jsonl(R"({"sample_id": "c9", "point": [0.1, 0.2], "box": [0, 0, 1, 1]})"),
                    DataError);
}
