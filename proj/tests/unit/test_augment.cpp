#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <chrono>

#include "mock_server.hpp"
#include "support.hpp"
#include "uiground/augment.hpp"
#include "uiground/errors.hpp"

using namespace uiground;
using namespace uiground::augment;

namespace {

std::vector<Sample> samples(int n) {
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        Sample s;
        s.id = "s" + std::to_string(i);
        s.source = "fixture";
        s.image_ref = i % 2 ? "screen_a.png" : "screen_b.png";
        s.image_w = i % 2 ? 320 : 200;
        s.image_h = i % 2 ? 240 : 400;
        s.task = TaskKind{Task::AgentAction, Direction::Grounding};
        s.prompt = "click the button";
        s.target_boxes = {Box{0.1 + 0.01 * i, 0.2, 0.4, 0.5}};
        s.meta["command"] = "open settings";
        out.push_back(std::move(s));
    }
    return out;
}

AugmentJob job_for(const mock::MockServer& server, const std::string& cache_dir = {}) {
    AugmentJob job;
    job.fields = {Field::Caption};
    job.endpoint = server.url();
    job.model_name = "mock-model";
    job.cache_dir = cache_dir;
    job.image_root = testing::fixture("images");
    job.backoff_ms = 1;
    job.timeout_ms = 5000;
    return job;
}

}  // namespace

TEST_CASE("response checks") {
    AugmentJob job;
    job.max_length = 20;
    CHECK_FALSE(check_response("Opens settings.", job));
    CHECK(check_response("   ", job));
    CHECK(check_response("this text is certainly longer than twenty bytes", job));
    CHECK(check_response("I'm sorry, I can't", job)->find("refusal") == 0);
}

TEST_CASE("annotate and cache") {
    mock::MockServer server;
    testing::TempDir dir;
    auto job = job_for(server, dir / "cache");
    job.fields = {Field::Caption, Field::Purpose};
    const auto in = samples(5);

    AugmentStats cold;
    const auto first = annotate(job, in, &cold);
    REQUIRE(first.size() == 10);
    CHECK(cold.requests == 10);
    CHECK(cold.ok == 10);
    CHECK(server.request_count() == 10);
    for (const auto& r : first) {
        CHECK(r.status == Status::Ok);
        CHECK(r.text == "Opens the settings screen.");
        CHECK(r.model_name == "mock-model");
        CHECK(r.prompt_hash.size() == 16);
    }

    server.reset();
    AugmentStats warm;
    const auto second = annotate(job, in, &warm);
    CHECK(server.request_count() == 0);
    CHECK(warm.requests == 0);
    CHECK(warm.cache_hits == 10);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(second[i].cached);
        CHECK(second[i].text == first[i].text);
        CHECK(second[i].sample_id == first[i].sample_id);
    }

    // A different prompt misses the cache.
    job.prompts.instructions[Field::Caption] += " Be brief.";
    AugmentStats changed;
    annotate(job, in, &changed);
    CHECK(changed.requests == 5);
}

TEST_CASE("requests carry the screenshot and the crop") {
    mock::MockServer server;
    auto job = job_for(server);
    annotate(job, samples(1));
    const auto bodies = server.request_bodies();
    REQUIRE(bodies.size() == 1);
    CHECK(bodies[0].find("data:image/png;base64,") != std::string::npos);
    CHECK(bodies[0].find("mock-model") != std::string::npos);
    CHECK(bodies[0].find("Describe what the element looks like") != std::string::npos);
}

TEST_CASE("transient failures are retried") {
    mock::MockConfig cfg;
    cfg.fail_first = 2;
    mock::MockServer server(cfg);
    auto job = job_for(server);
    job.max_concurrency = 1;
    const auto r = annotate(job, samples(1));
    REQUIRE(r.size() == 1);
    CHECK(r[0].status == Status::Ok);
    CHECK(r[0].attempts == 3);
}

TEST_CASE("persistent failures end as errors") {
    mock::MockConfig cfg;
    cfg.always_fail = true;
    mock::MockServer server(cfg);
    testing::TempDir dir;
    auto job = job_for(server, dir / "cache");
    job.max_retries = 2;
    AugmentStats stats;
    const auto r = annotate(job, samples(2), &stats);
    for (const auto& x : r) {
        CHECK(x.status == Status::Error);
        CHECK(x.attempts == 3);
        CHECK(x.reason.find("500") != std::string::npos);
    }
    CHECK(stats.errors == 2);
    CHECK(server.request_count() == 6);
    // Errors are not cached.
    server.set_config({});
    server.reset();
    const auto again = annotate(job, samples(2));
    CHECK(server.request_count() == 2);
    CHECK(again[0].status == Status::Ok);
}

TEST_CASE("client errors are not retried") {
    mock::MockConfig cfg;
    cfg.always_fail = true;
    cfg.fail_status = 400;
    mock::MockServer server(cfg);
    const auto r = annotate(job_for(server), samples(1));
    CHECK(r[0].status == Status::Error);
    CHECK(r[0].attempts == 1);
}

TEST_CASE("refusals are rejected") {
    mock::MockConfig cfg;
    cfg.reply = "I'm sorry, I cannot help with that.";
    mock::MockServer server(cfg);
    const auto r = annotate(job_for(server), samples(2));
    for (const auto& x : r) {
        CHECK(x.status == Status::Rejected);
        CHECK(x.reason.find("refusal") != std::string::npos);
    }
}

TEST_CASE("bearer token is sent") {
    mock::MockConfig cfg;
    cfg.required_token = "s3cret";
    mock::MockServer server(cfg);
    auto job = job_for(server);
    CHECK(annotate(job, samples(1))[0].status == Status::Error);
    job.auth_token = "s3cret";
    CHECK(annotate(job, samples(1))[0].status == Status::Ok);
}

TEST_CASE("rate limit holds") {
    mock::MockServer server;
    auto job = job_for(server);
    job.rate_limit = 20.0;
    job.max_concurrency = 4;
    annotate(job, samples(21));
    auto times = server.request_times();
    REQUIRE(times.size() == 21);
    std::sort(times.begin(), times.end());
    const double span = std::chrono::duration<double>(times.back() - times.front()).count();
    const double observed = (times.size() - 1) / span;
    CHECK(observed <= 20.0 * 1.1);
}

TEST_CASE("missing image is an error record, not a crash") {
    mock::MockServer server;
    auto job = job_for(server);
    auto in = samples(1);
    in[0].image_ref = "does_not_exist.png";
    const auto r = annotate(job, in);
    CHECK(r[0].status == Status::Error);
    CHECK(server.request_count() == 0);
}

TEST_CASE("job validation") {
    AugmentJob job;
    CHECK_THROWS_AS(validate(job), ConfigError);
    job.fields = {Field::Caption};
    CHECK_THROWS_AS(validate(job), ConfigError);
    job.endpoint = "http://127.0.0.1:1";
    CHECK_NOTHROW(validate(job));
    job.max_concurrency = 0;
    CHECK_THROWS_AS(validate(job), ConfigError);
}

TEST_CASE("job files") {
    testing::TempDir dir;
    testing::spit(dir / "job.yaml", "fields: [caption, purpose]\nendpoint: http://localhost:9\nmodel: m\n"
                                    "rate_limit: 3\ncache_dir: cache\nauth_token_env: UIGROUND_TEST_TOKEN_UNSET\n");
    const auto job = load_job(dir / "job.yaml");
    CHECK(job.fields == std::vector<Field>{Field::Caption, Field::Purpose});
    CHECK(job.rate_limit == 3.0);
    CHECK(job.model_name == "m");
    CHECK(job.cache_dir == dir / "cache");
    CHECK_FALSE(job.auth_token);
    testing::spit(dir / "bad.yaml", "fields: [caption\n");
    CHECK_THROWS_AS(load_job(dir / "bad.yaml"), ConfigError);
    CHECK_NOTHROW(load_job(std::string(UIGROUND_SOURCE_DIR) + "/config/augment_job.yaml"));
}

TEST_CASE("merge only adds metadata") {
    const auto in = samples(3);
    std::vector<AugmentResult> results;
    auto add = [&](std::string id, Field f, Status st, std::string text) {
        AugmentResult r;
        r.sample_id = std::move(id);
        r.field = f;
        r.status = st;
        r.text = std::move(text);
        results.push_back(r);
    };
    add("s0", Field::Caption, Status::Ok, "first");
    add("s0", Field::Caption, Status::Ok, "second");
    add("s1", Field::Purpose, Status::Rejected, "I'm sorry");
    add("s2", Field::Expectation, Status::Error, "");
    add("zz", Field::Caption, Status::Ok, "orphan");
    MergeReport rep;
    const auto out = merge_annotations(in, results, &rep);
    REQUIRE(out.size() == in.size());
    CHECK(rep.duplicates == 1);
    CHECK(rep.unknown_ids == 1);
    CHECK(rep.rejected == 1);
    CHECK(rep.errors == 1);
    CHECK(out[0].meta.at("caption") == "second");
    CHECK_FALSE(out[1].meta.count("purpose"));
    for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(out[i].target_boxes == in[i].target_boxes);
        CHECK(out[i].target_point == in[i].target_point);
        CHECK(out[i].prompt == in[i].prompt);
        CHECK(out[i].target_text == in[i].target_text);
        CHECK(out[i].id == in[i].id);
    }
}

TEST_CASE("result files round trip") {
    testing::TempDir dir;
    AugmentResult r;
    r.sample_id = "a";
    r.field = Field::Purpose;
    r.text = "x\ny";
    r.status = Status::Rejected;
    r.reason = "refusal";
    r.attempts = 2;
    write_results(dir / "r.jsonl", {r});
    const auto back = read_results(dir / "r.jsonl");
    REQUIRE(back.size() == 1);
    CHECK(back[0].text == r.text);
    CHECK(back[0].status == Status::Rejected);
    CHECK(back[0].field == Field::Purpose);
    CHECK(back[0].attempts == 2);
}
