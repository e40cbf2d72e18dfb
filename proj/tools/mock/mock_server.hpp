#pragma once

// In-process stand-in for a chat-completion endpoint and a /predict inference
// server. Used by the tests and runnable standalone for manual checks.

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace uiground::mock {

struct MockConfig {
    /// Assistant text returned by /v1/chat/completions.
    std::string reply = "Opens the settings screen.";
    /// The first N requests fail with `fail_status`.
    int fail_first = 0;
    bool always_fail = false;
    int fail_status = 500;
    int delay_ms = 0;
    /// Raw JSON body returned by /predict; default clicks the screen center.
    std::string predict_body = R"({"point": [0.5, 0.5]})";
    /// When set, requests without "Authorization: Bearer <token>" get 401.
    std::optional<std::string> required_token;
};

class MockServer {
public:
    explicit MockServer(MockConfig cfg = {}, const std::string& host = "127.0.0.1", int port = 0);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    int port() const noexcept;
    std::string url() const;

    void set_config(MockConfig cfg);
    void reset();

    std::size_t request_count() const;
    std::vector<std::chrono::steady_clock::time_point> request_times() const;
    std::vector<std::string> request_bodies() const;

    /// Blocks until stop() (or destruction from another thread).
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace uiground::mock
