#include "mock_server.hpp"

#include <httplib.h>

#include <mutex>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <thread>

namespace uiground::mock {

struct MockServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::string host;

    mutable std::mutex mu;
    MockConfig cfg;
    std::size_t count = 0;
    std::vector<std::chrono::steady_clock::time_point> times;
    std::vector<std::string> bodies;

    // Records the request; returns the config snapshot and the request ordinal.
    std::pair<MockConfig, std::size_t> record(const httplib::Request& req) {
        std::lock_guard lock(mu);
        times.push_back(std::chrono::steady_clock::now());
        bodies.push_back(req.body);
        return {cfg, ++count};
    }

    bool reject(const MockConfig& c, std::size_t ordinal, const httplib::Request& req, httplib::Response& res) {
        if (c.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(c.delay_ms));
        if (c.required_token && req.get_header_value("Authorization") != "Bearer " + *c.required_token) {
            res.status = 401;
            res.set_content(R"({"error": "unauthorized"})", "application/json");
            return true;
        }
        if (c.always_fail || ordinal <= static_cast<std::size_t>(c.fail_first)) {
            res.status = c.fail_status;
            res.set_content(R"({"error": "injected failure"})", "application/json");
            return true;
        }
        return false;
    }
};

MockServer::MockServer(MockConfig cfg, const std::string& host, int port) : impl_(std::make_unique<Impl>()) {
    impl_->cfg = std::move(cfg);
    impl_->host = host;
    auto* im = impl_.get();

    im->server.Post("/v1/chat/completions", [im](const httplib::Request& req, httplib::Response& res) {
        auto [c, ordinal] = im->record(req);
        if (im->reject(c, ordinal, req, res)) return;
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("messages")) {
            res.status = 400;
            res.set_content(R"({"error": "expected a chat request"})", "application/json");
            return;
        }
        nlohmann::json out = {
            {"id", "mock-" + std::to_string(ordinal)},
            {"object", "chat.completion"},
            {"model", body.value("model", "mock")},
            {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", c.reply}}},
                          {"finish_reason", "stop"}}}},
        };
        res.set_content(out.dump(), "application/json");
    });

    im->server.Post("/predict", [im](const httplib::Request& req, httplib::Response& res) {
        auto [c, ordinal] = im->record(req);
        if (im->reject(c, ordinal, req, res)) return;
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("image_b64") || !body.contains("command")) {
            res.status = 400;
            res.set_content(R"({"error": "expected image_b64 and command"})", "application/json");
            return;
        }
        res.set_content(c.predict_body, "application/json");
    });

    if (port == 0) {
        im->port = im->server.bind_to_any_port(host);
        if (im->port <= 0) throw std::runtime_error("mock server could not bind " + host);
    } else {
        if (!im->server.bind_to_port(host, port)) throw std::runtime_error("mock server could not bind port");
        im->port = port;
    }
    im->thread = std::thread([im] { im->server.listen_after_bind(); });
    im->server.wait_until_ready();
}

MockServer::~MockServer() { stop(); }

void MockServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void MockServer::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

int MockServer::port() const noexcept { return impl_->port; }

std::string MockServer::url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

void MockServer::set_config(MockConfig cfg) {
    std::lock_guard lock(impl_->mu);
    impl_->cfg = std::move(cfg);
}

void MockServer::reset() {
    std::lock_guard lock(impl_->mu);
    impl_->count = 0;
    impl_->times.clear();
    impl_->bodies.clear();
}

std::size_t MockServer::request_count() const {
    std::lock_guard lock(impl_->mu);
    return impl_->count;
}

std::vector<std::chrono::steady_clock::time_point> MockServer::request_times() const {
    std::lock_guard lock(impl_->mu);
    return impl_->times;
}

std::vector<std::string> MockServer::request_bodies() const {
    std::lock_guard lock(impl_->mu);
    return impl_->bodies;
}

}  // namespace uiground::mock
