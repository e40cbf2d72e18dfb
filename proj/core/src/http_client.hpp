#pragma once

// Minimal JSON-over-HTTP client shared by the augmentation and remote-inference
// paths. Not installed.

#include <memory>
#include <optional>
#include <string>

namespace uiground::http {

struct Response {
    int status = 0;        ///< 0 when no response arrived
    std::string body;
    std::string error;     ///< transport error description

    bool transport_ok() const noexcept { return status != 0; }
    bool success() const noexcept { return status >= 200 && status < 300; }
    /// Worth retrying: transport failure, 429 or 5xx.
    bool retryable() const noexcept { return status == 0 || status == 429 || status >= 500; }
};

/// Splits "http://host:port/base" into origin and base path.
struct Url {
    std::string origin;
    std::string base_path;
};
Url parse_url(const std::string& url);

/// Not thread-safe; create one client per worker.
class Client {
public:
    Client(const std::string& url, int timeout_ms, std::optional<std::string> bearer_token = std::nullopt);
    ~Client();
    Client(Client&&) noexcept;
    Client& operator=(Client&&) noexcept;

    /// POSTs `body` (application/json) to base_path + path.
    Response post_json(const std::string& path, const std::string& body);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace uiground::http
