#include "http_client.hpp"

#include <httplib.h>

#include "uiground/errors.hpp"

namespace uiground::http {

Url parse_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint '" + url + "' has no scheme");
    if (url.compare(0, scheme, "http") != 0) throw ConfigError("only http:// endpoints are supported: " + url);
    const auto slash = url.find('/', scheme + 3);
    Url out;
    out.origin = url.substr(0, slash);
    if (slash != std::string::npos) out.base_path = url.substr(slash);
    while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
    return out;
}

struct Client::Impl {
    Impl(const Url& u, int timeout_ms) : url(u), cli(u.origin) {
        const auto sec = timeout_ms / 1000;
        const auto usec = (timeout_ms % 1000) * 1000;
        cli.set_connection_timeout(sec, usec);
        cli.set_read_timeout(sec, usec);
        cli.set_write_timeout(sec, usec);
        cli.set_keep_alive(true);
    }
    Url url;
    httplib::Client cli;
};

Client::Client(const std::string& url, int timeout_ms, std::optional<std::string> bearer_token)
    : impl_(std::make_unique<Impl>(parse_url(url), timeout_ms)) {
    if (timeout_ms <= 0) throw ConfigError("HTTP timeout must be positive");
    if (bearer_token && !bearer_token->empty()) impl_->cli.set_bearer_token_auth(*bearer_token);
}

Client::~Client() = default;
Client::Client(Client&&) noexcept = default;
Client& Client::operator=(Client&&) noexcept = default;

Response Client::post_json(const std::string& path, const std::string& body) {
    Response out;
    auto res = impl_->cli.Post(impl_->url.base_path + path, body, "application/json");
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

}  // namespace uiground::http
