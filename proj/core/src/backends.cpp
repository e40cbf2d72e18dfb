#include "uiground/backends.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <thread>

#include "http_client.hpp"
#include "json_codec.hpp"
#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"
#include "uiground/image.hpp"
#include "uiground/loc_codec.hpp"

namespace uiground::backends {

namespace fs = std::filesystem;
using json::Json;

ReplayBackend::ReplayBackend(std::vector<PredictionRecord> records, MissingPolicy policy) : policy_(policy) {
    for (auto& r : records) {
        const auto id = r.sample_id;
        if (!records_.emplace(id, std::move(r)).second) throw DataError("duplicate prediction id " + id);
    }
}

ReplayBackend ReplayBackend::from_file(const std::string& path, MissingPolicy policy) {
    return ReplayBackend(read_predictions(path), policy);
}

PredictionRecord ReplayBackend::predict(const BenchmarkCase& c) {
    if (auto it = records_.find(c.id); it != records_.end()) return it->second;
    if (policy_ == MissingPolicy::Error) throw DataError("no stored prediction for " + c.id);
    PredictionRecord r;
    r.sample_id = c.id;
    r.error = "missing prediction";
    return r;
}

PredictionRecord CenterBaseline::predict(const BenchmarkCase& c) {
    PredictionRecord r;
    r.sample_id = c.id;
    r.point = Point{0.5, 0.5};
    return r;
}

PredictionRecord RandomBaseline::predict(const BenchmarkCase& c) {
    PredictionRecord r;
    r.sample_id = c.id;
    r.point = Point{unit_interval(stable_hash(seed_, c.id, 0)), unit_interval(stable_hash(seed_, c.id, 1))};
    return r;
}

struct RemoteBackend::Pool {
    std::mutex mu;
    std::vector<std::unique_ptr<http::Client>> idle;
};

RemoteBackend::RemoteBackend(std::string endpoint, int timeout_ms, std::string image_root,
                             std::optional<std::string> auth_token)
    : endpoint_(std::move(endpoint)),
      timeout_ms_(timeout_ms),
      image_root_(std::move(image_root)),
      token_(std::move(auth_token)),
      pool_(std::make_unique<Pool>()) {
    if (timeout_ms_ <= 0) throw ConfigError("remote backend timeout must be positive");
    http::parse_url(endpoint_);
}

RemoteBackend::~RemoteBackend() = default;

PredictionRecord parse_remote_response(const std::string& case_id, const std::string& body) {
    PredictionRecord r;
    r.sample_id = case_id;
    const Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        r.error = "response is not a JSON object";
        return r;
    }
    try {
        if (auto it = j.find("point"); it != j.end()) {
            r.point = json::decode_point(*it);
        } else if (auto it = j.find("box"); it != j.end()) {
            r.box = json::decode_box(*it);
        } else if (auto it = j.find("text"); it != j.end() && it->is_string()) {
            const auto parsed = loc::parse_locations(it->get<std::string>());
            if (parsed.tokens.size() >= 4)
                r.box = loc::tokens_to_box(std::span(parsed.tokens).first(4));
            else if (parsed.tokens.size() >= 2)
                r.point = loc::tokens_to_point(std::span(parsed.tokens).first(2));
            else
                r.error = "no location tokens in model text";
        } else {
            r.error = "response has no point, box or text";
        }
    } catch (const DataError& e) {
        r.error = e.what();
    }
    if (!r.error && !r.valid()) {
        r.point.reset();
        r.box.reset();
        r.error = "prediction outside the normalized screen";
    }
    return r;
}

PredictionRecord RemoteBackend::predict(const BenchmarkCase& c) {
    PredictionRecord r;
    r.sample_id = c.id;
    json::OrderedJson req;
    try {
        fs::path img(c.image_ref);
        if (!img.is_absolute() && !image_root_.empty()) img = fs::path(image_root_) / img;
        req["image_b64"] = base64_encode(image::read_file(img.string()));
    } catch (const DataError& e) {
        r.error = e.what();
        return r;
    }
    req["command"] = c.command;

    std::unique_ptr<http::Client> client;
    {
        std::lock_guard lock(pool_->mu);
        if (!pool_->idle.empty()) {
            client = std::move(pool_->idle.back());
            pool_->idle.pop_back();
        }
    }
    if (!client) client = std::make_unique<http::Client>(endpoint_, timeout_ms_, token_);

    const auto start = std::chrono::steady_clock::now();
    const auto resp = client->post_json("/predict", req.dump());
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    {
        std::lock_guard lock(pool_->mu);
        pool_->idle.push_back(std::move(client));
    }

    if (!resp.transport_ok()) {
        r.error = "transport: " + resp.error;
    } else if (!resp.success()) {
        r.error = "HTTP " + std::to_string(resp.status);
    } else {
        r = parse_remote_response(c.id, resp.body);
    }
    r.latency_ms = elapsed.count();
    return r;
}

std::vector<PredictionRecord> predict_all(Backend& backend, std::span<const BenchmarkCase> cases, unsigned jobs) {
    std::vector<PredictionRecord> out(cases.size());
    const unsigned workers_n = backend.shareable() ? std::max(1u, std::min<unsigned>(jobs, cases.size())) : 1u;
    if (workers_n <= 1) {
        for (std::size_t i = 0; i < cases.size(); ++i) out[i] = backend.predict(cases[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers_n);
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < workers_n; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < cases.size(); i = next++) out[i] = backend.predict(cases[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                    next = cases.size();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

LatencyStats measure_latency(Backend& backend, std::span<const BenchmarkCase> cases, int repetitions) {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    std::vector<double> ms;
    ms.reserve(cases.size() * static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        for (const auto& c : cases) {
            const auto start = std::chrono::steady_clock::now();
            [[maybe_unused]] auto r = backend.predict(c);
            const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
            ms.push_back(d.count());
        }
    }
    LatencyStats s;
    s.count = ms.size();
    if (ms.empty()) return s;
    std::sort(ms.begin(), ms.end());
    s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size())));
    s.p95_ms = ms[std::max<std::size_t>(rank, 1) - 1];
    s.min_ms = ms.front();
    s.max_ms = ms.back();
    return s;
}

std::unique_ptr<Backend> make_backend(std::string_view kind, const std::string& config, MissingPolicy policy,
                                      int timeout_ms, const std::string& image_root) {
    if (kind == "replay") return std::make_unique<ReplayBackend>(ReplayBackend::from_file(config, policy));
    if (kind == "remote") return std::make_unique<RemoteBackend>(config, timeout_ms, image_root);
    if (kind == "center_baseline" || kind == "center") return std::make_unique<CenterBaseline>();
    if (kind == "random_baseline" || kind == "random") {
        std::uint64_t seed = 0;
        if (!config.empty()) seed = std::stoull(config);
        return std::make_unique<RandomBaseline>(seed);
    }
    throw ConfigError("unknown backend '" + std::string(kind) + "'");
}

}  // namespace uiground::backends
