#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uiground/benchmark_case.hpp"
#include "uiground/sample.hpp"

namespace uiground::backends {

/// Produces one prediction per benchmark case.
class Backend {
public:
    virtual ~Backend() = default;
    virtual PredictionRecord predict(const BenchmarkCase& c) = 0;
    virtual std::string_view kind() const noexcept = 0;
    /// True when predict() may be called concurrently.
    virtual bool shareable() const noexcept { return true; }
};

enum class MissingPolicy {
    Error,  ///< throw DataError
    Fail,   ///< return an error record
};

/// Looks predictions up in a PredictionRecord set.
class ReplayBackend final : public Backend {
public:
    ReplayBackend(std::vector<PredictionRecord> records, MissingPolicy policy = MissingPolicy::Error);
    static ReplayBackend from_file(const std::string& path, MissingPolicy policy = MissingPolicy::Error);

    PredictionRecord predict(const BenchmarkCase& c) override;
    std::string_view kind() const noexcept override { return "replay"; }

private:
    std::unordered_map<std::string, PredictionRecord> records_;
    MissingPolicy policy_;
};

/// Always clicks the screen center.
class CenterBaseline final : public Backend {
public:
    PredictionRecord predict(const BenchmarkCase& c) override;
    std::string_view kind() const noexcept override { return "center_baseline"; }
};

/// Uniform random click, derived from (seed, case id) so results do not depend
/// on call order.
class RandomBaseline final : public Backend {
public:
    explicit RandomBaseline(std::uint64_t seed) : seed_(seed) {}
    PredictionRecord predict(const BenchmarkCase& c) override;
    std::string_view kind() const noexcept override { return "random_baseline"; }

private:
    std::uint64_t seed_;
};

/// POST {image_b64, command} to <endpoint>/predict and parse {point}, {box}
/// or {text} (location tokens) from the response.
class RemoteBackend final : public Backend {
public:
    RemoteBackend(std::string endpoint, int timeout_ms, std::string image_root = {},
                  std::optional<std::string> auth_token = std::nullopt);
    ~RemoteBackend() override;

    PredictionRecord predict(const BenchmarkCase& c) override;
    std::string_view kind() const noexcept override { return "remote"; }

private:
    struct Pool;
    std::string endpoint_;
    int timeout_ms_;
    std::string image_root_;
    std::optional<std::string> token_;
    std::unique_ptr<Pool> pool_;
};

/// Parses a remote /predict response body into a record for `case_id`.
PredictionRecord parse_remote_response(const std::string& case_id, const std::string& body);

/// Runs the backend over every case, in case order. Parallel when the backend
/// is shareable and jobs > 1.
std::vector<PredictionRecord> predict_all(Backend& backend, std::span<const BenchmarkCase> cases, unsigned jobs = 1);

struct LatencyStats {
    std::size_t count = 0;
    double mean_ms = 0.0;
    double p95_ms = 0.0;  ///< nearest-rank
    double min_ms = 0.0;
    double max_ms = 0.0;
};

/// Wall-clock timing of predict() over cases x repetitions (sequential).
LatencyStats measure_latency(Backend& backend, std::span<const BenchmarkCase> cases, int repetitions);

/// Builds a backend by kind name: replay (config = file), remote (config =
/// URL), center_baseline, random_baseline (config = seed).
std::unique_ptr<Backend> make_backend(std::string_view kind, const std::string& config,
                                      MissingPolicy policy = MissingPolicy::Error, int timeout_ms = 10000,
                                      const std::string& image_root = {});

}  // namespace uiground::backends
