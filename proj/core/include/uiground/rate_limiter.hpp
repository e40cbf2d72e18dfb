#pragma once

#include <chrono>
#include <mutex>

namespace uiground {

/// Shared request pacer. Callers are admitted at most `per_second` times per
/// second, evenly spaced (no bursts); a non-positive rate disables limiting.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;

    explicit RateLimiter(double per_second);

    /// Blocks until the caller may proceed; returns the admission time.
    Clock::time_point acquire();

    double rate() const noexcept { return rate_; }

private:
    double rate_;
    Clock::duration interval_{};
    std::mutex mu_;
    Clock::time_point next_{};
};

}  // namespace uiground
