#include "uiground/rate_limiter.hpp"

#include <thread>

namespace uiground {

RateLimiter::RateLimiter(double per_second) : rate_(per_second) {
    if (rate_ > 0.0)
        interval_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / rate_));
}

RateLimiter::Clock::time_point RateLimiter::acquire() {
    if (rate_ <= 0.0) return Clock::now();
    Clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        const auto now = Clock::now();
        slot = next_ > now ? next_ : now;
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
    return slot;
}

}  // namespace uiground
