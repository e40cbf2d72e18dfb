#include "uiground/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace uiground::stats {

double BetaPosterior::variance() const noexcept {
    const double m = mean();
    return m * (1.0 - m) / (alpha + beta + 1.0);
}

double BetaPosterior::stddev() const noexcept { return std::sqrt(variance()); }

BetaPosterior accuracy_posterior(std::uint64_t n, double p) {
    if (n == 0) throw std::invalid_argument("significance needs at least one case");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("accuracy must lie in [0,1]");
    const double trials = static_cast<double>(n);
    const double k = std::round(p * trials);
    return {k + 1.0, trials - k + 1.0};
}

double significance_threshold(std::uint64_t n, double p) { return 2.0 * accuracy_posterior(n, p).stddev(); }

}  // namespace uiground::stats
