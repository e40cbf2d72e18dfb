#pragma once

#include <cstdint>

namespace uiground::stats {

/// Beta posterior over an accuracy after k successes in n trials under a
/// uniform Beta(1,1) prior.
struct BetaPosterior {
    double alpha = 1.0;
    double beta = 1.0;

    double mean() const noexcept { return alpha / (alpha + beta); }
    /// m(1-m)/(alpha+beta+1), i.e. m(1-m)/(n+3).
    double variance() const noexcept;
    double stddev() const noexcept;
};

/// Posterior after observing accuracy `p` on `n` cases (k = round(p*n)).
/// Throws std::invalid_argument for n == 0 or p outside [0,1].
BetaPosterior accuracy_posterior(std::uint64_t n, double p);

/// Smallest significant (2 sigma) accuracy difference at sample size n and accuracy p.
double significance_threshold(std::uint64_t n, double p);

}  // namespace uiground::stats
