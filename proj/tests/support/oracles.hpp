#pragma once

// Reference implementations that share no code with the library. They are
// deliberately naive: slow, obvious, and computed by a different route.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

/// Mean and variance of Beta(k+1, n-k+1) by Simpson quadrature of the density,
/// then 2 * sd. Independent of any closed form for the Beta moments.
inline double beta_two_sigma(std::uint64_t n, double p, int intervals = 400000) {
    const auto k = static_cast<double>(std::llround(p * static_cast<double>(n)));
    const double a = k + 1.0, b = static_cast<double>(n) - k + 1.0;
    const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    auto pdf = [&](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
    };
    const double h = 1.0 / intervals;
    double m0 = 0, m1 = 0, m2 = 0;
    for (int i = 0; i <= intervals; ++i) {
        const double x = i * h;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double f = pdf(x) * w;
        m0 += f;
        m1 += f * x;
        m2 += f * x * x;
    }
    m0 *= h / 3;
    m1 *= h / 3;
    m2 *= h / 3;
    const double mean = m1 / m0;
    const double var = m2 / m0 - mean * mean;
    return 2.0 * std::sqrt(var);
}

/// Lattice coordinates: a value i means i / scale on the normalized screen.
struct LatticeBox {
    int x1, y1, x2, y2;
};
struct LatticePoint {
    int x, y;
};

/// Brute force: walk every lattice cell of the box and look for the point.
inline bool enumerate_hit(LatticePoint p, LatticeBox b) {
    for (int x = b.x1; x <= b.x2; ++x)
        for (int y = b.y1; y <= b.y2; ++y)
            if (x == p.x && y == p.y) return true;
    return false;
}

/// Accuracy as a tally of enumerated outcomes.
inline double enumerate_accuracy(const std::vector<LatticePoint>& points, const std::vector<LatticeBox>& boxes) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < points.size(); ++i) hits += enumerate_hit(points[i], boxes[i]);
    return points.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(points.size());
}

/// IoU of lattice boxes by counting unit cells (half-open cells).
inline double cell_iou(LatticeBox a, LatticeBox b) {
    long inter = 0, area_a = 0, area_b = 0;
    const int lo_x = std::min(a.x1, b.x1), hi_x = std::max(a.x2, b.x2);
    const int lo_y = std::min(a.y1, b.y1), hi_y = std::max(a.y2, b.y2);
    for (int x = lo_x; x < hi_x; ++x)
        for (int y = lo_y; y < hi_y; ++y) {
            const bool in_a = x >= a.x1 && x < a.x2 && y >= a.y1 && y < a.y2;
            const bool in_b = x >= b.x1 && x < b.x2 && y >= b.y1 && y < b.y2;
            area_a += in_a;
            area_b += in_b;
            inter += in_a && in_b;
        }
    const long uni = area_a + area_b - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Bin index by integer arithmetic on a decimal lattice: v = i / 10^6.
inline int lattice_bin(long i_micro) {
    const long bin = i_micro / 1000;  // floor(i / 10^6 * 1000)
    return static_cast<int>(bin > 999 ? 999 : bin);
}

}  // namespace oracle
