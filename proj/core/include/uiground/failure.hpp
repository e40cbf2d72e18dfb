#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uiground/benchmark_case.hpp"
#include "uiground/geometry.hpp"
#include "uiground/sample.hpp"

namespace uiground::failure {

enum class MissKind { Hit, NearMiss, FarMiss };

std::string_view to_string(MissKind k) noexcept;

/// Hit inside gt; near miss inside gt grown by `margin` (clamped to the screen);
/// far miss otherwise. Throws std::invalid_argument for a negative margin.
MissKind classify_miss(const Point& p, const Box& gt, double margin);

/// grid x grid occupancy counts over the normalized screen, row-major (row = y).
struct SpatialHistogram {
    int grid = 4;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(int row, int col) const { return counts[static_cast<std::size_t>(row * grid + col)]; }
    std::uint64_t total() const;
};

struct BiasSummary {
    SpatialHistogram histogram;
    Point mean;
    bool left_bias = false;
    bool top_bias = false;
};

/// Throws std::invalid_argument for empty input or grid < 1.
BiasSummary positional_bias(std::span<const Point> points, int grid = 4, double tau = 0.1);

struct AnalysisOptions {
    double margin = 0.02;
    int grid = 4;
    double tau = 0.1;
    bool missing_as_fail = false;
};

struct FailureBreakdown {
    std::uint64_t cases = 0;
    std::uint64_t total_failures = 0;
    std::uint64_t missed_count = 0;  ///< near misses
    std::uint64_t far_count = 0;
    std::uint64_t no_prediction_count = 0;
    /// Over the predicted points of failed cases; absent when none exist.
    std::optional<BiasSummary> bias;
    std::vector<std::string> near_miss_ids;
    std::vector<std::string> far_miss_ids;
    std::vector<std::string> no_prediction_ids;
    double margin = 0.02;
};

FailureBreakdown analyze(std::span<const BenchmarkCase> cases, std::span<const PredictionRecord> predictions,
                         const AnalysisOptions& opts = {});

std::string to_json(const FailureBreakdown& b);
FailureBreakdown breakdown_from_json(const std::string& text);
std::string to_text(const FailureBreakdown& b);

}  // namespace uiground::failure
