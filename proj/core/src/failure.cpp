#include "uiground/failure.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json_codec.hpp"
#include "uiground/errors.hpp"
#include "uiground/eval.hpp"

namespace uiground::failure {

using json::Json;
using json::OrderedJson;

std::string_view to_string(MissKind k) noexcept {
    switch (k) {
        case MissKind::Hit: return "hit";
        case MissKind::NearMiss: return "near_miss";
        case MissKind::FarMiss: return "far_miss";
    }
    return "unknown";
}

MissKind classify_miss(const Point& p, const Box& gt, double margin) {
    if (!(margin >= 0.0)) throw std::invalid_argument("margin must be non-negative");
    if (point_in_box(p, gt)) return MissKind::Hit;
    if (margin > 0.0 && point_in_box(p, expand(gt, margin))) return MissKind::NearMiss;
    return MissKind::FarMiss;
}

std::uint64_t SpatialHistogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

BiasSummary positional_bias(std::span<const Point> points, int grid, double tau) {
    if (points.empty()) throw std::invalid_argument("positional bias needs at least one prediction");
    if (grid < 1) throw std::invalid_argument("grid must be at least 1");
    BiasSummary out;
    out.histogram.grid = grid;
    out.histogram.counts.assign(static_cast<std::size_t>(grid * grid), 0);
    double sx = 0.0, sy = 0.0;
    auto cell = [grid](double v) { return std::clamp(static_cast<int>(std::floor(v * grid)), 0, grid - 1); };
    for (const auto& p : points) {
        ++out.histogram.counts[static_cast<std::size_t>(cell(p.y) * grid + cell(p.x))];
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(points.size());
    out.mean = Point{sx / n, sy / n};
    out.left_bias = out.mean.x < 0.5 - tau;
    out.top_bias = out.mean.y < 0.5 - tau;
    return out;
}

FailureBreakdown analyze(std::span<const BenchmarkCase> cases, std::span<const PredictionRecord> predictions,
                         const AnalysisOptions& opts) {
    std::vector<eval::CaseOutcome> outcomes;
    eval::score(cases, predictions, eval::ScoreOptions{opts.missing_as_fail}, &outcomes);

    FailureBreakdown b;
    b.cases = cases.size();
    b.margin = opts.margin;
    std::vector<Point> failed_points;
    for (const auto& o : outcomes) {
        if (o.hit) continue;
        ++b.total_failures;
        if (!o.click) {
            ++b.no_prediction_count;
            b.no_prediction_ids.push_back(o.id);
            continue;
        }
        failed_points.push_back(*o.click);
        if (classify_miss(*o.click, o.gt_box, opts.margin) == MissKind::NearMiss) {
            ++b.missed_count;
            b.near_miss_ids.push_back(o.id);
        } else {
            ++b.far_count;
            b.far_miss_ids.push_back(o.id);
        }
    }
    if (!failed_points.empty()) b.bias = positional_bias(failed_points, opts.grid, opts.tau);
    return b;
}

std::string to_json(const FailureBreakdown& b) {
    OrderedJson j;
    j["cases"] = b.cases;
    j["margin"] = b.margin;
    j["total_failures"] = b.total_failures;
    j["missed_count"] = b.missed_count;
    j["far_count"] = b.far_count;
    j["no_prediction_count"] = b.no_prediction_count;
    if (b.bias) {
        OrderedJson bias;
        bias["grid"] = b.bias->histogram.grid;
        bias["counts"] = b.bias->histogram.counts;
        bias["mean_point"] = json::encode(b.bias->mean);
        bias["left_bias"] = b.bias->left_bias;
        bias["top_bias"] = b.bias->top_bias;
        j["positional_bias"] = std::move(bias);
    } else {
        j["positional_bias"] = nullptr;
    }
    j["near_miss_ids"] = b.near_miss_ids;
    j["far_miss_ids"] = b.far_miss_ids;
    j["no_prediction_ids"] = b.no_prediction_ids;
    return j.dump(2) + "\n";
}

FailureBreakdown breakdown_from_json(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("failure breakdown is not a JSON object");
    try {
        FailureBreakdown b;
        b.cases = j.at("cases").get<std::uint64_t>();
        b.margin = j.at("margin").get<double>();
        b.total_failures = j.at("total_failures").get<std::uint64_t>();
        b.missed_count = j.at("missed_count").get<std::uint64_t>();
        b.far_count = j.at("far_count").get<std::uint64_t>();
        b.no_prediction_count = j.at("no_prediction_count").get<std::uint64_t>();
        if (const auto& bias = j.at("positional_bias"); !bias.is_null()) {
            BiasSummary s;
            s.histogram.grid = bias.at("grid").get<int>();
            s.histogram.counts = bias.at("counts").get<std::vector<std::uint64_t>>();
            s.mean = json::decode_point(bias.at("mean_point"));
            s.left_bias = bias.at("left_bias").get<bool>();
            s.top_bias = bias.at("top_bias").get<bool>();
            b.bias = std::move(s);
        }
        b.near_miss_ids = j.at("near_miss_ids").get<std::vector<std::string>>();
        b.far_miss_ids = j.at("far_miss_ids").get<std::vector<std::string>>();
        b.no_prediction_ids = j.at("no_prediction_ids").get<std::vector<std::string>>();
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed failure breakdown: ") + e.what());
    }
}

std::string to_text(const FailureBreakdown& b) {
    auto share = [&](std::uint64_t k) {
        return b.total_failures == 0 ? std::string("-") : fmt::format("{:.1f}%", 100.0 * k / b.total_failures);
    };
    std::string out;
    out += fmt::format("failures: {} of {} cases\n", b.total_failures, b.cases);
    out += fmt::format("  near misses (margin {}): {} ({})\n", b.margin, b.missed_count, share(b.missed_count));
    out += fmt::format("  far misses: {} ({})\n", b.far_count, share(b.far_count));
    out += fmt::format("  no prediction: {} ({})\n", b.no_prediction_count, share(b.no_prediction_count));
    if (b.bias) {
        const auto& h = b.bias->histogram;
        out += fmt::format("failed clicks, mean point ({:.3f}, {:.3f}){}{}\n", b.bias->mean.x, b.bias->mean.y,
                           b.bias->left_bias ? ", left bias" : "", b.bias->top_bias ? ", top bias" : "");
        for (int r = 0; r < h.grid; ++r) {
            out += "  ";
            for (int c = 0; c < h.grid; ++c) out += fmt::format("{:>6}", h.at(r, c));
            out += '\n';
        }
    }
    return out;
}

}  // namespace uiground::failure
