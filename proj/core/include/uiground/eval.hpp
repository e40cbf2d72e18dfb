#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uiground/benchmark_case.hpp"
#include "uiground/sample.hpp"

namespace uiground::eval {

struct CellStats {
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    double accuracy() const noexcept { return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n); }
    friend bool operator==(const CellStats&, const CellStats&) = default;
};

struct CaseOutcome {
    std::string id;
    Group group = Group::Flat;
    std::optional<ElementClass> element_class;
    bool hit = false;
    std::optional<Point> click;  ///< absent for missing or error predictions
    Box gt_box;
};

/// Accuracy per group and per (group, element class). `overall` is the
/// unweighted mean of the group accuracies.
struct EvalReport {
    std::map<Group, CellStats> groups;
    std::map<std::pair<Group, ElementClass>, CellStats> cells;
    double overall = 0.0;
    std::uint64_t n = 0;
    double threshold_observed = 0.0;    ///< 2 sigma at n and the overall accuracy
    double threshold_worst_case = 0.0;  ///< 2 sigma at n and p = 0.5
    std::vector<std::string> failure_ids;
};

struct ScoreOptions {
    /// Count cases without a prediction as failures instead of raising.
    bool missing_as_fail = false;
};

/// Binary outcome per case (click inside gt_box), aggregated per group. Throws
/// DataError on duplicate prediction ids, predictions for unknown cases, and
/// (unless missing_as_fail) cases without a prediction.
EvalReport score(std::span<const BenchmarkCase> cases, std::span<const PredictionRecord> predictions,
                 const ScoreOptions& opts = {}, std::vector<CaseOutcome>* outcomes = nullptr);

/// Arithmetic mean, each entry weighted equally.
double unweighted_mean(std::span<const double> accuracies);

/// Mean of group accuracies (not sample-weighted).
double overall_accuracy(const std::map<Group, CellStats>& groups);

std::string to_json(const EvalReport& r);
EvalReport report_from_json(const std::string& text);
EvalReport read_report(const std::string& path);

/// Group x class accuracy grid plus the significance thresholds.
std::string to_text(const EvalReport& r);

enum class Verdict { Significant, Inconclusive };

struct GroupComparison {
    std::string group;  ///< group name, or "overall"
    double difference = 0.0;  ///< b - a
    double threshold = 0.0;
    Verdict verdict = Verdict::Inconclusive;
};

/// Per-group difference between two runs on the same benchmark. The threshold
/// uses the mean n and mean accuracy of both runs; a difference counts as
/// significant only when its magnitude exceeds the threshold. Throws DataError
/// when the reports cover different groups or case counts.
std::vector<GroupComparison> compare_runs(const EvalReport& a, const EvalReport& b);

std::string to_text(const std::vector<GroupComparison>& cmp);

}  // namespace uiground::eval
