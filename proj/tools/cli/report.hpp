#pragma once

#include <optional>
#include <string>

#include "uiground/eval.hpp"
#include "uiground/failure.hpp"

namespace uiground::cli {

/// Summary: group x class grid, thresholds, failure taxonomy.
std::string render_summary(const eval::EvalReport& r, const std::optional<failure::FailureBreakdown>& f);

/// Static SVG: per-group accuracy bars with 2-sigma whiskers and, when failure
/// data is available, the heat map of failed clicks.
std::string render_svg(const eval::EvalReport& r, const std::optional<failure::FailureBreakdown>& f);

}  // namespace uiground::cli
