#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uiground/geometry.hpp"
#include "uiground/loc_codec.hpp"
#include "uiground/sample.hpp"
#include "uiground/task_kind.hpp"

namespace uiground::taskgen {

/// Texts known about one UI element. Any subset may be present.
struct ElementAnnotation {
    Box box;
    std::optional<std::string> caption;
    std::optional<std::string> purpose;
    std::optional<std::string> expectation;
    std::optional<std::string> command;
};

/// Prompt/target wording for one (task, direction). Patterns use the
/// placeholders {TEXT} and {LOC}.
struct TaskTemplate {
    TaskKind kind;
    std::string prompt_pattern;
    std::string target_pattern;
};

struct TemplatePack {
    /// Replaceable task prefix prepended to every prompt (model specific).
    std::string header;
    /// Emit AgentAction targets as 2-token click points instead of 4-token boxes.
    bool point_targets = false;
    loc::TokenFormat format;
    std::vector<TaskTemplate> templates;
};

/// Throws ConfigError when placeholder placement contradicts the direction.
void validate(const TaskTemplate& t);

/// One wording per (kind, direction) for every element-level task.
TemplatePack default_template_pack();

/// Reads a YAML template pack; validates every template.
TemplatePack load_template_pack(const std::string& path);

/// Where generated samples come from.
struct ImageContext {
    std::string source;
    std::string key;  ///< per-row key, combined with the task into the sample id
    std::string image_ref;
    std::int64_t image_w = 0;
    std::int64_t image_h = 0;
    std::map<std::string, std::string> meta;
};

/// Text an element provides for a task kind (caption serves ElementLocation).
std::optional<std::string> text_for(const ElementAnnotation& ann, Task kind);

/// One sample per template whose text field is present. Throws DataError for an
/// invalid box.
std::vector<Sample> generate(const ElementAnnotation& ann, const ImageContext& ctx, const TemplatePack& pack);

/// Same, restricted to the given templates (formatting options still come from `pack`).
std::vector<Sample> generate(const ElementAnnotation& ann, const ImageContext& ctx, const TemplatePack& pack,
                             std::span<const TaskTemplate> templates);

/// Throws DataError when question or answer is empty.
Sample qa_sample(const std::string& question, const std::string& answer, const ImageContext& ctx);

/// Recovers the element behind a base sample: its first box plus caption /
/// purpose / expectation from meta and the command from AgentAction prompts.
std::optional<ElementAnnotation> annotation_from_sample(const Sample& s);

enum class SplitMode { Hash, CountExact };

/// Seeded assignment of dual-capable work items to a direction. `ratio` is the
/// annotation fraction. Hash mode decides per key; count-exact assigns exactly
/// round(ratio * n) keys (those with the smallest hashes) to Annotation.
std::vector<Direction> direction_split(std::span<const std::string> keys, double ratio, std::uint64_t seed,
                                       SplitMode mode);

struct DirectionStreams {
    std::vector<Sample> annotation;
    std::vector<Sample> grounding;
};

/// Splits dual-capable samples into their two direction streams; samples with
/// other tasks are dropped.
DirectionStreams partition_by_direction(const std::vector<Sample>& samples);

}  // namespace uiground::taskgen
