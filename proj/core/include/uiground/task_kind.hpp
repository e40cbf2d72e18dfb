#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace uiground {

enum class Task {
    ElementCaption,
    ElementPurpose,
    ElementExpectation,
    ElementLocation,
    ObjectDetection,
    AgentAction,
    QuestionAnswering,
};

/// Grounding emits geometry given text; Annotation emits text given geometry.
enum class Direction { Grounding, Annotation, NotApplicable };

struct TaskKind {
    Task kind = Task::AgentAction;
    Direction direction = Direction::Grounding;

    /// ObjectDetection and AgentAction are always Grounding, QuestionAnswering is
    /// always NotApplicable, the element-text tasks take either direction.
    bool valid() const noexcept;
    friend bool operator==(const TaskKind&, const TaskKind&) = default;
};

/// True for the tasks that can be rendered in both directions.
bool is_dual_capable(Task t) noexcept;

std::string_view to_string(Task t) noexcept;
std::string_view to_string(Direction d) noexcept;
std::optional<Task> parse_task(std::string_view s) noexcept;
std::optional<Direction> parse_direction(std::string_view s) noexcept;

}  // namespace uiground
