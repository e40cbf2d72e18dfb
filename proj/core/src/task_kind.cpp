#include "uiground/task_kind.hpp"

#include <array>
#include <utility>

namespace uiground {

namespace {

constexpr std::array<std::pair<Task, std::string_view>, 7> kTaskNames{{
    {Task::ElementCaption, "element_caption"},
    {Task::ElementPurpose, "element_purpose"},
    {Task::ElementExpectation, "element_expectation"},
    {Task::ElementLocation, "element_location"},
    {Task::ObjectDetection, "object_detection"},
    {Task::AgentAction, "agent_action"},
    {Task::QuestionAnswering, "question_answering"},
}};

constexpr std::array<std::pair<Direction, std::string_view>, 3> kDirectionNames{{
    {Direction::Grounding, "grounding"},
    {Direction::Annotation, "annotation"},
    {Direction::NotApplicable, "not_applicable"},
}};

}  // namespace

bool is_dual_capable(Task t) noexcept {
    switch (t) {
        case Task::ElementCaption:
        case Task::ElementPurpose:
        case Task::ElementExpectation:
        case Task::ElementLocation:
            return true;
        default:
            return false;
    }
}

bool TaskKind::valid() const noexcept {
    switch (kind) {
        case Task::ObjectDetection:
        case Task::AgentAction:
            return direction == Direction::Grounding;
        case Task::QuestionAnswering:
            return direction == Direction::NotApplicable;
        default:
            return direction != Direction::NotApplicable;
    }
}

std::string_view to_string(Task t) noexcept {
    for (const auto& [k, name] : kTaskNames)
        if (k == t) return name;
    return "unknown";
}

std::string_view to_string(Direction d) noexcept {
    for (const auto& [k, name] : kDirectionNames)
        if (k == d) return name;
    return "unknown";
}

std::optional<Task> parse_task(std::string_view s) noexcept {
    for (const auto& [k, name] : kTaskNames)
        if (name == s) return k;
    return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view s) noexcept {
    for (const auto& [k, name] : kDirectionNames)
        if (name == s) return k;
    return std::nullopt;
}

}  // namespace uiground
