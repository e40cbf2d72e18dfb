#include <array>
#include <utility>

#include "uiground/errors.hpp"
#include "uiground/ingest.hpp"

namespace uiground::ingest {

namespace {

constexpr std::array<std::pair<SourceFormat, std::string_view>, 6> kFormats{{
    {SourceFormat::WaveUI, "waveui"},
    {SourceFormat::Amex, "amex"},
    {SourceFormat::GuiCourse, "guicourse"},
    {SourceFormat::AndroidControl, "androidcontrol"},
    {SourceFormat::ScreenQA, "screenqa"},
    {SourceFormat::GenericJsonl, "generic-jsonl"},
}};

}  // namespace

std::string_view to_string(SourceFormat f) noexcept {
    for (const auto& [k, name] : kFormats)
        if (k == f) return name;
    return "unknown";
}

SourceFormat parse_format(std::string_view s) {
    for (const auto& [k, name] : kFormats)
        if (name == s) return k;
    throw ConfigError("unknown source format '" + std::string(s) + "'");
}

std::optional<BoxConvention> parse_box_convention(std::string_view s) noexcept {
    if (s == "pixel_xyxy") return BoxConvention::PixelXYXY;
    if (s == "normalized_xyxy") return BoxConvention::NormalizedXYXY;
    if (s == "pixel_xywh") return BoxConvention::PixelXYWH;
    if (s == "normalized_xywh") return BoxConvention::NormalizedXYWH;
    return std::nullopt;
}

// Field names follow the public JSONL exports of each corpus.
FieldMap default_field_map(SourceFormat f) {
    FieldMap m;
    switch (f) {
        case SourceFormat::WaveUI:
            m.image = "image";
            m.resolution = "resolution";
            m.box = "bbox";
            m.command = "instruction";
            m.caption = "description";
            m.purpose = "purpose";
            m.expectation = "expectation";
            break;
        case SourceFormat::Amex:
            m.image = "image";
            m.width = "image_w";
            m.height = "image_h";
            m.box = "bbox";
            m.command = "functionality";
            m.purpose = "purpose";
            m.expectation = "expectation";
            m.caption = "caption";
            m.hierarchy = "xml";
            break;
        case SourceFormat::GuiCourse:
            m.image = "image";
            m.width = "image_w";
            m.height = "image_h";
            m.box = "bbox";
            m.box_convention = BoxConvention::NormalizedXYXY;
            m.command = "instruction";
            m.caption = "caption";
            m.expectation = "expectation";
            break;
        case SourceFormat::AndroidControl:
            m.image = "screenshot";
            m.width = "screen_w";
            m.height = "screen_h";
            m.box = "bbox";
            m.command = "instruction";
            break;
        case SourceFormat::ScreenQA:
            m.image = "image";
            m.width = "image_w";
            m.height = "image_h";
            m.question = "question";
            m.answer = "answer";
            break;
        case SourceFormat::GenericJsonl:
            break;
    }
    m.image_sha256 = "image_sha256";
    return m;
}

std::vector<TaskKind> default_tasks(SourceFormat f) {
    switch (f) {
        case SourceFormat::ScreenQA:
            return {TaskKind{Task::QuestionAnswering, Direction::NotApplicable}};
        case SourceFormat::GenericJsonl:
            return {};
        default:
            return {TaskKind{Task::AgentAction, Direction::Grounding}};
    }
}

TaskKind parse_task_entry(std::string_view entry) {
    const auto colon = entry.find(':');
    const auto kind_name = entry.substr(0, colon);
    const auto kind = parse_task(kind_name);
    if (!kind) throw ConfigError("unknown task '" + std::string(kind_name) + "'");
    TaskKind tk{*kind, Direction::Grounding};
    if (*kind == Task::QuestionAnswering) tk.direction = Direction::NotApplicable;
    if (is_dual_capable(*kind)) tk.direction = Direction::Annotation;
    if (colon != std::string_view::npos) {
        const auto dir = parse_direction(entry.substr(colon + 1));
        if (!dir) throw ConfigError("unknown direction in task '" + std::string(entry) + "'");
        tk.direction = *dir;
    }
    if (!tk.valid()) throw ConfigError("direction not allowed in task '" + std::string(entry) + "'");
    return tk;
}

}  // namespace uiground::ingest
