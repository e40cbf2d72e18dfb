#include "uiground/taskgen.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>

#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"

namespace uiground::taskgen {

namespace {

constexpr std::string_view kText = "{TEXT}";
constexpr std::string_view kLoc = "{LOC}";

bool contains(const std::string& s, std::string_view needle) { return s.find(needle) != std::string::npos; }

std::string describe(const TaskTemplate& t) {
    return std::string(to_string(t.kind.kind)) + "/" + std::string(to_string(t.kind.direction));
}

// Single pass: substituted text is never rescanned for placeholders.
std::string render(std::string_view pattern, std::string_view text, std::string_view loc) {
    std::string out;
    out.reserve(pattern.size() + text.size() + loc.size());
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        if (pattern.substr(pos, kText.size()) == kText) {
            out += text;
            pos += kText.size();
        } else if (pattern.substr(pos, kLoc.size()) == kLoc) {
            out += loc;
            pos += kLoc.size();
        } else {
            out += pattern[pos++];
        }
    }
    return out;
}

TaskTemplate make(Task kind, Direction dir, std::string prompt, std::string target) {
    return TaskTemplate{TaskKind{kind, dir}, std::move(prompt), std::move(target)};
}

std::string yaml_string(const YAML::Node& n, const char* key, const std::string& fallback = {}) {
    if (!n[key]) return fallback;
    return n[key].as<std::string>();
}

}  // namespace

void validate(const TaskTemplate& t) {
    if (!t.kind.valid()) throw ConfigError("template " + describe(t) + ": direction not allowed for this task");
    switch (t.kind.kind) {
        case Task::ObjectDetection:
        case Task::QuestionAnswering:
            throw ConfigError("template " + describe(t) + ": task is not generated from element templates");
        default:
            break;
    }
    if (t.kind.direction == Direction::Grounding) {
        if (contains(t.prompt_pattern, kLoc) || !contains(t.target_pattern, kLoc))
            throw ConfigError("template " + describe(t) + ": grounding templates place {LOC} only in the target");
        if (!contains(t.prompt_pattern, kText))
            throw ConfigError("template " + describe(t) + ": grounding prompt needs {TEXT}");
    } else {
        if (contains(t.target_pattern, kLoc) || !contains(t.prompt_pattern, kLoc))
            throw ConfigError("template " + describe(t) + ": annotation templates place {LOC} only in the prompt");
        if (!contains(t.target_pattern, kText))
            throw ConfigError("template " + describe(t) + ": annotation target needs {TEXT}");
    }
}

TemplatePack default_template_pack() {
    using enum Task;
    constexpr auto G = Direction::Grounding;
    constexpr auto A = Direction::Annotation;
    TemplatePack pack;
    pack.templates = {
        make(AgentAction, G, "What to click to execute the command: {TEXT}", "{LOC}"),
        make(ElementCaption, A, "Describe the UI element at {LOC}", "{TEXT}"),
        make(ElementCaption, G, "Find the UI element described as: {TEXT}", "{LOC}"),
        make(ElementPurpose, A, "What is the purpose of the UI element at {LOC}", "{TEXT}"),
        make(ElementPurpose, G, "Find the UI element whose purpose is: {TEXT}", "{LOC}"),
        make(ElementExpectation, A, "What happens after clicking the UI element at {LOC}", "{TEXT}"),
        make(ElementExpectation, G, "Find the UI element that, when clicked, leads to: {TEXT}", "{LOC}"),
        make(ElementLocation, A, "Name the UI element located at {LOC}", "{TEXT}"),
        make(ElementLocation, G, "Locate the UI element: {TEXT}", "{LOC}"),
    };
    return pack;
}

TemplatePack load_template_pack(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("template pack " + path + ": " + e.what());
    }
    TemplatePack pack;
    try {
        pack.header = yaml_string(root, "header");
        if (root["point_targets"]) pack.point_targets = root["point_targets"].as<bool>();
        pack.format.prefix = yaml_string(root, "token_prefix", pack.format.prefix);
        pack.format.suffix = yaml_string(root, "token_suffix", pack.format.suffix);
        for (const auto& node : root["templates"]) {
            const auto kind = parse_task(yaml_string(node, "kind"));
            const auto dir = parse_direction(yaml_string(node, "direction"));
            if (!kind || !dir) throw ConfigError("template pack " + path + ": unknown kind or direction");
            TaskTemplate t{TaskKind{*kind, *dir}, yaml_string(node, "prompt"), yaml_string(node, "target")};
            validate(t);
            pack.templates.push_back(std::move(t));
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError("template pack " + path + ": " + e.what());
    }
    if (pack.templates.empty()) throw ConfigError("template pack " + path + " has no templates");
    return pack;
}

std::optional<std::string> text_for(const ElementAnnotation& ann, Task kind) {
    switch (kind) {
        case Task::ElementCaption:
        case Task::ElementLocation:
            return ann.caption;
        case Task::ElementPurpose:
            return ann.purpose;
        case Task::ElementExpectation:
            return ann.expectation;
        case Task::AgentAction:
            return ann.command;
        default:
            return std::nullopt;
    }
}

std::vector<Sample> generate(const ElementAnnotation& ann, const ImageContext& ctx, const TemplatePack& pack) {
    return generate(ann, ctx, pack, pack.templates);
}

std::vector<Sample> generate(const ElementAnnotation& ann, const ImageContext& ctx, const TemplatePack& pack,
                             std::span<const TaskTemplate> templates) {
    if (!ann.box.valid()) throw DataError("element " + ctx.key + " has invalid box " + to_string(ann.box));

    std::vector<Sample> out;
    for (const auto& t : templates) {
        auto text = text_for(ann, t.kind.kind);
        if (!text || text->empty()) continue;

        const bool as_point = pack.point_targets && t.kind.kind == Task::AgentAction;
        const std::string loc =
            as_point ? loc::encode_point(box_center(ann.box), pack.format) : loc::encode_box(ann.box, pack.format);

        Sample s;
        s.id = make_sample_id(ctx.source, ctx.key + ":" + std::string(to_string(t.kind.kind)) + ":" +
                                              std::string(to_string(t.kind.direction)));
        s.source = ctx.source;
        s.image_ref = ctx.image_ref;
        s.image_w = ctx.image_w;
        s.image_h = ctx.image_h;
        s.task = t.kind;
        s.prompt = pack.header + render(t.prompt_pattern, *text, loc);
        s.target_text = render(t.target_pattern, *text, loc);
        s.target_boxes = {ann.box};
        if (as_point) s.target_point = box_center(ann.box);
        s.meta = ctx.meta;
        out.push_back(std::move(s));
    }
    return out;
}

Sample qa_sample(const std::string& question, const std::string& answer, const ImageContext& ctx) {
    if (question.empty() || answer.empty()) throw DataError("QA pair " + ctx.key + " needs a question and an answer");
    Sample s;
    s.id = make_sample_id(ctx.source, ctx.key + ":question_answering");
    s.source = ctx.source;
    s.image_ref = ctx.image_ref;
    s.image_w = ctx.image_w;
    s.image_h = ctx.image_h;
    s.task = TaskKind{Task::QuestionAnswering, Direction::NotApplicable};
    s.prompt = question;
    s.target_text = answer;
    s.meta = ctx.meta;
    return s;
}

std::optional<ElementAnnotation> annotation_from_sample(const Sample& s) {
    if (s.target_boxes.empty()) return std::nullopt;
    ElementAnnotation ann;
    ann.box = s.target_boxes.front();
    auto meta = [&](const char* key) -> std::optional<std::string> {
        auto it = s.meta.find(key);
        if (it == s.meta.end() || it->second.empty()) return std::nullopt;
        return it->second;
    };
    ann.caption = meta("caption");
    ann.purpose = meta("purpose");
    ann.expectation = meta("expectation");
    ann.command = meta("command");
    if (!ann.command && s.task.kind == Task::AgentAction && !s.prompt.empty()) ann.command = s.prompt;
    if (!ann.caption && !ann.purpose && !ann.expectation && !ann.command) return std::nullopt;
    return ann;
}

std::vector<Direction> direction_split(std::span<const std::string> keys, double ratio, std::uint64_t seed,
                                       SplitMode mode) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("direction ratio must lie in [0,1]");
    std::vector<Direction> out(keys.size(), Direction::Grounding);
    if (mode == SplitMode::Hash) {
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (unit_interval(stable_hash(seed, keys[i])) < ratio) out[i] = Direction::Annotation;
        return out;
    }
    const auto take = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(keys.size())));
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> h(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) h[i] = stable_hash(seed, keys[i]);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return h[a] != h[b] ? h[a] < h[b] : a < b;
    });
    for (std::size_t i = 0; i < take; ++i) out[order[i]] = Direction::Annotation;
    return out;
}

DirectionStreams partition_by_direction(const std::vector<Sample>& samples) {
    DirectionStreams out;
    for (const auto& s : samples) {
        if (!is_dual_capable(s.task.kind)) continue;
        if (s.task.direction == Direction::Annotation)
            out.annotation.push_back(s);
        else
            out.grounding.push_back(s);
    }
    return out;
}

}  // namespace uiground::taskgen
