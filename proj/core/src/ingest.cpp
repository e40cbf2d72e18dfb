#include "uiground/ingest.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>

#include "json_codec.hpp"
#include "uiground/errors.hpp"
#include "uiground/hierarchy.hpp"

namespace uiground::ingest {

namespace fs = std::filesystem;
using json::Json;

std::uint64_t ConvertReport::skipped_total() const {
    std::uint64_t n = 0;
    for (const auto& [reason, count] : skipped) n += count;
    return n;
}

namespace {

/// Row-level rejection; the message is the skip reason.
struct RowSkip {
    std::string reason;
};

const Json* lookup(const Json& row, const std::string& path) {
    if (path.empty()) return nullptr;
    const Json* cur = &row;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const auto key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (!cur->is_object()) return nullptr;
        auto it = cur->find(key);
        if (it == cur->end() || it->is_null()) return nullptr;
        cur = &*it;
        if (dot == std::string::npos) return cur;
        pos = dot + 1;
    }
}

std::optional<std::string> text_field(const Json& row, const std::string& key) {
    const Json* v = lookup(row, key);
    if (!v || !v->is_string()) return std::nullopt;
    auto s = v->get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
}

std::int64_t int_field(const Json* v) {
    if (!v || !v->is_number()) return 0;
    return static_cast<std::int64_t>(v->get<double>());
}

std::pair<std::int64_t, std::int64_t> dimensions(const Json& row, const FieldMap& m) {
    std::int64_t w = 0, h = 0;
    if (!m.resolution.empty()) {
        if (const Json* r = lookup(row, m.resolution); r && r->is_array() && r->size() == 2) {
            w = int_field(&(*r)[0]);
            h = int_field(&(*r)[1]);
        }
    }
    if (w <= 0 || h <= 0) {
        w = int_field(lookup(row, m.width));
        h = int_field(lookup(row, m.height));
    }
    if (w <= 0 || h <= 0) throw RowSkip{"missing image dimensions"};
    return {w, h};
}

Box element_box(const Json& row, const FieldMap& m, std::int64_t w, std::int64_t h) {
    const Json* v = lookup(row, m.box);
    if (!v) throw RowSkip{"missing bbox"};
    Box raw;
    try {
        raw = json::decode_box(*v);
    } catch (const DataError&) {
        throw RowSkip{"malformed bbox"};
    }
    double x1 = raw.x1, y1 = raw.y1, x2 = raw.x2, y2 = raw.y2;
    if (m.box_convention == BoxConvention::PixelXYWH || m.box_convention == BoxConvention::NormalizedXYWH) {
        x2 = x1 + raw.x2;
        y2 = y1 + raw.y2;
    }
    const bool pixel = m.box_convention == BoxConvention::PixelXYXY || m.box_convention == BoxConvention::PixelXYWH;
    const double sx = pixel ? static_cast<double>(w) : 1.0;
    const double sy = pixel ? static_cast<double>(h) : 1.0;
    auto box = normalize_pixel_box(x1, y1, x2, y2, sx, sy);
    if (!box) throw RowSkip{"bbox outside image"};
    return *box;
}

std::string resolve(const std::string& root, const std::string& ref) {
    fs::path p(ref);
    if (p.is_absolute() || root.empty()) return p.string();
    return (fs::path(root) / p).string();
}

class Converter {
public:
    Converter(const SourceSpec& src, const taskgen::TemplatePack& pack, const SampleSink& sink, ConvertReport& report)
        : src_(src), pack_(pack), sink_(sink), report_(report) {
        root_ = src.image_root.empty() ? fs::path(src.path).parent_path().string() : src.image_root;
        tasks_ = src.tasks.empty() ? default_tasks(src.format) : src.tasks;
        fields_ = src.fields.value_or(default_field_map(src.format));
    }

    void row(std::string_view line, std::uint64_t index) {
        ++report_.rows_in;
        try {
            Json j;
            try {
                j = Json::parse(line);
            } catch (const nlohmann::json::exception&) {
                throw RowSkip{"malformed json"};
            }
            const std::uint64_t emitted = src_.format == SourceFormat::GenericJsonl ? generic(j) : mapped(j, index);
            if (emitted == 0) throw RowSkip{"no task produced"};
        } catch (const RowSkip& skip) {
            ++report_.skipped[skip.reason];
            spdlog::debug("{}: row {} skipped: {}", src_.name, index, skip.reason);
        }
    }

private:
    void emit(Sample&& s) {
        ++report_.samples_out;
        sink_(std::move(s));
    }

    bool wants(Task kind) const {
        for (const auto& t : tasks_)
            if (t.kind == kind) return true;
        return false;
    }

    std::uint64_t generic(const Json& j) {
        Sample s;
        try {
            s = json::decode_sample(j);
        } catch (const DataError&) {
            throw RowSkip{"malformed sample"};
        }
        if (!validate(s).empty()) throw RowSkip{"invalid sample"};
        if (!tasks_.empty() && !wants(s.task.kind)) return 0;
        emit(std::move(s));
        return 1;
    }

    std::uint64_t mapped(const Json& row, std::uint64_t index) {
        const FieldMap& m = fields_;
        const auto image = text_field(row, m.image);
        if (!image) throw RowSkip{"missing image"};
        const auto [w, h] = dimensions(row, m);

        taskgen::ImageContext ctx;
        ctx.source = src_.name;
        ctx.key = text_field(row, m.row_id).value_or("row" + std::to_string(index));
        ctx.image_ref = *image;
        ctx.image_w = w;
        ctx.image_h = h;

        taskgen::ElementAnnotation ann;
        ann.command = text_field(row, m.command);
        ann.caption = text_field(row, m.caption);
        ann.purpose = text_field(row, m.purpose);
        ann.expectation = text_field(row, m.expectation);
        if (ann.command) ctx.meta["command"] = *ann.command;
        if (ann.caption) ctx.meta["caption"] = *ann.caption;
        if (ann.purpose) ctx.meta["purpose"] = *ann.purpose;
        if (ann.expectation) ctx.meta["expectation"] = *ann.expectation;
        if (auto sha = text_field(row, m.image_sha256)) ctx.meta["image_sha256"] = *sha;

        std::uint64_t emitted = 0;
        std::optional<RowSkip> first_failure;
        std::optional<Box> box;
        for (const auto& task : tasks_) {
            try {
                switch (task.kind) {
                    case Task::QuestionAnswering: {
                        auto q = text_field(row, m.question);
                        auto a = text_field(row, m.answer);
                        if (!q || !a) throw RowSkip{"missing question or answer"};
                        emit(taskgen::qa_sample(*q, *a, ctx));
                        ++emitted;
                        break;
                    }
                    case Task::ObjectDetection: {
                        auto xml = text_field(row, m.hierarchy);
                        if (!xml) throw RowSkip{"missing hierarchy"};
                        hierarchy::ParsedHierarchy tree;
                        try {
                            tree = hierarchy::parse_hierarchy_file(resolve(root_, *xml));
                        } catch (const DataError&) {
                            throw RowSkip{"unreadable hierarchy"};
                        }
                        auto boxes = hierarchy::extract_clickables(tree.root, w, h);
                        auto s = hierarchy::detection_sample(boxes, ctx.image_ref, w, h, ctx.source, ctx.key);
                        if (!s) throw RowSkip{"no clickable elements"};
                        s->meta = ctx.meta;
                        emit(std::move(*s));
                        ++emitted;
                        break;
                    }
                    default: {
                        if (!box) box = element_box(row, m, w, h);
                        ann.box = *box;
                        std::vector<taskgen::TaskTemplate> chosen;
                        for (const auto& t : pack_.templates)
                            if (t.kind == task) chosen.push_back(t);
                        for (auto& s : taskgen::generate(ann, ctx, pack_, chosen)) {
                            emit(std::move(s));
                            ++emitted;
                        }
                        break;
                    }
                }
            } catch (const RowSkip& skip) {
                if (!first_failure) first_failure = skip;
            }
        }
        if (emitted == 0 && first_failure) throw *first_failure;
        return emitted;
    }

    const SourceSpec& src_;
    const taskgen::TemplatePack& pack_;
    const SampleSink& sink_;
    ConvertReport& report_;
    std::string root_;
    std::vector<TaskKind> tasks_;
    FieldMap fields_;
};

}  // namespace

ConvertReport convert(const SourceSpec& source, const SampleSink& sink, const taskgen::TemplatePack& pack) {
    if (source.path.empty()) throw ConfigError("source " + source.name + " has no path to convert");
    ConvertReport report;
    Converter conv(source, pack, sink, report);
    std::uint64_t index = 0;
    json::for_each_line(source.path, [&](std::string_view line, long) { conv.row(line, index++); });
    if (report.skipped_total() > 0)
        spdlog::info("{}: skipped {} of {} rows", source.name, report.skipped_total(), report.rows_in);
    return report;
}

std::vector<Sample> convert_all(const SourceSpec& source, ConvertReport* report, const taskgen::TemplatePack& pack) {
    std::vector<Sample> out;
    auto r = convert(source, [&](Sample&& s) { out.push_back(std::move(s)); }, pack);
    if (report) *report = r;
    return out;
}

}  // namespace uiground::ingest
