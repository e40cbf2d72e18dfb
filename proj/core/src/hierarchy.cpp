#include "uiground/hierarchy.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "uiground/errors.hpp"
#include "uiground/loc_codec.hpp"

namespace uiground::hierarchy {

namespace {

struct ParserDeleter {
    void operator()(XML_ParserStruct* p) const noexcept { XML_ParserFree(p); }
};

struct BuildState {
    XML_Parser parser = nullptr;
    ParsedHierarchy result;
    std::vector<UiNode*> stack;
    bool have_root = false;
};

bool read_int(std::string_view& s, std::int64_t& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (ec != std::errc{}) return false;
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    return true;
}

bool expect(std::string_view& s, char c) {
    if (s.empty() || s.front() != c) return false;
    s.remove_prefix(1);
    return true;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto* st = static_cast<BuildState*>(data);
    UiNode node;
    node.tag = name;
    const long line = static_cast<long>(XML_GetCurrentLineNumber(st->parser));
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
        const std::string_view key = attrs[i];
        const std::string_view value = attrs[i + 1];
        if (key == "bounds") {
            bool swapped = false;
            if (auto b = parse_bounds(value, &swapped)) {
                node.bounds = *b;
                node.has_bounds = true;
                if (swapped)
                    st->result.warnings.push_back({line, "inverted bounds \"" + std::string(value) + "\" corner-swapped"});
            } else {
                st->result.warnings.push_back({line, "malformed bounds \"" + std::string(value) + "\""});
            }
        } else if (key == "clickable") {
            node.clickable = value == "true";
        } else if (key == "class") {
            node.class_name = value;
        } else if (key == "text") {
            node.text = std::string(value);
        } else if (key == "content-desc") {
            node.content_desc = std::string(value);
        } else if (key == "resource-id") {
            node.resource_id = std::string(value);
        }
    }
    ++st->result.element_count;

    UiNode* placed = nullptr;
    if (st->stack.empty()) {
        st->result.root = std::move(node);
        st->have_root = true;
        placed = &st->result.root;
    } else {
        auto& siblings = st->stack.back()->children;
        siblings.push_back(std::move(node));
        placed = &siblings.back();
    }
    st->stack.push_back(placed);
}

void XMLCALL on_end(void* data, const XML_Char*) {
    auto* st = static_cast<BuildState*>(data);
    st->stack.pop_back();
}

}  // namespace

std::optional<PixelBox> parse_bounds(std::string_view s, bool* swapped) {
    PixelBox b;
    if (!expect(s, '[') || !read_int(s, b.x1) || !expect(s, ',') || !read_int(s, b.y1) || !expect(s, ']') ||
        !expect(s, '[') || !read_int(s, b.x2) || !expect(s, ',') || !read_int(s, b.y2) || !expect(s, ']') ||
        !s.empty())
        return std::nullopt;
    bool did_swap = false;
    if (b.x1 > b.x2) {
        std::swap(b.x1, b.x2);
        did_swap = true;
    }
    if (b.y1 > b.y2) {
        std::swap(b.y1, b.y2);
        did_swap = true;
    }
    if (swapped) *swapped = did_swap;
    return b;
}

ParsedHierarchy parse_hierarchy(std::string_view xml) {
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
    if (!parser) throw std::runtime_error("cannot create XML parser");
    // Stack pointers stay valid: only the top node's children vector ever grows.
    BuildState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
        throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                         static_cast<long>(XML_GetCurrentLineNumber(parser.get())),
                         static_cast<long>(XML_GetCurrentColumnNumber(parser.get())));
    }
    if (!st.have_root) throw ParseError("document has no root element", 1, 0);
    return std::move(st.result);
}

ParsedHierarchy parse_hierarchy_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_hierarchy(buf.str());
}

namespace {

void collect(const UiNode& node, double w, double h, std::vector<Box>& out) {
    if (node.clickable && node.has_bounds) {
        const double x1 = std::clamp(static_cast<double>(node.bounds.x1), 0.0, w);
        const double y1 = std::clamp(static_cast<double>(node.bounds.y1), 0.0, h);
        const double x2 = std::clamp(static_cast<double>(node.bounds.x2), 0.0, w);
        const double y2 = std::clamp(static_cast<double>(node.bounds.y2), 0.0, h);
        if (x2 > x1 && y2 > y1) out.push_back(Box{x1 / w, y1 / h, x2 / w, y2 / h});
    }
    for (const auto& child : node.children) collect(child, w, h, out);
}

}  // namespace

std::vector<Box> extract_clickables(const UiNode& root, std::int64_t screen_w, std::int64_t screen_h) {
    if (screen_w <= 0 || screen_h <= 0) throw std::invalid_argument("screen dimensions must be positive");
    std::vector<Box> out;
    collect(root, static_cast<double>(screen_w), static_cast<double>(screen_h), out);
    return out;
}

std::optional<Sample> detection_sample(const std::vector<Box>& boxes, const std::string& image_ref,
                                       std::int64_t image_w, std::int64_t image_h, const std::string& source,
                                       const std::string& key) {
    if (boxes.empty()) return std::nullopt;
    Sample s;
    s.id = make_sample_id(source, key + ":object_detection");
    s.source = source;
    s.image_ref = image_ref;
    s.image_w = image_w;
    s.image_h = image_h;
    s.task = TaskKind{Task::ObjectDetection, Direction::Grounding};
    s.prompt = std::string(kDetectionPrompt);
    std::string target;
    for (const auto& b : boxes) target += loc::encode_box(b);
    s.target_text = std::move(target);
    s.target_boxes = boxes;
    return s;
}

}  // namespace uiground::hierarchy
