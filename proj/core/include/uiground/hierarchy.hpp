#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiground/geometry.hpp"
#include "uiground/sample.hpp"

namespace uiground::hierarchy {

/// Un-normalized pixel rectangle as found in a `bounds` attribute.
struct PixelBox {
    std::int64_t x1 = 0;
    std::int64_t y1 = 0;
    std::int64_t x2 = 0;
    std::int64_t y2 = 0;
    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

/// One element of an Android view hierarchy dump.
struct UiNode {
    std::string tag;
    PixelBox bounds;
    /// False when the element had no `bounds` attribute or it could not be parsed.
    bool has_bounds = false;
    bool clickable = false;
    std::string class_name;
    std::optional<std::string> text;
    std::optional<std::string> content_desc;
    std::optional<std::string> resource_id;
    std::vector<UiNode> children;
};

struct Warning {
    long line = 0;
    std::string message;
};

struct ParsedHierarchy {
    UiNode root;
    std::size_t element_count = 0;
    std::vector<Warning> warnings;
};

/// Parses a uiautomator-style XML dump. Every XML element becomes a node.
/// Throws ParseError (with line/column) on malformed XML.
ParsedHierarchy parse_hierarchy(std::string_view xml);
ParsedHierarchy parse_hierarchy_file(const std::string& path);

/// Parses "[x1,y1][x2,y2]". Inverted corners are swapped and `swapped` is set.
std::optional<PixelBox> parse_bounds(std::string_view s, bool* swapped = nullptr);

/// Clickable nodes in document order, clipped to the screen and normalized.
/// Boxes with zero area after clipping are dropped.
std::vector<Box> extract_clickables(const UiNode& root, std::int64_t screen_w, std::int64_t screen_h);

inline constexpr std::string_view kDetectionPrompt = "Detect all clickable UI elements.";

/// ObjectDetection sample over `boxes` (target text: their location tokens in
/// document order); nullopt when `boxes` is empty.
std::optional<Sample> detection_sample(const std::vector<Box>& boxes, const std::string& image_ref,
                                       std::int64_t image_w, std::int64_t image_h, const std::string& source,
                                       const std::string& key);

}  // namespace uiground::hierarchy
