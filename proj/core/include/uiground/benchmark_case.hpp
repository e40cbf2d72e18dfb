#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiground/geometry.hpp"

namespace uiground {

enum class Group { Mobile, Desktop, Web, Flat };
enum class ElementClass { Text, Icon };

std::string_view to_string(Group g) noexcept;
std::string_view to_string(ElementClass c) noexcept;
std::optional<Group> parse_group(std::string_view s) noexcept;
std::optional<ElementClass> parse_element_class(std::string_view s) noexcept;

/// One grounding test case: a command and the box a correct click must land in.
struct BenchmarkCase {
    std::string id;
    std::string image_ref;
    std::string command;
    Box gt_box;
    Group group = Group::Flat;
    std::optional<ElementClass> element_class;
    /// Optional precomputed content hash of the screenshot.
    std::optional<std::string> image_sha256;

    friend bool operator==(const BenchmarkCase&, const BenchmarkCase&) = default;
};

std::string to_jsonl(const BenchmarkCase& c);
BenchmarkCase benchmark_case_from_jsonl(std::string_view line);

/// Reads a benchmark JSONL file. A missing `group` defaults to flat (OmniAct
/// style). Throws DataError on invalid boxes or duplicate ids.
std::vector<BenchmarkCase> read_benchmark(const std::string& path);
void write_benchmark(const std::string& path, const std::vector<BenchmarkCase>& cases);

}  // namespace uiground
