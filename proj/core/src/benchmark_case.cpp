#include "uiground/benchmark_case.hpp"

#include <array>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "json_codec.hpp"
#include "uiground/errors.hpp"

namespace uiground {

namespace {

constexpr std::array<std::pair<Group, std::string_view>, 4> kGroups{{
    {Group::Mobile, "mobile"},
    {Group::Desktop, "desktop"},
    {Group::Web, "web"},
    {Group::Flat, "flat"},
}};

}  // namespace

std::string_view to_string(Group g) noexcept {
    for (const auto& [k, name] : kGroups)
        if (k == g) return name;
    return "unknown";
}

std::string_view to_string(ElementClass c) noexcept { return c == ElementClass::Text ? "text" : "icon"; }

std::optional<Group> parse_group(std::string_view s) noexcept {
    for (const auto& [k, name] : kGroups)
        if (name == s) return k;
    return std::nullopt;
}

std::optional<ElementClass> parse_element_class(std::string_view s) noexcept {
    if (s == "text") return ElementClass::Text;
    if (s == "icon") return ElementClass::Icon;
    return std::nullopt;
}

std::string to_jsonl(const BenchmarkCase& c) {
    json::OrderedJson j;
    j["id"] = c.id;
    j["image_ref"] = c.image_ref;
    j["command"] = c.command;
    j["gt_box"] = json::encode(c.gt_box);
    j["group"] = std::string(to_string(c.group));
    j["element_class"] =
        c.element_class ? json::OrderedJson(std::string(to_string(*c.element_class))) : json::OrderedJson(nullptr);
    if (c.image_sha256) j["image_sha256"] = *c.image_sha256;
    return j.dump();
}

namespace {

BenchmarkCase decode_case(const json::Json& j) {
    if (!j.is_object()) throw DataError("benchmark case must be a JSON object");
    BenchmarkCase c;
    c.id = json::require_string(j, "id");
    c.image_ref = json::optional_string(j, "image_ref").value_or("");
    c.command = json::require_string(j, "command");
    auto box = j.find("gt_box");
    if (box == j.end()) throw DataError("case " + c.id + " has no gt_box");
    c.gt_box = json::decode_box(*box);
    if (!c.gt_box.valid()) throw DataError("case " + c.id + " has invalid gt_box " + to_string(c.gt_box));
    if (auto g = json::optional_string(j, "group")) {
        auto parsed = parse_group(*g);
        if (!parsed) throw DataError("case " + c.id + " has unknown group '" + *g + "'");
        c.group = *parsed;
    }
    if (auto cls = json::optional_string(j, "element_class")) {
        auto parsed = parse_element_class(*cls);
        if (!parsed) throw DataError("case " + c.id + " has unknown element_class '" + *cls + "'");
        c.element_class = *parsed;
    }
    c.image_sha256 = json::optional_string(j, "image_sha256");
    return c;
}

}  // namespace

BenchmarkCase benchmark_case_from_jsonl(std::string_view line) { return decode_case(json::parse_line(line)); }

std::vector<BenchmarkCase> read_benchmark(const std::string& path) {
    std::vector<BenchmarkCase> out;
    std::unordered_set<std::string> seen;
    json::for_each_line(path, [&](std::string_view line, long n) {
        try {
            auto c = decode_case(json::parse_line(line, n));
            if (!seen.insert(c.id).second) throw DataError("duplicate case id " + c.id);
            out.push_back(std::move(c));
        } catch (const ParseError&) {
            throw;
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    });
    return out;
}

void write_benchmark(const std::string& path, const std::vector<BenchmarkCase>& cases) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& c : cases) out << to_jsonl(c) << '\n';
}

}  // namespace uiground
