#pragma once

// Private JSON helpers shared by the core modules. Not installed.

#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "uiground/geometry.hpp"
#include "uiground/sample.hpp"

namespace uiground::json {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

OrderedJson encode(const Box& b);
OrderedJson encode(const Point& p);
OrderedJson encode(const Sample& s);
OrderedJson encode(const PredictionRecord& r);

/// Each decoder throws DataError with a description of the offending field.
Box decode_box(const Json& j);
Point decode_point(const Json& j);
Sample decode_sample(const Json& j);
PredictionRecord decode_prediction(const Json& j);

/// Parses a line, turning nlohmann exceptions into ParseError (line = `line_no`).
Json parse_line(std::string_view line, long line_no = 1);

/// Calls `fn(line, line_no)` for each non-blank line of a text file.
void for_each_line(const std::string& path, const std::function<void(std::string_view, long)>& fn);

std::string require_string(const Json& j, const char* key);
std::optional<std::string> optional_string(const Json& j, const char* key);

}  // namespace uiground::json
