#include "json_codec.hpp"

#include <fstream>

#include "uiground/errors.hpp"

namespace uiground::json {

namespace {

std::vector<double> numbers(const Json& j, std::size_t expected, const char* what) {
    if (!j.is_array() || j.size() != expected)
        throw DataError(std::string(what) + ": expected array of " + std::to_string(expected) + " numbers");
    std::vector<double> out;
    out.reserve(expected);
    for (const auto& v : j) {
        if (!v.is_number()) throw DataError(std::string(what) + ": non-numeric coordinate");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

OrderedJson encode(const Box& b) { return OrderedJson::array({b.x1, b.y1, b.x2, b.y2}); }

OrderedJson encode(const Point& p) { return OrderedJson::array({p.x, p.y}); }

OrderedJson encode(const Sample& s) {
    OrderedJson j;
    j["id"] = s.id;
    j["source"] = s.source;
    j["image_ref"] = s.image_ref;
    j["image_w"] = s.image_w;
    j["image_h"] = s.image_h;
    j["task"] = std::string(to_string(s.task.kind));
    j["direction"] = std::string(to_string(s.task.direction));
    j["prompt"] = s.prompt;
    j["target_text"] = s.target_text ? OrderedJson(*s.target_text) : OrderedJson(nullptr);
    OrderedJson boxes = OrderedJson::array();
    for (const auto& b : s.target_boxes) boxes.push_back(encode(b));
    j["target_boxes"] = std::move(boxes);
    j["target_point"] = s.target_point ? encode(*s.target_point) : OrderedJson(nullptr);
    OrderedJson meta = OrderedJson::object();
    for (const auto& [k, v] : s.meta) meta[k] = v;
    j["meta"] = std::move(meta);
    return j;
}

OrderedJson encode(const PredictionRecord& r) {
    OrderedJson j;
    j["sample_id"] = r.sample_id;
    if (r.point) j["point"] = encode(*r.point);
    if (r.box) j["box"] = encode(*r.box);
    if (r.latency_ms) j["latency_ms"] = *r.latency_ms;
    if (r.error) j["error"] = *r.error;
    return j;
}

Box decode_box(const Json& j) {
    const auto v = numbers(j, 4, "box");
    return Box{v[0], v[1], v[2], v[3]};
}

Point decode_point(const Json& j) {
    const auto v = numbers(j, 2, "point");
    return Point{v[0], v[1]};
}

std::string require_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw DataError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

Sample decode_sample(const Json& j) {
    if (!j.is_object()) throw DataError("sample must be a JSON object");
    Sample s;
    s.id = require_string(j, "id");
    s.source = require_string(j, "source");
    s.image_ref = require_string(j, "image_ref");
    auto int_field = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_number_integer()) throw DataError(std::string("missing integer field '") + key + "'");
        return it->get<std::int64_t>();
    };
    s.image_w = int_field("image_w");
    s.image_h = int_field("image_h");
    const auto task = parse_task(require_string(j, "task"));
    const auto dir = parse_direction(require_string(j, "direction"));
    if (!task || !dir) throw DataError("unknown task or direction");
    s.task = TaskKind{*task, *dir};
    s.prompt = require_string(j, "prompt");
    s.target_text = optional_string(j, "target_text");
    if (auto it = j.find("target_boxes"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw DataError("target_boxes must be an array");
        for (const auto& b : *it) s.target_boxes.push_back(decode_box(b));
    }
    if (auto it = j.find("target_point"); it != j.end() && !it->is_null()) s.target_point = decode_point(*it);
    if (auto it = j.find("meta"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw DataError("meta must be an object");
        for (const auto& [k, v] : it->items()) s.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return s;
}

PredictionRecord decode_prediction(const Json& j) {
    if (!j.is_object()) throw DataError("prediction must be a JSON object");
    PredictionRecord r;
    if (auto id = optional_string(j, "sample_id")) {
        r.sample_id = *id;
    } else if (auto alt = optional_string(j, "id")) {
        r.sample_id = *alt;
    } else {
        throw DataError("prediction without sample_id");
    }
    if (auto it = j.find("point"); it != j.end() && !it->is_null()) r.point = decode_point(*it);
    if (auto it = j.find("box"); it != j.end() && !it->is_null()) r.box = decode_box(*it);
    if (auto it = j.find("latency_ms"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) throw DataError("latency_ms must be a number");
        r.latency_ms = it->get<double>();
    }
    r.error = optional_string(j, "error");
    return r;
}

Json parse_line(std::string_view line, long line_no) {
    try {
        return Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), line_no, static_cast<long>(e.byte));
    }
}

void for_each_line(const std::string& path, const std::function<void(std::string_view, long)>& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    long n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        fn(line, n);
    }
}

}  // namespace uiground::json
