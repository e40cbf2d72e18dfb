#include "uiground/sample.hpp"

#include <fstream>
#include <ostream>

#include "json_codec.hpp"
#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"

namespace uiground {

std::vector<std::string> validate(const Sample& s) {
    std::vector<std::string> problems;
    if (s.id.empty()) problems.emplace_back("empty id");
    if (s.image_w <= 0 || s.image_h <= 0) problems.emplace_back("image dimensions must be positive");
    if (!s.task.valid()) problems.emplace_back("direction not allowed for task " + std::string(to_string(s.task.kind)));
    for (const auto& b : s.target_boxes)
        if (!b.valid()) problems.emplace_back("invalid box " + to_string(b));
    if (s.target_point && !s.target_point->valid()) problems.emplace_back("invalid point " + to_string(*s.target_point));

    const bool has_geometry = !s.target_boxes.empty() || s.target_point.has_value();
    switch (s.task.kind) {
        case Task::AgentAction:
        case Task::ElementLocation:
            if (!has_geometry) problems.emplace_back("grounding sample without target geometry");
            break;
        case Task::ObjectDetection:
            if (s.target_boxes.empty()) problems.emplace_back("detection sample without boxes");
            break;
        default:
            break;
    }
    if (s.task.direction == Direction::Annotation && (!s.target_text || s.target_text->empty()))
        problems.emplace_back("annotation sample without target text");
    return problems;
}

std::string make_sample_id(std::string_view source, std::string_view key) {
    std::string material;
    material.reserve(source.size() + key.size() + 1);
    material.append(source);
    material.push_back('\x1f');
    material.append(key);
    return sha256_hex(material).substr(0, 20);
}

std::string to_jsonl(const Sample& s) { return json::encode(s).dump(); }

Sample sample_from_jsonl(std::string_view line) { return json::decode_sample(json::parse_line(line)); }

std::vector<Sample> read_samples(const std::string& path) {
    std::vector<Sample> out;
    json::for_each_line(path, [&](std::string_view line, long n) {
        try {
            out.push_back(json::decode_sample(json::parse_line(line, n)));
        } catch (const ParseError&) {
            throw;
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    });
    return out;
}

void write_samples(std::ostream& out, const std::vector<Sample>& samples) {
    for (const auto& s : samples) out << to_jsonl(s) << '\n';
}

void write_samples(const std::string& path, const std::vector<Sample>& samples) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    write_samples(out, samples);
}

std::optional<Point> PredictionRecord::click() const {
    if (point) return point;
    if (box) return box_center(*box);
    return std::nullopt;
}

bool PredictionRecord::valid() const {
    if (latency_ms && !(*latency_ms >= 0.0)) return false;
    if (point && !point->valid()) return false;
    if (box && !box->valid()) return false;
    if (error) return !point && !box;
    return point.has_value() != box.has_value();
}

std::string to_jsonl(const PredictionRecord& r) { return json::encode(r).dump(); }

PredictionRecord prediction_from_jsonl(std::string_view line) {
    auto rec = json::decode_prediction(json::parse_line(line));
    if (!rec.valid()) throw DataError("invalid prediction for " + rec.sample_id);
    return rec;
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
    std::vector<PredictionRecord> out;
    json::for_each_line(path, [&](std::string_view line, long n) {
        auto rec = json::decode_prediction(json::parse_line(line, n));
        if (!rec.valid()) throw DataError(path + ":" + std::to_string(n) + ": invalid prediction for " + rec.sample_id);
        out.push_back(std::move(rec));
    });
    return out;
}

void write_predictions(const std::string& path, const std::vector<PredictionRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& r : records) out << to_jsonl(r) << '\n';
}

}  // namespace uiground
