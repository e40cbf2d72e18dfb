#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiground/geometry.hpp"
#include "uiground/task_kind.hpp"

namespace uiground {

/// One unified training or evaluation record.
struct Sample {
    std::string id;
    std::string source;
    std::string image_ref;
    std::int64_t image_w = 0;
    std::int64_t image_h = 0;
    TaskKind task;
    std::string prompt;
    std::optional<std::string> target_text;
    std::vector<Box> target_boxes;
    std::optional<Point> target_point;
    std::map<std::string, std::string> meta;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Lists every invariant the sample breaks; empty means valid.
std::vector<std::string> validate(const Sample& s);

/// Content-derived id: hex prefix of SHA-256 over source and a per-row key.
std::string make_sample_id(std::string_view source, std::string_view key);

/// Single JSONL line (no trailing newline) with the fixed field order
/// id, source, image_ref, image_w, image_h, task, direction, prompt,
/// target_text, target_boxes, target_point, meta.
std::string to_jsonl(const Sample& s);

/// Throws DataError on malformed JSON or missing fields.
Sample sample_from_jsonl(std::string_view line);

std::vector<Sample> read_samples(const std::string& path);
void write_samples(std::ostream& out, const std::vector<Sample>& samples);
void write_samples(const std::string& path, const std::vector<Sample>& samples);

/// Model output for one benchmark case. Exactly one of point/box is set unless
/// `error` records why no prediction exists.
struct PredictionRecord {
    std::string sample_id;
    std::optional<Point> point;
    std::optional<Box> box;
    std::optional<double> latency_ms;
    std::optional<std::string> error;

    /// Click location: the point, or the box center.
    std::optional<Point> click() const;
    bool valid() const;
    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

std::string to_jsonl(const PredictionRecord& r);
PredictionRecord prediction_from_jsonl(std::string_view line);
std::vector<PredictionRecord> read_predictions(const std::string& path);
void write_predictions(const std::string& path, const std::vector<PredictionRecord>& records);

}  // namespace uiground
