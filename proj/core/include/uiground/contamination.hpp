#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uiground/benchmark_case.hpp"
#include "uiground/sample.hpp"

namespace uiground::contamination {

/// Lowercase, trim, collapse internal whitespace.
std::string normalize_text(std::string_view s);

/// Screenshots and annotations that must never appear in training data.
class BenchmarkIndex {
public:
    explicit BenchmarkIndex(double iou_threshold = 0.9) : iou_threshold_(iou_threshold) {}

    void add_image_hash(std::string hash);
    void add_annotation(std::string_view text, const Box& box);
    /// Registers the case's command/box and its image hash when known.
    void add(const BenchmarkCase& c, const std::optional<std::string>& image_hash);

    bool has_image(const std::string& hash) const { return images_.count(hash) != 0; }
    /// True when `text` (normalized) matches a benchmark annotation whose box has
    /// IoU >= threshold with `box`.
    bool matches_annotation(std::string_view text, const Box& box) const;

    double iou_threshold() const noexcept { return iou_threshold_; }
    std::size_t image_count() const noexcept { return images_.size(); }
    std::size_t annotation_count() const noexcept;

private:
    double iou_threshold_;
    std::set<std::string> images_;
    std::unordered_map<std::string, std::vector<Box>> annotations_;
};

/// Resolves a sample's screenshot to a content hash; nullopt when unavailable.
using ImageHasher = std::function<std::optional<std::string>(const Sample&)>;

/// Hasher using meta["image_sha256"] when present, otherwise SHA-256 of the file
/// at root/image_ref. Results are memoized per path; thread-safe.
class FileImageHasher {
public:
    explicit FileImageHasher(std::string root = {}) : root_(std::move(root)) {}
    std::optional<std::string> operator()(const Sample& s);

private:
    std::string root_;
    std::mutex mu_;
    std::unordered_map<std::string, std::optional<std::string>> cache_;
};

struct FilterReport {
    std::uint64_t kept = 0;
    std::uint64_t dropped_image = 0;
    std::uint64_t dropped_annotation = 0;
    std::uint64_t dropped() const noexcept { return dropped_image + dropped_annotation; }
};

/// Drops samples sharing a benchmark screenshot or a benchmark annotation
/// (same normalized text, IoU >= threshold). Order of kept samples is preserved.
std::vector<Sample> filter(std::vector<Sample> samples, const BenchmarkIndex& index, const ImageHasher& hasher,
                           FilterReport* report = nullptr);

/// Loads benchmark files into an index, hashing screenshots relative to each
/// file's directory when no precomputed hash is given.
BenchmarkIndex load_index(const std::vector<std::string>& benchmark_paths, double iou_threshold = 0.9);

}  // namespace uiground::contamination
