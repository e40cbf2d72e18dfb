#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiground/sample.hpp"
#include "uiground/taskgen.hpp"

namespace uiground::ingest {

enum class SourceFormat { WaveUI, Amex, GuiCourse, AndroidControl, ScreenQA, GenericJsonl };

std::string_view to_string(SourceFormat f) noexcept;
/// Throws ConfigError for an unknown format name.
SourceFormat parse_format(std::string_view s);

enum class BoxConvention { PixelXYXY, NormalizedXYXY, PixelXYWH, NormalizedXYWH };
std::optional<BoxConvention> parse_box_convention(std::string_view s) noexcept;

/// Declarative mapping from a corpus's JSON row keys to unified fields. Keys may
/// be dotted paths into nested objects. Empty key = field not provided.
struct FieldMap {
    std::string row_id;
    std::string image;
    std::string width;
    std::string height;
    std::string resolution;  ///< [w, h] array, alternative to width/height
    std::string box;
    BoxConvention box_convention = BoxConvention::PixelXYXY;
    std::string command;
    std::string caption;
    std::string purpose;
    std::string expectation;
    std::string question;
    std::string answer;
    std::string hierarchy;  ///< path of an Android XML dump for the screenshot
    std::string image_sha256;
};

/// Built-in field map for a format.
FieldMap default_field_map(SourceFormat f);

/// Tasks a format emits when the source does not list any.
std::vector<TaskKind> default_tasks(SourceFormat f);

/// Parses "kind" or "kind:direction"; dual-capable kinds default to annotation.
TaskKind parse_task_entry(std::string_view entry);

struct SourceSpec {
    std::string name;
    SourceFormat format = SourceFormat::GenericJsonl;
    std::string path;
    /// Row count for sources that are only planned, not read.
    std::optional<std::uint64_t> rows;
    double fraction = 1.0;
    std::vector<TaskKind> tasks;
    /// Defaults to default_field_map(format).
    std::optional<FieldMap> fields;
    /// Directory that relative image and hierarchy references resolve against.
    std::string image_root;
    /// Reuse another source's sampling key so both keep the same row indices.
    std::optional<std::string> align_with;
};

struct ConvertReport {
    std::uint64_t rows_in = 0;
    std::uint64_t samples_out = 0;
    std::map<std::string, std::uint64_t> skipped;  ///< reason -> count

    std::uint64_t skipped_total() const;
};

using SampleSink = std::function<void(Sample&&)>;

/// Converts one source into unified samples. Unreadable rows are skipped and
/// counted by reason. Throws ConfigError for planned-only sources and DataError
/// when the file cannot be opened.
ConvertReport convert(const SourceSpec& source, const SampleSink& sink,
                      const taskgen::TemplatePack& pack = taskgen::default_template_pack());

/// Convenience wrapper collecting into a vector.
std::vector<Sample> convert_all(const SourceSpec& source, ConvertReport* report = nullptr,
                                const taskgen::TemplatePack& pack = taskgen::default_template_pack());

}  // namespace uiground::ingest
