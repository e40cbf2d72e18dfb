#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uiground/ingest.hpp"
#include "uiground/sample.hpp"

namespace uiground::mixture {

enum class SamplingMode {
    CountExact,  ///< keeps exactly round(rows * fraction) rows
    Hash,        ///< streaming per-row inclusion, approximate count
};

/// Which rows from which sources at which fraction.
struct MixtureManifest {
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::CountExact;
    std::vector<ingest::SourceSpec> sources;
    std::vector<std::string> benchmarks;  ///< contamination references
    double iou_threshold = 0.9;
    std::string templates;  ///< optional template pack path
};

/// Reads a YAML manifest; relative paths resolve against the manifest's
/// directory. Throws ConfigError for bad fractions, duplicate names or unknown
/// formats.
MixtureManifest load_manifest(const std::string& path);

/// Checks manifest invariants; throws ConfigError.
void validate(const MixtureManifest& m);

struct SourceRealization {
    std::string name;
    std::string format;
    std::string path;
    double fraction = 1.0;
    std::uint64_t rows_in = 0;
    std::uint64_t rows_skipped = 0;
    std::uint64_t rows_dropped_contamination = 0;
    std::uint64_t rows_kept = 0;
};

struct RealizedManifest {
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::CountExact;
    std::vector<SourceRealization> sources;  ///< sorted by name
    std::uint64_t total_rows = 0;
};

struct MixtureResult {
    std::vector<Sample> samples;  ///< ordered by source name, then row index
    RealizedManifest realized;
};

struct BuildOptions {
    unsigned jobs = 1;
    /// false: convert and filter only (every row kept), as the `ingest` command does.
    bool apply_fractions = true;
};

/// Converts, decontaminates and samples every source. Sources with `rows` and
/// no `path` only contribute counts.
MixtureResult build_mixture(const MixtureManifest& m, const BuildOptions& opts = {});

/// Row indices kept out of `n` rows for the given key.
std::vector<std::uint64_t> select_rows(std::uint64_t n, double fraction, std::uint64_t seed, const std::string& key,
                                       SamplingMode mode);

/// Human-readable YAML rendering (byte-stable).
std::string to_yaml(const RealizedManifest& r);

}  // namespace uiground::mixture
