#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uiground/sample.hpp"

namespace uiground::augment {

/// Element texts an MLLM can be asked to write.
enum class Field { Purpose, Caption, Expectation };

std::string_view to_string(Field f) noexcept;
std::optional<Field> parse_field(std::string_view s) noexcept;
/// Parses "purpose,caption"; throws ConfigError on unknown names or an empty list.
std::vector<Field> parse_fields(std::string_view csv);

/// How the target element is shown to the model.
enum class Indication {
    Crop,    ///< full screenshot plus a crop of the element with some context
    Marker,  ///< screenshot with the element outlined
    Text,    ///< screenshot plus the normalized box as text
};

std::optional<Indication> parse_indication(std::string_view s) noexcept;

/// Instruction text per field. `{BOX}` expands to the element's normalized box
/// and `{COMMAND}` to the sample's command (empty when unknown).
struct PromptPack {
    std::string system;
    std::map<Field, std::string> instructions;
};

PromptPack default_prompt_pack();
PromptPack load_prompt_pack(const std::string& path);

/// Default refusal phrases (case-insensitive substring match).
std::vector<std::string> default_refusal_phrases();

struct AugmentJob {
    std::vector<Field> fields;
    std::string endpoint;  ///< base URL, e.g. http://localhost:8000
    std::string request_path = "/v1/chat/completions";
    std::string model_name;
    unsigned max_concurrency = 4;
    double rate_limit = 0.0;  ///< requests per second; <= 0 disables
    std::string cache_dir;    ///< empty disables caching
    std::string image_root;   ///< relative image_refs resolve against this
    std::optional<std::string> auth_token;
    int timeout_ms = 60000;
    int max_retries = 3;
    int backoff_ms = 500;
    int max_tokens = 96;
    std::size_t max_length = 400;
    std::vector<std::string> refusal_phrases = default_refusal_phrases();
    Indication indication = Indication::Crop;
    PromptPack prompts = default_prompt_pack();
};

/// Throws ConfigError when the job violates its invariants.
void validate(const AugmentJob& job);

/// Environment variable holding the endpoint bearer token unless the job names another.
inline constexpr const char* kDefaultTokenEnv = "UIGROUND_API_TOKEN";

/// Reads a YAML job description. Relative cache/image/prompt paths resolve
/// against the job file's directory; the auth token is read from the variable
/// named by `auth_token_env`. Not validated (CLI overrides come first).
AugmentJob load_job(const std::string& path);

enum class Status { Ok, Rejected, Error };
std::string_view to_string(Status s) noexcept;

struct AugmentResult {
    std::string sample_id;
    Field field = Field::Caption;
    std::string text;
    std::string model_name;
    std::string prompt_hash;
    Status status = Status::Error;
    std::string reason;  ///< rejection or error cause
    int attempts = 0;    ///< network requests made (0 for cache hits)
    bool cached = false;
};

std::string to_jsonl(const AugmentResult& r);
AugmentResult result_from_jsonl(std::string_view line);
std::vector<AugmentResult> read_results(const std::string& path);
void write_results(const std::string& path, const std::vector<AugmentResult>& results);

struct AugmentStats {
    std::uint64_t requests = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t ok = 0;
    std::uint64_t rejected = 0;
    std::uint64_t errors = 0;
};

/// Structural checks on generated text; returns the rejection reason, if any.
std::optional<std::string> check_response(std::string_view text, const AugmentJob& job);

/// One request per (sample, field), results in input order (sample-major).
/// Cached ok/rejected results are replayed without network traffic; errors are
/// never cached so a later run retries them.
std::vector<AugmentResult> annotate(const AugmentJob& job, const std::vector<Sample>& samples,
                                    AugmentStats* stats = nullptr);

struct MergeReport {
    std::uint64_t ok = 0;
    std::uint64_t rejected = 0;
    std::uint64_t errors = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t unknown_ids = 0;
};

/// Attaches ok results to sample meta (purpose / caption / expectation). Geometry
/// and prompts are never touched. Duplicate (sample, field) results: last wins.
std::vector<Sample> merge_annotations(std::vector<Sample> samples, const std::vector<AugmentResult>& results,
                                      MergeReport* report = nullptr);

}  // namespace uiground::augment
