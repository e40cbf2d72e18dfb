#include "uiground/augment.hpp"

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "http_client.hpp"
#include "json_codec.hpp"
#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"
#include "uiground/image.hpp"
#include "uiground/rate_limiter.hpp"

namespace uiground::augment {

namespace fs = std::filesystem;
using json::Json;
using json::OrderedJson;

std::string_view to_string(Field f) noexcept {
    switch (f) {
        case Field::Purpose: return "purpose";
        case Field::Caption: return "caption";
        case Field::Expectation: return "expectation";
    }
    return "unknown";
}

std::optional<Field> parse_field(std::string_view s) noexcept {
    if (s == "purpose") return Field::Purpose;
    if (s == "caption") return Field::Caption;
    if (s == "expectation") return Field::Expectation;
    return std::nullopt;
}

std::vector<Field> parse_fields(std::string_view csv) {
    std::vector<Field> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = std::min(csv.find(',', pos), csv.size());
        auto name = csv.substr(pos, comma - pos);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
        if (!name.empty()) {
            auto f = parse_field(name);
            if (!f) throw ConfigError("unknown annotation field '" + std::string(name) + "'");
            if (std::find(out.begin(), out.end(), *f) == out.end()) out.push_back(*f);
        }
        pos = comma + 1;
    }
    if (out.empty()) throw ConfigError("no annotation fields requested");
    return out;
}

std::optional<Indication> parse_indication(std::string_view s) noexcept {
    if (s == "crop") return Indication::Crop;
    if (s == "marker") return Indication::Marker;
    if (s == "text") return Indication::Text;
    return std::nullopt;
}

std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::Ok: return "ok";
        case Status::Rejected: return "rejected";
        case Status::Error: return "error";
    }
    return "unknown";
}

namespace {

std::optional<Status> parse_status(std::string_view s) {
    if (s == "ok") return Status::Ok;
    if (s == "rejected") return Status::Rejected;
    if (s == "error") return Status::Error;
    return std::nullopt;
}

std::string_view indication_name(Indication i) {
    switch (i) {
        case Indication::Crop: return "crop";
        case Indication::Marker: return "marker";
        case Indication::Text: return "text";
    }
    return "crop";
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
    return s;
}

std::string box_text(const Box& b) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << '[' << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << ']';
    return os.str();
}

std::string data_url(const std::string& bytes) {
    return "data:" + image::mime_type(bytes) + ";base64," + base64_encode(bytes);
}

/// Extracts the assistant text from a chat-completion response body.
std::optional<std::string> completion_text(const std::string& body) {
    Json j = Json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    auto choices = j.find("choices");
    if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
    const auto& msg = (*choices)[0].value("message", Json::object());
    auto content = msg.find("content");
    if (content == msg.end()) return std::nullopt;
    if (content->is_string()) return content->get<std::string>();
    if (content->is_array()) {
        std::string out;
        for (const auto& part : *content)
            if (part.is_object() && part.value("type", "") == "text") out += part.value("text", "");
        return out;
    }
    return std::nullopt;
}

struct WorkItem {
    std::size_t sample = 0;
    Field field = Field::Caption;
};

class Cache {
public:
    explicit Cache(std::string dir) : dir_(std::move(dir)) {}

    bool enabled() const { return !dir_.empty(); }

    fs::path path_for(const AugmentResult& r) const {
        const auto key = sha256_hex(r.sample_id + '\x1f' + std::string(to_string(r.field)) + '\x1f' + r.model_name +
                                    '\x1f' + r.prompt_hash);
        return fs::path(dir_) / key.substr(0, 2) / (key + ".json");
    }

    std::optional<AugmentResult> load(const AugmentResult& probe) const {
        if (!enabled()) return std::nullopt;
        const auto p = path_for(probe);
        std::ifstream in(p);
        if (!in) return std::nullopt;
        std::string line;
        std::getline(in, line);
        try {
            auto r = result_from_jsonl(line);
            r.cached = true;
            r.attempts = 0;
            return r;
        } catch (const std::exception& e) {
            spdlog::warn("ignoring corrupt cache entry {}: {}", p.string(), e.what());
            return std::nullopt;
        }
    }

    void store(const AugmentResult& r) const {
        if (!enabled()) return;
        const auto p = path_for(r);
        fs::create_directories(p.parent_path());
        static std::atomic<std::uint64_t> counter{0};
        const auto tmp = p.string() + ".tmp." +
                         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                         std::to_string(counter++);
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write cache entry " + tmp);
            out << to_jsonl(r) << '\n';
        }
        fs::rename(tmp, p);
    }

private:
    std::string dir_;
};

class Annotator {
public:
    Annotator(const AugmentJob& job, const std::vector<Sample>& samples)
        : job_(job), samples_(samples), cache_(job.cache_dir), limiter_(job.rate_limit) {}

    std::vector<AugmentResult> run(AugmentStats* stats) {
        for (std::size_t i = 0; i < samples_.size(); ++i)
            for (auto f : job_.fields) items_.push_back({i, f});
        results_.resize(items_.size());

        const auto workers_n = std::max<std::size_t>(1, std::min<std::size_t>(job_.max_concurrency, items_.size()));
        {
            std::vector<std::jthread> workers;
            for (std::size_t w = 0; w < workers_n; ++w) workers.emplace_back([this] { worker(); });
        }
        if (stats) {
            stats->requests = requests_;
            stats->cache_hits = cache_hits_;
            for (const auto& r : results_) {
                if (r.status == Status::Ok) ++stats->ok;
                else if (r.status == Status::Rejected) ++stats->rejected;
                else ++stats->errors;
            }
        }
        return std::move(results_);
    }

private:
    void worker() {
        http::Client client(job_.endpoint, job_.timeout_ms, job_.auth_token);
        for (std::size_t i = next_++; i < items_.size(); i = next_++) results_[i] = process(client, items_[i]);
    }

    std::string instruction(const Sample& s, Field f) const {
        auto it = job_.prompts.instructions.find(f);
        std::string text = it == job_.prompts.instructions.end() ? std::string() : it->second;
        auto cmd = s.meta.find("command");
        text = replace_all(std::move(text), "{COMMAND}", cmd == s.meta.end() ? "" : cmd->second);
        text = replace_all(std::move(text), "{BOX}", box_text(s.target_boxes.front()));
        if (job_.indication == Indication::Text)
            text += "\nThe element's bounding box (normalized x1, y1, x2, y2) is " + box_text(s.target_boxes.front()) + ".";
        return text;
    }

    std::string request_body(const std::string& text, const std::string& screenshot, const Box& box) const {
        OrderedJson content = OrderedJson::array();
        content.push_back({{"type", "text"}, {"text", text}});
        const std::string main = job_.indication == Indication::Marker ? image::mark_png(screenshot, box) : screenshot;
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url(main)}}}});
        if (job_.indication == Indication::Crop)
            content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url(image::crop_png(screenshot, box))}}}});

        OrderedJson body;
        body["model"] = job_.model_name;
        body["temperature"] = 0;
        body["max_tokens"] = job_.max_tokens;
        OrderedJson messages = OrderedJson::array();
        if (!job_.prompts.system.empty()) messages.push_back({{"role", "system"}, {"content", job_.prompts.system}});
        messages.push_back({{"role", "user"}, {"content", std::move(content)}});
        body["messages"] = std::move(messages);
        return body.dump();
    }

    AugmentResult process(http::Client& client, const WorkItem& item) {
        const Sample& s = samples_[item.sample];
        AugmentResult r;
        r.sample_id = s.id;
        r.field = item.field;
        r.model_name = job_.model_name;
        if (s.target_boxes.empty() || s.image_ref.empty()) {
            r.status = Status::Error;
            r.reason = "sample has no element box or image";
            return r;
        }
        const std::string text = instruction(s, item.field);
        r.prompt_hash = sha256_hex(job_.prompts.system + '\x1f' + text + '\x1f' +
                                   std::string(indication_name(job_.indication)))
                            .substr(0, 16);
        if (auto hit = cache_.load(r)) {
            ++cache_hits_;
            return *hit;
        }

        std::string body;
        try {
            fs::path img(s.image_ref);
            if (!img.is_absolute() && !job_.image_root.empty()) img = fs::path(job_.image_root) / img;
            body = request_body(text, image::read_file(img.string()), s.target_boxes.front());
        } catch (const DataError& e) {
            r.status = Status::Error;
            r.reason = e.what();
            return r;
        }

        for (int attempt = 0;; ++attempt) {
            limiter_.acquire();
            ++requests_;
            ++r.attempts;
            const auto resp = client.post_json(job_.request_path, body);
            if (resp.success()) {
                auto reply = completion_text(resp.body);
                if (!reply) {
                    r.status = Status::Error;
                    r.reason = "malformed completion response";
                    return r;
                }
                r.text = trim(*reply);
                if (auto why = check_response(r.text, job_)) {
                    r.status = Status::Rejected;
                    r.reason = *why;
                } else {
                    r.status = Status::Ok;
                }
                cache_.store(r);
                return r;
            }
            const std::string cause =
                resp.transport_ok() ? "HTTP " + std::to_string(resp.status) : "transport: " + resp.error;
            if (!resp.retryable() || attempt >= job_.max_retries) {
                r.status = Status::Error;
                r.reason = cause;
                spdlog::warn("{} {}: giving up after {} attempts ({})", s.id, to_string(item.field), r.attempts, cause);
                return r;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(job_.backoff_ms) * (1LL << std::min(attempt, 20)));
        }
    }

    const AugmentJob& job_;
    const std::vector<Sample>& samples_;
    Cache cache_;
    RateLimiter limiter_;
    std::vector<WorkItem> items_;
    std::vector<AugmentResult> results_;
    std::atomic<std::size_t> next_{0};
    std::atomic<std::uint64_t> requests_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
};

}  // namespace

PromptPack default_prompt_pack() {
    PromptPack p;
    p.system = "You annotate elements of mobile, web and desktop user interfaces. Answer with a single short sentence.";
    p.instructions[Field::Caption] =
        "The first image is a screenshot, the second shows one of its UI elements. "
        "Describe what the element looks like and any text it shows.";
    p.instructions[Field::Purpose] =
        "The first image is a screenshot, the second shows one of its UI elements. "
        "What is the purpose of this element for the user?";
    p.instructions[Field::Expectation] =
        "The first image is a screenshot, the second shows one of its UI elements. "
        "What is expected to happen after clicking this element?";
    return p;
}

PromptPack load_prompt_pack(const std::string& path) {
    try {
        const auto root = YAML::LoadFile(path);
        PromptPack p;
        p.system = root["system"].as<std::string>("");
        for (const auto& kv : root["instructions"]) {
            const auto name = kv.first.as<std::string>();
            auto f = parse_field(name);
            if (!f) throw ConfigError("prompt pack " + path + ": unknown field '" + name + "'");
            p.instructions[*f] = kv.second.as<std::string>();
        }
        return p;
    } catch (const YAML::Exception& e) {
        throw ConfigError("prompt pack " + path + ": " + e.what());
    }
}

AugmentJob load_job(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("augment job " + path + ": " + e.what());
    }
    if (!root.IsMap()) throw ConfigError("augment job " + path + ": expected a mapping");
    const fs::path dir = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty() || fs::path(p).is_absolute()) return p;
        return (dir / p).lexically_normal().string();
    };

    AugmentJob job;
    try {
        if (const auto f = root["fields"]) {
            if (f.IsSequence()) {
                std::string csv;
                for (const auto& x : f) csv += (csv.empty() ? "" : ",") + x.as<std::string>();
                job.fields = parse_fields(csv);
            } else {
                job.fields = parse_fields(f.as<std::string>());
            }
        }
        job.endpoint = root["endpoint"].as<std::string>("");
        job.request_path = root["request_path"].as<std::string>(job.request_path);
        job.model_name = root["model"].as<std::string>("");
        job.max_concurrency = root["max_concurrency"].as<unsigned>(job.max_concurrency);
        job.rate_limit = root["rate_limit"].as<double>(job.rate_limit);
        job.cache_dir = resolve(root["cache_dir"].as<std::string>(""));
        job.image_root = resolve(root["image_root"].as<std::string>(""));
        job.timeout_ms = root["timeout_ms"].as<int>(job.timeout_ms);
        job.max_retries = root["max_retries"].as<int>(job.max_retries);
        job.backoff_ms = root["backoff_ms"].as<int>(job.backoff_ms);
        job.max_tokens = root["max_tokens"].as<int>(job.max_tokens);
        job.max_length = root["max_length"].as<std::size_t>(job.max_length);
        if (const auto r = root["refusal_phrases"]) job.refusal_phrases = r.as<std::vector<std::string>>();
        if (const auto i = root["indication"]) {
            const auto name = i.as<std::string>();
            auto ind = parse_indication(name);
            if (!ind) throw ConfigError("augment job " + path + ": unknown indication '" + name + "'");
            job.indication = *ind;
        }
        if (const auto p = root["prompts"]) job.prompts = load_prompt_pack(resolve(p.as<std::string>()));
        const auto env_name = root["auth_token_env"].as<std::string>(kDefaultTokenEnv);
        if (const char* tok = std::getenv(env_name.c_str()); tok && *tok) job.auth_token = tok;
    } catch (const YAML::Exception& e) {
        throw ConfigError("augment job " + path + ": " + e.what());
    }
    return job;
}

std::vector<std::string> default_refusal_phrases() {
    return {"i'm sorry", "i am sorry", "i cannot", "i can't", "unable to", "as an ai", "cannot assist"};
}

void validate(const AugmentJob& job) {
    if (job.fields.empty()) throw ConfigError("augment job requests no fields");
    if (job.max_concurrency < 1) throw ConfigError("max_concurrency must be at least 1");
    if (job.endpoint.empty()) throw ConfigError("augment job has no endpoint");
    http::parse_url(job.endpoint);
    if (job.timeout_ms <= 0) throw ConfigError("timeout must be positive");
    if (job.max_retries < 0) throw ConfigError("max_retries must be non-negative");
    for (auto f : job.fields)
        if (!job.prompts.instructions.count(f))
            throw ConfigError("prompt pack has no instruction for " + std::string(to_string(f)));
}

std::optional<std::string> check_response(std::string_view text, const AugmentJob& job) {
    const auto t = trim(text);
    if (t.empty()) return "empty response";
    if (t.size() > job.max_length) return "response longer than " + std::to_string(job.max_length) + " bytes";
    const auto lowered = lower(t);
    for (const auto& phrase : job.refusal_phrases)
        if (!phrase.empty() && lowered.find(lower(phrase)) != std::string::npos) return "refusal: " + phrase;
    return std::nullopt;
}

std::vector<AugmentResult> annotate(const AugmentJob& job, const std::vector<Sample>& samples, AugmentStats* stats) {
    validate(job);
    Annotator a(job, samples);
    return a.run(stats);
}

std::string to_jsonl(const AugmentResult& r) {
    OrderedJson j;
    j["sample_id"] = r.sample_id;
    j["field"] = std::string(to_string(r.field));
    j["text"] = r.text;
    j["model_name"] = r.model_name;
    j["prompt_hash"] = r.prompt_hash;
    j["status"] = std::string(to_string(r.status));
    j["reason"] = r.reason;
    j["attempts"] = r.attempts;
    return j.dump();
}

AugmentResult result_from_jsonl(std::string_view line) {
    const auto j = json::parse_line(line);
    AugmentResult r;
    r.sample_id = json::require_string(j, "sample_id");
    auto f = parse_field(json::require_string(j, "field"));
    auto st = parse_status(json::require_string(j, "status"));
    if (!f || !st) throw DataError("augment result with unknown field or status");
    r.field = *f;
    r.status = *st;
    r.text = json::optional_string(j, "text").value_or("");
    r.model_name = json::optional_string(j, "model_name").value_or("");
    r.prompt_hash = json::optional_string(j, "prompt_hash").value_or("");
    r.reason = json::optional_string(j, "reason").value_or("");
    if (auto it = j.find("attempts"); it != j.end() && it->is_number_integer()) r.attempts = it->get<int>();
    return r;
}

std::vector<AugmentResult> read_results(const std::string& path) {
    std::vector<AugmentResult> out;
    json::for_each_line(path, [&](std::string_view line, long) { out.push_back(result_from_jsonl(line)); });
    return out;
}

void write_results(const std::string& path, const std::vector<AugmentResult>& results) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& r : results) out << to_jsonl(r) << '\n';
}

std::vector<Sample> merge_annotations(std::vector<Sample> samples, const std::vector<AugmentResult>& results,
                                      MergeReport* report) {
    MergeReport rep;
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < samples.size(); ++i) by_id.emplace(samples[i].id, i);

    std::map<std::pair<std::size_t, Field>, const AugmentResult*> last;
    for (const auto& r : results) {
        switch (r.status) {
            case Status::Ok: ++rep.ok; break;
            case Status::Rejected: ++rep.rejected; break;
            case Status::Error: ++rep.errors; break;
        }
        auto it = by_id.find(r.sample_id);
        if (it == by_id.end()) {
            ++rep.unknown_ids;
            continue;
        }
        auto [slot, inserted] = last.try_emplace({it->second, r.field}, &r);
        if (!inserted) {
            ++rep.duplicates;
            spdlog::warn("duplicate {} result for {}; keeping the later one", to_string(r.field), r.sample_id);
            slot->second = &r;
        }
    }
    for (const auto& [key, r] : last)
        if (r->status == Status::Ok) samples[key.first].meta[std::string(to_string(r->field))] = r->text;
    if (report) *report = rep;
    return samples;
}

}  // namespace uiground::augment
