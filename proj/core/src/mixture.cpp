#include "uiground/mixture.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <numeric>
#include <set>
#include <thread>

#include "uiground/contamination.hpp"
#include "uiground/errors.hpp"
#include "uiground/hashing.hpp"

namespace uiground::mixture {

namespace fs = std::filesystem;

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).lexically_normal().string();
}

double parse_fraction(const YAML::Node& n) {
    auto text = n.as<std::string>();
    if (!text.empty() && text.back() == '%') return std::stod(text.substr(0, text.size() - 1)) / 100.0;
    return n.as<double>();
}

void apply_field_overrides(const YAML::Node& n, ingest::FieldMap& m) {
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        const auto value = kv.second.as<std::string>();
        if (key == "box_convention") {
            auto conv = ingest::parse_box_convention(value);
            if (!conv) throw ConfigError("unknown box_convention '" + value + "'");
            m.box_convention = *conv;
            continue;
        }
        std::string* slot = nullptr;
        if (key == "row_id") slot = &m.row_id;
        else if (key == "image") slot = &m.image;
        else if (key == "width") slot = &m.width;
        else if (key == "height") slot = &m.height;
        else if (key == "resolution") slot = &m.resolution;
        else if (key == "box") slot = &m.box;
        else if (key == "command") slot = &m.command;
        else if (key == "caption") slot = &m.caption;
        else if (key == "purpose") slot = &m.purpose;
        else if (key == "expectation") slot = &m.expectation;
        else if (key == "question") slot = &m.question;
        else if (key == "answer") slot = &m.answer;
        else if (key == "hierarchy") slot = &m.hierarchy;
        else if (key == "image_sha256") slot = &m.image_sha256;
        if (!slot) throw ConfigError("unknown field map key '" + key + "'");
        *slot = value;
    }
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string_view to_string(SamplingMode m) { return m == SamplingMode::CountExact ? "count-exact" : "hash"; }

struct SourceOutcome {
    SourceRealization realized;
    std::vector<Sample> samples;
};

}  // namespace

void validate(const MixtureManifest& m) {
    std::set<std::string> names;
    for (const auto& s : m.sources) {
        if (s.name.empty()) throw ConfigError("source without a name");
        if (!names.insert(s.name).second) throw ConfigError("duplicate source name '" + s.name + "'");
        if (!(s.fraction > 0.0 && s.fraction <= 1.0))
            throw ConfigError(fmt::format("source {}: fraction {} outside (0,1]", s.name, s.fraction));
        if (s.path.empty() && !s.rows) throw ConfigError("source " + s.name + " needs a path or a row count");
    }
    for (const auto& s : m.sources)
        if (s.align_with && !names.count(*s.align_with))
            throw ConfigError("source " + s.name + " aligns with unknown source '" + *s.align_with + "'");
    if (!(m.iou_threshold > 0.0 && m.iou_threshold <= 1.0)) throw ConfigError("iou_threshold outside (0,1]");
}

MixtureManifest load_manifest(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("manifest " + path + ": " + e.what());
    }
    const fs::path base = fs::path(path).parent_path();
    MixtureManifest m;
    try {
        if (root["seed"]) m.seed = root["seed"].as<std::uint64_t>();
        if (root["mode"]) {
            const auto mode = root["mode"].as<std::string>();
            if (mode == "count-exact") m.mode = SamplingMode::CountExact;
            else if (mode == "hash") m.mode = SamplingMode::Hash;
            else throw ConfigError("unknown sampling mode '" + mode + "'");
        }
        if (root["iou_threshold"]) m.iou_threshold = root["iou_threshold"].as<double>();
        if (root["templates"]) m.templates = resolve(base, root["templates"].as<std::string>());
        for (const auto& b : root["benchmarks"]) m.benchmarks.push_back(resolve(base, b.as<std::string>()));
        for (const auto& node : root["sources"]) {
            ingest::SourceSpec s;
            s.name = node["name"].as<std::string>("");
            s.format = ingest::parse_format(node["format"].as<std::string>("generic-jsonl"));
            s.path = resolve(base, node["path"].as<std::string>(""));
            if (node["rows"]) s.rows = node["rows"].as<std::uint64_t>();
            s.fraction = node["fraction"] ? parse_fraction(node["fraction"]) : 1.0;
            for (const auto& t : node["tasks"]) s.tasks.push_back(ingest::parse_task_entry(t.as<std::string>()));
            s.image_root = resolve(base, node["image_root"].as<std::string>(""));
            if (node["align_with"]) s.align_with = node["align_with"].as<std::string>();
            if (node["fields"]) {
                auto fields = ingest::default_field_map(s.format);
                apply_field_overrides(node["fields"], fields);
                s.fields = fields;
            }
            m.sources.push_back(std::move(s));
        }
    } catch (const YAML::Exception& e) {
        throw ConfigError("manifest " + path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("manifest " + path + ": " + e.what());
    }
    validate(m);
    return m;
}

std::vector<std::uint64_t> select_rows(std::uint64_t n, double fraction, std::uint64_t seed, const std::string& key,
                                       SamplingMode mode) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError(fmt::format("fraction {} outside (0,1]", fraction));
    std::vector<std::uint64_t> rows;
    if (fraction == 1.0) {
        rows.resize(n);
        std::iota(rows.begin(), rows.end(), std::uint64_t{0});
        return rows;
    }
    if (mode == SamplingMode::Hash) {
        for (std::uint64_t i = 0; i < n; ++i)
            if (unit_interval(stable_hash(seed, key, i)) < fraction) rows.push_back(i);
        return rows;
    }
    const auto take = static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranked(n);
    for (std::uint64_t i = 0; i < n; ++i) ranked[i] = {stable_hash(seed, key, i), i};
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take), ranked.end());
    rows.reserve(take);
    for (std::uint64_t i = 0; i < take; ++i) rows.push_back(ranked[i].second);
    std::sort(rows.begin(), rows.end());
    return rows;
}

MixtureResult build_mixture(const MixtureManifest& m, const BuildOptions& opts) {
    validate(m);
    const auto pack = m.templates.empty() ? taskgen::default_template_pack() : taskgen::load_template_pack(m.templates);
    const auto index = contamination::load_index(m.benchmarks, m.iou_threshold);

    std::vector<SourceOutcome> outcomes(m.sources.size());
    auto run_source = [&](std::size_t i) {
        const auto& src = m.sources[i];
        auto& out = outcomes[i];
        out.realized.name = src.name;
        out.realized.format = std::string(ingest::to_string(src.format));
        out.realized.path = src.path;
        out.realized.fraction = src.fraction;
        const std::string key = src.align_with.value_or(src.name);
        const double fraction = opts.apply_fractions ? src.fraction : 1.0;

        if (src.path.empty()) {
            out.realized.rows_in = *src.rows;
            out.realized.rows_kept = select_rows(*src.rows, fraction, m.seed, key, m.mode).size();
            return;
        }
        ingest::ConvertReport report;
        auto samples = ingest::convert_all(src, &report, pack);
        out.realized.rows_in = report.rows_in;
        out.realized.rows_skipped = report.skipped_total();

        contamination::FilterReport fr;
        contamination::FileImageHasher hasher(src.image_root.empty() ? fs::path(src.path).parent_path().string()
                                                                       : src.image_root);
        samples = contamination::filter(std::move(samples), index, std::ref(hasher), &fr);
        out.realized.rows_dropped_contamination = fr.dropped();

        for (auto row : select_rows(samples.size(), fraction, m.seed, key, m.mode))
            out.samples.push_back(std::move(samples[row]));
        out.realized.rows_kept = out.samples.size();
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(m.sources.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(m.sources.size());
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < m.sources.size(); i = next++) {
                    try {
                        run_source(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::size_t> order(m.sources.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return m.sources[a].name < m.sources[b].name; });

    MixtureResult result;
    result.realized.seed = m.seed;
    result.realized.mode = m.mode;
    for (auto i : order) {
        auto& o = outcomes[i];
        result.realized.total_rows += o.realized.rows_kept;
        result.realized.sources.push_back(o.realized);
        for (auto& s : o.samples) result.samples.push_back(std::move(s));
    }
    spdlog::info("mixture: {} rows from {} sources", result.realized.total_rows, m.sources.size());
    return result;
}

std::string to_yaml(const RealizedManifest& r) {
    std::string out;
    out += fmt::format("seed: {}\n", r.seed);
    out += fmt::format("mode: {}\n", to_string(r.mode));
    out += fmt::format("total_rows: {}\n", r.total_rows);
    out += "sources:\n";
    for (const auto& s : r.sources) {
        out += fmt::format("  - name: {}\n", quoted(s.name));
        out += fmt::format("    format: {}\n", s.format);
        out += fmt::format("    path: {}\n", quoted(s.path));
        out += fmt::format("    fraction: {}\n", s.fraction);
        out += fmt::format("    rows_in: {}\n", s.rows_in);
        out += fmt::format("    rows_skipped: {}\n", s.rows_skipped);
        out += fmt::format("    rows_dropped_contamination: {}\n", s.rows_dropped_contamination);
        out += fmt::format("    rows_kept: {}\n", s.rows_kept);
    }
    return out;
}

}  // namespace uiground::mixture
