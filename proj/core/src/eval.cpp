#include "uiground/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json_codec.hpp"
#include "uiground/errors.hpp"
#include "uiground/stats.hpp"

namespace uiground::eval {

using json::Json;
using json::OrderedJson;

namespace {

std::string id_list(const std::vector<std::string>& ids) {
    constexpr std::size_t kShown = 10;
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) out += (i ? ", " : "") + ids[i];
    if (ids.size() > kShown) out += fmt::format(", ... ({} total)", ids.size());
    return out;
}

OrderedJson encode_cell(const CellStats& c) {
    OrderedJson j;
    j["n"] = c.n;
    j["hits"] = c.hits;
    j["accuracy"] = c.accuracy();
    return j;
}

CellStats decode_cell(const Json& j) {
    return CellStats{j.at("n").get<std::uint64_t>(), j.at("hits").get<std::uint64_t>()};
}

std::string pct(double v) { return fmt::format("{:.1f}", 100.0 * v); }

}  // namespace

EvalReport score(std::span<const BenchmarkCase> cases, std::span<const PredictionRecord> predictions,
                 const ScoreOptions& opts, std::vector<CaseOutcome>* outcomes) {
    std::unordered_map<std::string_view, const PredictionRecord*> by_id;
    by_id.reserve(predictions.size());
    std::vector<std::string> duplicates;
    for (const auto& p : predictions)
        if (!by_id.emplace(p.sample_id, &p).second) duplicates.push_back(p.sample_id);
    if (!duplicates.empty()) throw DataError("duplicate prediction ids: " + id_list(duplicates));

    std::unordered_set<std::string_view> case_ids;
    for (const auto& c : cases) case_ids.insert(c.id);
    std::vector<std::string> unknown, missing;
    for (const auto& p : predictions)
        if (!case_ids.count(p.sample_id)) unknown.push_back(p.sample_id);
    if (!unknown.empty()) throw DataError("predictions for unknown case ids: " + id_list(unknown));
    for (const auto& c : cases)
        if (!by_id.count(c.id)) missing.push_back(c.id);
    if (!missing.empty() && !opts.missing_as_fail) throw DataError("missing predictions for: " + id_list(missing));

    EvalReport r;
    for (const auto& c : cases) {
        CaseOutcome o{c.id, c.group, c.element_class, false, std::nullopt, c.gt_box};
        if (auto it = by_id.find(c.id); it != by_id.end()) o.click = it->second->click();
        o.hit = o.click && point_in_box(*o.click, c.gt_box);

        auto& g = r.groups[c.group];
        ++g.n;
        g.hits += o.hit;
        if (c.element_class) {
            auto& cell = r.cells[{c.group, *c.element_class}];
            ++cell.n;
            cell.hits += o.hit;
        }
        if (!o.hit) r.failure_ids.push_back(c.id);
        if (outcomes) outcomes->push_back(std::move(o));
    }
    r.n = cases.size();
    r.overall = overall_accuracy(r.groups);
    if (r.n > 0) {
        r.threshold_observed = stats::significance_threshold(r.n, r.overall);
        r.threshold_worst_case = stats::significance_threshold(r.n, 0.5);
    }
    return r;
}

double unweighted_mean(std::span<const double> accuracies) {
    if (accuracies.empty()) return 0.0;
    return std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / static_cast<double>(accuracies.size());
}

double overall_accuracy(const std::map<Group, CellStats>& groups) {
    std::vector<double> acc;
    acc.reserve(groups.size());
    for (const auto& [g, c] : groups) acc.push_back(c.accuracy());
    return unweighted_mean(acc);
}

std::string to_json(const EvalReport& r) {
    OrderedJson j;
    j["overall"] = r.overall;
    j["n"] = r.n;
    j["threshold_observed"] = r.threshold_observed;
    j["threshold_worst_case"] = r.threshold_worst_case;
    OrderedJson groups = OrderedJson::object();
    for (const auto& [g, c] : r.groups) groups[std::string(to_string(g))] = encode_cell(c);
    j["groups"] = std::move(groups);
    OrderedJson cells = OrderedJson::object();
    for (const auto& [key, c] : r.cells)
        cells[std::string(to_string(key.first)) + "/" + std::string(to_string(key.second))] = encode_cell(c);
    j["cells"] = std::move(cells);
    j["failure_ids"] = r.failure_ids;
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("eval report is not a JSON object");
    try {
        EvalReport r;
        r.overall = j.at("overall").get<double>();
        r.n = j.at("n").get<std::uint64_t>();
        r.threshold_observed = j.value("threshold_observed", 0.0);
        r.threshold_worst_case = j.value("threshold_worst_case", 0.0);
        for (const auto& [name, cell] : j.at("groups").items()) {
            auto g = parse_group(name);
            if (!g) throw DataError("unknown group " + name);
            r.groups[*g] = decode_cell(cell);
        }
        if (j.contains("cells")) {
            for (const auto& [name, cell] : j.at("cells").items()) {
                const auto slash = name.find('/');
                auto g = parse_group(name.substr(0, slash));
                auto c = slash == std::string::npos ? std::nullopt : parse_element_class(name.substr(slash + 1));
                if (!g || !c) throw DataError("unknown cell " + name);
                r.cells[{*g, *c}] = decode_cell(cell);
            }
        }
        if (j.contains("failure_ids")) r.failure_ids = j.at("failure_ids").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed eval report: ") + e.what());
    }
}

EvalReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

std::string to_text(const EvalReport& r) {
    std::string out;
    out += fmt::format("{:<10}{:>10}{:>10}{:>10}{:>8}\n", "group", "text", "icon", "all", "n");
    for (const auto& [g, c] : r.groups) {
        auto cell = [&](ElementClass cls) {
            auto it = r.cells.find({g, cls});
            return it == r.cells.end() ? std::string("-") : pct(it->second.accuracy());
        };
        out += fmt::format("{:<10}{:>10}{:>10}{:>10}{:>8}\n", to_string(g), cell(ElementClass::Text),
                           cell(ElementClass::Icon), pct(c.accuracy()), c.n);
    }
    out += fmt::format("{:<10}{:>30}{:>8}\n", "average", pct(r.overall), r.n);
    out += fmt::format("2-sigma threshold: {} pp at observed accuracy, {} pp at p=0.5\n",
                       fmt::format("{:.2f}", 100.0 * r.threshold_observed),
                       fmt::format("{:.2f}", 100.0 * r.threshold_worst_case));
    out += fmt::format("failures: {}\n", r.failure_ids.size());
    return out;
}

std::vector<GroupComparison> compare_runs(const EvalReport& a, const EvalReport& b) {
    if (a.groups.size() != b.groups.size()) throw DataError("reports cover different groups");
    std::vector<GroupComparison> out;
    auto compare = [](std::string name, std::uint64_t na, double pa, std::uint64_t nb, double pb) {
        GroupComparison c;
        c.group = std::move(name);
        c.difference = pb - pa;
        const auto pooled_n = static_cast<std::uint64_t>(std::llround((static_cast<double>(na) + nb) / 2.0));
        c.threshold = stats::significance_threshold(pooled_n, (pa + pb) / 2.0);
        c.verdict = std::fabs(c.difference) > c.threshold ? Verdict::Significant : Verdict::Inconclusive;
        return c;
    };
    for (const auto& [g, ca] : a.groups) {
        auto it = b.groups.find(g);
        if (it == b.groups.end()) throw DataError(fmt::format("group {} missing from second report", to_string(g)));
        if (it->second.n != ca.n)
            throw DataError(fmt::format("group {} has {} cases vs {}: different benchmarks", to_string(g), ca.n,
                                        it->second.n));
        out.push_back(compare(std::string(to_string(g)), ca.n, ca.accuracy(), it->second.n, it->second.accuracy()));
    }
    out.push_back(compare("overall", a.n, a.overall, b.n, b.overall));
    return out;
}

std::string to_text(const std::vector<GroupComparison>& cmp) {
    std::string out = fmt::format("{:<10}{:>12}{:>12}  {}\n", "group", "diff (pp)", "2s (pp)", "verdict");
    for (const auto& c : cmp)
        out += fmt::format("{:<10}{:>12.2f}{:>12.2f}  {}\n", c.group, 100.0 * c.difference, 100.0 * c.threshold,
                           c.verdict == Verdict::Significant ? "significant" : "inconclusive");
    return out;
}

}  // namespace uiground::eval
