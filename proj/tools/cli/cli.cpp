#include "cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "report.hpp"
#include "run_record.hpp"
#include "uiground/augment.hpp"
#include "uiground/backends.hpp"
#include "uiground/errors.hpp"
#include "uiground/eval.hpp"
#include "uiground/failure.hpp"
#include "uiground/mixture.hpp"
#include "uiground/stats.hpp"
#include "uiground/taskgen.hpp"
#include "uiground/version.hpp"

namespace uiground::cli {

namespace fs = std::filesystem;

namespace {

/// Bad invocation: conflicting flags, refused overwrite.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    bool force = false;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string log_level = "warn";
    std::string run_record;
};

struct IngestOpts {
    std::string manifest, out;
};
struct MixtureOpts {
    std::string manifest, out, realized, mode;
};
struct GenTasksOpts {
    std::string in, out, templates, split = "count-exact";
    std::optional<double> ratio;
    bool point_targets = false;
};
struct AugmentOpts {
    std::string manifest, in, out, results, fields, endpoint, cache_dir, model;
};
struct EvalOpts {
    std::string benchmark, pred, backend = "replay", endpoint, image_root, out_dir;
    int timeout_ms = 10000;
    bool missing_as_fail = false;
};
struct AnalyzeOpts {
    std::string benchmark, pred, out_dir;
    double margin = 0.02;
    int grid = 4;
    double tau = 0.1;
    bool missing_as_fail = false;
};
struct SignificanceOpts {
    std::optional<std::uint64_t> n;
    std::optional<double> p;
    std::vector<std::string> compare;
};
struct ReportOpts {
    std::string eval, failure, out_dir;
};

/// Collects every output path up front so the overwrite check happens before
/// any work is done.
class Outputs {
public:
    explicit Outputs(bool force) : force_(force) {}

    const std::string& claim(std::string path) {
        if (!force_ && fs::exists(path))
            throw UsageError("refusing to overwrite " + path + " (pass --force)");
        paths_.push_back(std::move(path));
        return paths_.back();
    }

    void write(const std::string& path, const std::string& content) {
        const auto parent = fs::path(path).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write " + path);
        f << content;
        if (!f) throw DataError("write failed for " + path);
    }

private:
    bool force_;
    std::vector<std::string> paths_;
};

std::string dir_file(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void set_logging(const std::string& level) {
    auto lvl = spdlog::level::from_str(level);
    if (lvl == spdlog::level::off && level != "off") throw UsageError("unknown log level '" + level + "'");
    auto logger = std::make_shared<spdlog::logger>("uiground", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    logger->set_pattern("[%l] %v");
    logger->set_level(lvl);
    spdlog::set_default_logger(logger);
}

// ---------------------------------------------------------------------------

void cmd_ingest(const IngestOpts& o, const Globals& g, Outputs& outs, RunRecord& rec, std::ostream& out) {
    const auto& out_path = outs.claim(o.out);
    auto m = mixture::load_manifest(o.manifest);
    if (g.seed_given) m.seed = g.seed;
    rec.set_seed(m.seed);
    rec.add_input(o.manifest);
    for (const auto& s : m.sources)
        if (!s.path.empty()) rec.add_input(s.path);
    for (const auto& b : m.benchmarks) rec.add_input(b);

    mixture::BuildOptions bo;
    bo.jobs = g.jobs;
    bo.apply_fractions = false;
    const auto result = mixture::build_mixture(m, bo);
    write_samples(out_path, result.samples);
    rec.add_output(out_path);

    auto& c = rec.counts();
    c["samples"] = result.samples.size();
    for (const auto& s : result.realized.sources) {
        c["sources"][s.name] = {{"rows_in", s.rows_in},
                                {"rows_skipped", s.rows_skipped},
                                {"rows_dropped_contamination", s.rows_dropped_contamination},
                                {"rows_kept", s.rows_kept}};
        out << fmt::format("{:<24} in {:>8}  skipped {:>6}  contaminated {:>6}  kept {:>8}\n", s.name, s.rows_in,
                           s.rows_skipped, s.rows_dropped_contamination, s.rows_kept);
    }
    out << fmt::format("wrote {} samples to {}\n", result.samples.size(), out_path);
}

void cmd_mixture(const MixtureOpts& o, const Globals& g, Outputs& outs, RunRecord& rec, std::ostream& out) {
    std::optional<std::string> samples_path, realized_path;
    if (!o.out.empty()) samples_path = outs.claim(o.out);
    if (!o.realized.empty()) realized_path = outs.claim(o.realized);

    auto m = mixture::load_manifest(o.manifest);
    if (g.seed_given) m.seed = g.seed;
    if (!o.mode.empty()) {
        if (o.mode == "count-exact") m.mode = mixture::SamplingMode::CountExact;
        else if (o.mode == "hash") m.mode = mixture::SamplingMode::Hash;
        else throw UsageError("--mode must be count-exact or hash");
    }
    rec.set_seed(m.seed);
    rec.add_input(o.manifest);
    for (const auto& s : m.sources)
        if (!s.path.empty()) rec.add_input(s.path);

    mixture::BuildOptions bo;
    bo.jobs = g.jobs;
    const auto result = mixture::build_mixture(m, bo);
    const auto yaml = mixture::to_yaml(result.realized);
    if (samples_path) {
        write_samples(*samples_path, result.samples);
        rec.add_output(*samples_path);
    }
    if (realized_path) {
        outs.write(*realized_path, yaml);
        rec.add_output(*realized_path);
    } else {
        out << yaml;
    }
    auto& c = rec.counts();
    c["total_rows"] = result.realized.total_rows;
    c["samples"] = result.samples.size();
    for (const auto& s : result.realized.sources) c["sources"][s.name] = s.rows_kept;
    spdlog::info("realized total {} rows", result.realized.total_rows);
}

void cmd_gen_tasks(const GenTasksOpts& o, const Globals& g, Outputs& outs, RunRecord& rec, std::ostream& out) {
    const auto& out_path = outs.claim(o.out);
    taskgen::SplitMode split;
    if (o.split == "count-exact") split = taskgen::SplitMode::CountExact;
    else if (o.split == "hash") split = taskgen::SplitMode::Hash;
    else throw UsageError("--split must be count-exact or hash");

    auto pack = o.templates.empty() ? taskgen::default_template_pack() : taskgen::load_template_pack(o.templates);
    if (o.point_targets) pack.point_targets = true;
    if (!o.templates.empty()) rec.add_input(o.templates);
    rec.add_input(o.in);
    rec.set_seed(g.seed);

    const auto base = read_samples(o.in);
    // Elements come from the base agent-action samples; other tasks pass through.
    std::vector<std::size_t> element_idx;
    std::vector<taskgen::ElementAnnotation> anns;
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (base[i].task.kind != Task::AgentAction) continue;
        if (auto a = taskgen::annotation_from_sample(base[i])) {
            element_idx.push_back(i);
            anns.push_back(std::move(*a));
            keys.push_back(base[i].id);
        }
    }
    std::vector<Direction> dirs;
    if (o.ratio) dirs = taskgen::direction_split(keys, *o.ratio, g.seed, split);

    std::vector<taskgen::TaskTemplate> by_dir[2];
    for (const auto& t : pack.templates) {
        if (!is_dual_capable(t.kind.kind)) continue;
        by_dir[t.kind.direction == Direction::Annotation ? 1 : 0].push_back(t);
    }
    std::vector<taskgen::TaskTemplate> both = by_dir[0];
    both.insert(both.end(), by_dir[1].begin(), by_dir[1].end());

    std::vector<Sample> result;
    std::map<std::string, std::uint64_t> per_task;
    auto emit = [&](Sample s) {
        per_task[fmt::format("{}:{}", to_string(s.task.kind), to_string(s.task.direction))]++;
        result.push_back(std::move(s));
    };
    std::size_t next_element = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        emit(base[i]);
        if (next_element >= element_idx.size() || element_idx[next_element] != i) continue;
        const auto& s = base[i];
        taskgen::ImageContext ctx{s.source, s.id, s.image_ref, s.image_w, s.image_h, s.meta};
        const auto& tmpl = !o.ratio ? both : by_dir[dirs[next_element] == Direction::Annotation ? 1 : 0];
        for (auto& gen : taskgen::generate(anns[next_element], ctx, pack, tmpl)) emit(std::move(gen));
        ++next_element;
    }
    write_samples(out_path, result);
    rec.add_output(out_path);

    auto& c = rec.counts();
    c["samples_in"] = base.size();
    c["elements"] = element_idx.size();
    c["samples_out"] = result.size();
    c["tasks"] = per_task;
    for (const auto& [k, v] : per_task) out << fmt::format("{:<34}{:>10}\n", k, v);
    out << fmt::format("wrote {} samples ({} elements) to {}\n", result.size(), element_idx.size(), out_path);
}

void cmd_augment(const AugmentOpts& o, const Globals&, Outputs& outs, RunRecord& rec, std::ostream& out) {
    const auto& out_path = outs.claim(o.out);
    const auto& results_path = outs.claim(o.results.empty() ? o.out + ".results.jsonl" : o.results);

    auto job = augment::load_job(o.manifest);
    if (!o.fields.empty()) job.fields = augment::parse_fields(o.fields);
    if (!o.endpoint.empty()) job.endpoint = o.endpoint;
    if (!o.cache_dir.empty()) job.cache_dir = o.cache_dir;
    if (!o.model.empty()) job.model_name = o.model;
    augment::validate(job);
    rec.add_input(o.manifest);
    rec.add_input(o.in);

    const auto samples = read_samples(o.in);
    augment::AugmentStats stats;
    const auto results = augment::annotate(job, samples, &stats);
    augment::MergeReport mr;
    const auto merged = augment::merge_annotations(samples, results, &mr);
    augment::write_results(results_path, results);
    write_samples(out_path, merged);
    rec.add_output(out_path);
    rec.add_output(results_path);

    auto& c = rec.counts();
    c["samples"] = samples.size();
    c["results"] = results.size();
    c["requests"] = stats.requests;
    c["cache_hits"] = stats.cache_hits;
    c["ok"] = stats.ok;
    c["rejected"] = stats.rejected;
    c["errors"] = stats.errors;
    out << fmt::format("{} results: {} ok, {} rejected, {} errors ({} requests, {} cache hits)\n", results.size(),
                       stats.ok, stats.rejected, stats.errors, stats.requests, stats.cache_hits);
    if (stats.errors > 0) spdlog::warn("{} annotations failed; rerun to retry them", stats.errors);
}

void cmd_eval(const EvalOpts& o, const Globals& g, Outputs& outs, RunRecord& rec, std::ostream& out) {
    std::optional<std::string> json_path, text_path, pred_out;
    if (!o.out_dir.empty()) {
        json_path = outs.claim(dir_file(o.out_dir, "eval.json"));
        text_path = outs.claim(dir_file(o.out_dir, "eval.txt"));
        if (o.backend != "replay") pred_out = outs.claim(dir_file(o.out_dir, "predictions.jsonl"));
    }
    rec.add_input(o.benchmark);
    const auto cases = read_benchmark(o.benchmark);

    std::vector<PredictionRecord> preds;
    if (o.backend == "replay") {
        if (o.pred.empty()) throw UsageError("--pred is required with the replay backend");
        rec.add_input(o.pred);
        preds = read_predictions(o.pred);
    } else {
        std::string config;
        if (o.backend == "remote") {
            if (o.endpoint.empty()) throw UsageError("--endpoint is required with the remote backend");
            config = o.endpoint;
        } else if (o.backend == "random" || o.backend == "random_baseline") {
            config = std::to_string(g.seed);
            rec.set_seed(g.seed);
        } else if (o.backend != "center" && o.backend != "center_baseline") {
            throw UsageError("unknown backend '" + o.backend + "'");
        }
        const auto image_root = o.image_root.empty() ? fs::path(o.benchmark).parent_path().string() : o.image_root;
        auto backend = backends::make_backend(o.backend, config, backends::MissingPolicy::Error, o.timeout_ms,
                                              image_root);
        preds = backends::predict_all(*backend, cases, g.jobs);
    }

    eval::ScoreOptions so;
    so.missing_as_fail = o.missing_as_fail;
    const auto report = eval::score(cases, preds, so);
    const auto text = eval::to_text(report);
    out << text;
    if (json_path) {
        outs.write(*json_path, eval::to_json(report));
        outs.write(*text_path, text);
        rec.add_output(*json_path);
        rec.add_output(*text_path);
    }
    if (pred_out) {
        write_predictions(*pred_out, preds);
        rec.add_output(*pred_out);
    }
    auto& c = rec.counts();
    c["cases"] = cases.size();
    c["predictions"] = preds.size();
    c["failures"] = report.failure_ids.size();
    c["overall"] = report.overall;
}

void cmd_analyze(const AnalyzeOpts& o, const Globals&, Outputs& outs, RunRecord& rec, std::ostream& out) {
    std::optional<std::string> json_path, text_path;
    if (!o.out_dir.empty()) {
        json_path = outs.claim(dir_file(o.out_dir, "failure.json"));
        text_path = outs.claim(dir_file(o.out_dir, "failure.txt"));
    }
    rec.add_input(o.benchmark);
    rec.add_input(o.pred);
    const auto cases = read_benchmark(o.benchmark);
    const auto preds = read_predictions(o.pred);
    failure::AnalysisOptions ao;
    ao.margin = o.margin;
    ao.grid = o.grid;
    ao.tau = o.tau;
    ao.missing_as_fail = o.missing_as_fail;
    const auto b = failure::analyze(cases, preds, ao);
    const auto text = failure::to_text(b);
    out << text;
    if (json_path) {
        outs.write(*json_path, failure::to_json(b));
        outs.write(*text_path, text);
        rec.add_output(*json_path);
        rec.add_output(*text_path);
    }
    auto& c = rec.counts();
    c["cases"] = b.cases;
    c["failures"] = b.total_failures;
    c["near_miss"] = b.missed_count;
    c["far_miss"] = b.far_count;
    c["no_prediction"] = b.no_prediction_count;
}

void cmd_significance(const SignificanceOpts& o, const Globals&, Outputs&, RunRecord& rec, std::ostream& out) {
    if (!o.compare.empty()) {
        if (o.n || o.p) throw UsageError("--compare cannot be combined with --n/--p");
        rec.add_input(o.compare[0]);
        rec.add_input(o.compare[1]);
        const auto a = eval::read_report(o.compare[0]);
        const auto b = eval::read_report(o.compare[1]);
        const auto cmp = eval::compare_runs(a, b);
        out << eval::to_text(cmp);
        std::uint64_t sig = 0;
        for (const auto& c : cmp) sig += c.verdict == eval::Verdict::Significant;
        rec.counts()["groups"] = cmp.size();
        rec.counts()["significant"] = sig;
        return;
    }
    if (!o.n || !o.p) throw UsageError("significance needs --n and --p, or --compare A B");
    const auto post = stats::accuracy_posterior(*o.n, *o.p);
    const auto th = stats::significance_threshold(*o.n, *o.p);
    const auto worst = stats::significance_threshold(*o.n, 0.5);
    out << fmt::format("n = {}, accuracy = {:.4f}\n", *o.n, *o.p);
    out << fmt::format("posterior Beta({:.0f}, {:.0f}): mean {:.5f}, sd {:.5f}\n", post.alpha, post.beta, post.mean(),
                       post.stddev());
    out << fmt::format("2-sigma threshold: {:.5f} ({:.2f} pp)\n", th, 100.0 * th);
    out << fmt::format("worst case (p = 0.5): {:.5f} ({:.2f} pp)\n", worst, 100.0 * worst);
    rec.counts()["n"] = *o.n;
    rec.counts()["p"] = *o.p;
    rec.counts()["threshold"] = th;
    rec.counts()["threshold_worst_case"] = worst;
}

void cmd_report(const ReportOpts& o, const Globals&, Outputs& outs, RunRecord& rec, std::ostream& out) {
    std::optional<std::string> text_path, svg_path;
    if (!o.out_dir.empty()) {
        text_path = outs.claim(dir_file(o.out_dir, "summary.txt"));
        svg_path = outs.claim(dir_file(o.out_dir, "summary.svg"));
    }
    rec.add_input(o.eval);
    const auto r = eval::read_report(o.eval);
    std::optional<failure::FailureBreakdown> f;
    if (!o.failure.empty()) {
        rec.add_input(o.failure);
        std::ifstream in(o.failure, std::ios::binary);
        if (!in) throw DataError("cannot open " + o.failure);
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        f = failure::breakdown_from_json(body);
    }
    const auto text = render_summary(r, f);
    out << text;
    if (text_path) {
        outs.write(*text_path, text);
        outs.write(*svg_path, render_svg(r, f));
        rec.add_output(*text_path);
        rec.add_output(*svg_path);
    }
    rec.counts()["groups"] = r.groups.size();
    rec.counts()["cases"] = r.n;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"uiground: data pipeline and evaluation toolkit for UI-grounding agents", "uiground"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "INI/TOML file with option values (sections per subcommand)");
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Globals g;
    app.add_flag("--force", g.force, "overwrite existing outputs");
    app.add_option("--jobs,-j", g.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
    auto* seed_opt = app.add_option("--seed", g.seed, "sampling seed (overrides manifest seeds)");
    app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error, off")->capture_default_str();
    app.add_option("--run-record", g.run_record, "where to write the run record (default: next to the outputs)");

    IngestOpts ingest;
    auto* c_ingest = app.add_subcommand("ingest", "convert and decontaminate every source of a manifest");
    c_ingest->add_option("--manifest", ingest.manifest)->required();
    c_ingest->add_option("--out", ingest.out, "unified samples JSONL")->required();

    MixtureOpts mix;
    auto* c_mix = app.add_subcommand("mixture", "sample a training mixture by per-source fractions");
    c_mix->add_option("--manifest", mix.manifest)->required();
    c_mix->add_option("--out", mix.out, "sampled samples JSONL");
    c_mix->add_option("--realized", mix.realized, "realized manifest YAML (default: stdout)");
    c_mix->add_option("--mode", mix.mode, "count-exact or hash (overrides the manifest)");

    GenTasksOpts gt;
    auto* c_gt = app.add_subcommand("gen-tasks", "expand annotated elements into multitask samples");
    c_gt->add_option("--in", gt.in)->required();
    c_gt->add_option("--out", gt.out)->required();
    c_gt->add_option("--templates", gt.templates, "template pack YAML");
    c_gt->add_option("--ratio", gt.ratio, "annotation-direction fraction; omitted = both directions")
        ->check(CLI::Range(0.0, 1.0));
    c_gt->add_option("--split", gt.split, "count-exact or hash")->capture_default_str();
    c_gt->add_flag("--point-targets", gt.point_targets, "click points instead of boxes for agent actions");

    AugmentOpts aug;
    auto* c_aug = app.add_subcommand("augment", "annotate elements through an MLLM endpoint");
    c_aug->add_option("--manifest", aug.manifest, "augment job YAML")->required();
    c_aug->add_option("--in", aug.in)->required();
    c_aug->add_option("--out", aug.out, "samples with merged annotations")->required();
    c_aug->add_option("--results", aug.results, "per-request results JSONL (default: <out>.results.jsonl)");
    c_aug->add_option("--fields", aug.fields, "comma list of purpose, caption, expectation");
    c_aug->add_option("--endpoint", aug.endpoint);
    c_aug->add_option("--cache-dir", aug.cache_dir);
    c_aug->add_option("--model", aug.model);

    EvalOpts ev;
    auto* c_eval = app.add_subcommand("eval", "score predictions against a benchmark");
    c_eval->add_option("--benchmark", ev.benchmark)->required();
    c_eval->add_option("--pred", ev.pred, "prediction JSONL (replay backend)");
    c_eval->add_option("--backend", ev.backend, "replay, center, random or remote")->capture_default_str();
    c_eval->add_option("--endpoint", ev.endpoint, "remote inference URL");
    c_eval->add_option("--timeout-ms", ev.timeout_ms)->capture_default_str();
    c_eval->add_option("--image-root", ev.image_root, "default: the benchmark's directory");
    c_eval->add_flag("--missing-as-fail", ev.missing_as_fail);
    c_eval->add_option("--out-dir", ev.out_dir, "writes eval.json and eval.txt");

    AnalyzeOpts an;
    auto* c_an = app.add_subcommand("analyze", "classify failures and measure positional bias");
    c_an->add_option("--benchmark", an.benchmark)->required();
    c_an->add_option("--pred", an.pred)->required();
    c_an->add_option("--margin", an.margin)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c_an->add_option("--grid", an.grid)->capture_default_str()->check(CLI::Range(1, 100));
    c_an->add_option("--tau", an.tau)->capture_default_str();
    c_an->add_flag("--missing-as-fail", an.missing_as_fail);
    c_an->add_option("--out-dir", an.out_dir, "writes failure.json and failure.txt");

    SignificanceOpts sig;
    auto* c_sig = app.add_subcommand("significance", "2-sigma accuracy thresholds");
    c_sig->add_option("--n", sig.n, "number of test cases");
    c_sig->add_option("--p", sig.p, "observed accuracy")->check(CLI::Range(0.0, 1.0));
    c_sig->add_option("--compare", sig.compare, "two eval.json reports")->expected(2);

    ReportOpts rep;
    auto* c_rep = app.add_subcommand("report", "render evaluation and failure results");
    c_rep->add_option("--eval", rep.eval, "eval.json")->required();
    c_rep->add_option("--failure", rep.failure, "failure.json");
    c_rep->add_option("--out-dir", rep.out_dir, "writes summary.txt and summary.svg");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        if (!app.get_subcommands().empty()) err << app.get_subcommands().front()->help();
        else err << app.help();
        return kExitUsage;
    }
    g.seed_given = seed_opt->count() > 0;

    CLI::App* sub = app.get_subcommands().front();
    RunRecord rec(sub->get_name(), args);
    std::string record_path = g.run_record;
    if (record_path.empty()) {
        if (sub == c_ingest) record_path = ingest.out + ".run.json";
        else if (sub == c_mix && !mix.out.empty()) record_path = mix.out + ".run.json";
        else if (sub == c_mix && !mix.realized.empty()) record_path = mix.realized + ".run.json";
        else if (sub == c_gt) record_path = gt.out + ".run.json";
        else if (sub == c_aug) record_path = aug.out + ".run.json";
        else if (sub == c_eval && !ev.out_dir.empty()) record_path = dir_file(ev.out_dir, "run.json");
        else if (sub == c_an && !an.out_dir.empty()) record_path = dir_file(an.out_dir, "run.json");
        else if (sub == c_rep && !rep.out_dir.empty()) record_path = dir_file(rep.out_dir, "run.json");
    }

    Outputs outs(g.force);
    int code = kExitOk;
    bool record_ok = false;
    try {
        set_logging(g.log_level);
        if (!record_path.empty()) outs.claim(record_path);
        record_ok = true;
        if (sub == c_ingest) cmd_ingest(ingest, g, outs, rec, out);
        else if (sub == c_mix) cmd_mixture(mix, g, outs, rec, out);
        else if (sub == c_gt) cmd_gen_tasks(gt, g, outs, rec, out);
        else if (sub == c_aug) cmd_augment(aug, g, outs, rec, out);
        else if (sub == c_eval) cmd_eval(ev, g, outs, rec, out);
        else if (sub == c_an) cmd_analyze(an, g, outs, rec, out);
        else if (sub == c_sig) cmd_significance(sig, g, outs, rec, out);
        else if (sub == c_rep) cmd_report(rep, g, outs, rec, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        code = kExitUsage;
        rec.fail(code, e.what());
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        code = kExitUsage;
        rec.fail(code, e.what());
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        code = kExitUsage;
        rec.fail(code, e.what());
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << "\n";
        code = kExitData;
        rec.fail(code, e.what());
    }

    // The record is written even for failed runs, unless claiming its path was
    // what failed.
    if (record_ok && !record_path.empty()) {
        try {
            outs.write(record_path, rec.dump());
        } catch (const std::exception& e) {
            err << "cannot write run record: " << e.what() << "\n";
            if (code == kExitOk) code = kExitData;
        }
    } else if (record_path.empty()) {
        err << rec.dump();
    }
    return code;
}

}  // namespace uiground::cli
