// t3: command-line front end for the narration pipeline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "t3/t3.hpp"

namespace {

using t3::Json;

/// Flags shared by analyze and narrate. Optionals stay empty unless given so
/// they only override the config file when present.
struct PipelineFlags {
    std::string config;
    std::optional<std::string> input, time_col, value_col, entity_col, entity, measure, unit, domain, log_transform;
    std::optional<double> max_error;
    std::optional<std::string> algorithm;
    std::optional<std::string> n_regimes;
    std::optional<std::size_t> window;
    std::optional<std::string> metric;
    std::optional<double> min_prominence;
    std::optional<std::size_t> max_peaks;
    std::optional<std::string> mode, endpoint, strategy;
    std::optional<std::size_t> k;
    std::optional<double> p;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_tokens;
    std::optional<long long> timeout_ms;
    std::optional<std::string> templates;
    std::optional<std::string> out;
};

void add_pipeline_flags(CLI::App& app, PipelineFlags& f, bool narration)
{
    app.add_option("--config", f.config, "Declarative JSON config; flags override its keys");
    app.add_option("--input", f.input, "Input CSV file");
    app.add_option("--time-col", f.time_col, "Time column name (default: date)");
    app.add_option("--value-col", f.value_col, "Value column name (default: value)");
    app.add_option("--entity-col", f.entity_col, "Entity column name (default: entity)");
    app.add_option("--entity", f.entity, "Entity to select and name in the narrative");
    app.add_option("--measure", f.measure, "Measure name, e.g. 'daily new cases'");
    app.add_option("--unit", f.unit, "Unit of the measure");
    app.add_option("--domain", f.domain, "Template domain (default: generic)");
    app.add_option("--log-transform", f.log_transform, "auto, on or off (default: auto)")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    app.add_option("--max-error", f.max_error, "Per-segment SSE threshold (default: 2.75)");
    app.add_option("--algorithm", f.algorithm, "Segmentation algorithm (default: swab)")
        ->check(CLI::IsMember({"sliding_window", "bottom_up", "swab"}));
    app.add_option("--n-regimes", f.n_regimes, "Number of regimes or 'auto'");
    app.add_option("--window", f.window, "Matrix profile sub-sequence length");
    app.add_option("--metric", f.metric, "Matrix profile distance (default: euclidean)")
        ->check(CLI::IsMember({"z_normalized", "euclidean"}));
    app.add_option("--min-prominence", f.min_prominence, "Minimum peak prominence (default: 5% of the range)");
    app.add_option("--max-peaks", f.max_peaks, "Maximum number of peaks (default: 3)");
    app.add_option("--out", f.out, "Output directory; documents go to stdout when omitted");
    if (!narration)
        return;
    app.add_option("--mode", f.mode, "Narration mode (default: templated)")
        ->check(CLI::IsMember({"templated", "neural", "neural-with-fallback"}));
    app.add_option("--endpoint", f.endpoint, "Backend base URL (default: $T3_ENDPOINT)");
    app.add_option("--strategy", f.strategy, "Decoding strategy (default: top_p)")
        ->check(CLI::IsMember({"basic", "top_k", "top_p"}));
    app.add_option("--k", f.k, "Top-k cutoff (default: 50)");
    app.add_option("--p", f.p, "Top-p mass (default: 0.92)");
    app.add_option("--seed", f.seed, "Decoding seed (default: 0)");
    app.add_option("--max-tokens", f.max_tokens, "Backend token budget (default: 512)");
    app.add_option("--timeout-ms", f.timeout_ms, "Backend timeout in milliseconds (default: 30000)");
    app.add_option("--templates", f.templates, "Template file overriding the built-in domain set");
}

t3::PipelineConfig resolve(const PipelineFlags& f)
{
    t3::PipelineConfig c;
    if (!f.config.empty())
        c = t3::load_config(f.config);
    auto bad = [](const std::string& what) { t3::fail(t3::ErrorKind::InvalidConfig, "cli", what); };
    if (f.input)
        c.input = *f.input;
    if (f.time_col)
        c.schema.time_column = *f.time_col;
    if (f.value_col)
        c.schema.value_column = *f.value_col;
    if (f.entity_col)
        c.schema.entity_column = *f.entity_col;
    if (f.entity)
        c.schema.entity = *f.entity;
    if (f.measure)
        c.schema.measure.name = *f.measure;
    if (f.unit)
        c.schema.measure.unit = *f.unit;
    if (f.domain)
        c.domain = *f.domain;
    if (f.log_transform)
        c.log_transform = *t3::parse_log_mode(*f.log_transform);
    if (f.max_error)
        c.max_error = *f.max_error;
    if (f.algorithm)
        c.algorithm = *t3::parse_algorithm(*f.algorithm);
    if (f.n_regimes) {
        if (*f.n_regimes == "auto") {
            c.n_regimes.reset();
        } else {
            std::size_t n = 0;
            const auto* end = f.n_regimes->data() + f.n_regimes->size();
            const auto [ptr, ec] = std::from_chars(f.n_regimes->data(), end, n);
            if (ec != std::errc() || ptr != end)
                bad("--n-regimes must be a positive integer or 'auto'");
            c.n_regimes = n;
        }
    }
    if (f.window)
        c.window = *f.window;
    if (f.metric)
        c.regime_metric = *t3::parse_metric(*f.metric);
    if (f.min_prominence)
        c.min_prominence = *f.min_prominence;
    if (f.max_peaks)
        c.max_peaks = *f.max_peaks;
    if (f.mode)
        c.mode = *t3::parse_mode(*f.mode);
    if (f.endpoint)
        c.endpoint = *f.endpoint;
    if (f.strategy)
        c.decoding.strategy = *t3::parse_strategy(*f.strategy);
    if (f.k)
        c.decoding.k = *f.k;
    if (f.p)
        c.decoding.p = *f.p;
    if (f.seed)
        c.decoding.seed = *f.seed;
    if (f.max_tokens)
        c.decoding.max_tokens = *f.max_tokens;
    if (f.timeout_ms)
        c.timeout = std::chrono::milliseconds(*f.timeout_ms);
    if (f.templates)
        c.templates = *f.templates;
    if (f.out)
        c.out = *f.out;
    if (c.schema.measure.name.empty())
        c.schema.measure.name = c.schema.value_column;
    return c;
}

/// Writes `doc` to out/name, or to stdout when no output directory is set.
void emit(const std::filesystem::path& out, const std::string& name, const std::string& content)
{
    if (out.empty()) {
        std::cout << content;
        return;
    }
    t3::write_atomic(out / name, content);
    std::cerr << "wrote " << (out / name).string() << "\n";
}

void warn_all(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << "\n";
}

int cmd_analyze(const PipelineFlags& flags)
{
    const auto config = resolve(flags);
    const auto analysis = t3::run_analysis(config);
    warn_all(analysis.warnings);
    emit(config.out, "analysis.json", t3::dump_document(t3::analysis_to_json(analysis, config)));
    return 0;
}

int cmd_narrate(const PipelineFlags& flags, const std::string& analysis_path)
{
    const auto config = resolve(flags);
    std::optional<t3::KnowledgeGraph> graph;
    std::string domain = config.domain;
    std::string source;
    if (!analysis_path.empty()) {
        std::ifstream in(analysis_path);
        if (!in)
            t3::fail(t3::ErrorKind::Io, "cli", "cannot open analysis document " + analysis_path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            t3::fail(t3::ErrorKind::InvalidConfig, "cli", "analysis document " + analysis_path + ": " + e.what());
        }
        if (doc.value("schema_version", "") != t3::kAnalysisSchema)
            t3::fail(t3::ErrorKind::InvalidConfig, "cli", "analysis document " + analysis_path + " has an unknown schema");
        graph = t3::graph_from_json(doc.at("graph"));
        if (!flags.domain)
            domain = doc.value("domain", domain);
        source = analysis_path;
    } else {
        const auto analysis = t3::run_analysis(config);
        warn_all(analysis.warnings);
        if (!config.out.empty())
            emit(config.out, "analysis.json", t3::dump_document(t3::analysis_to_json(analysis, config)));
        graph = analysis.graph;
        source = config.input.generic_string();
    }
    const auto request = t3::narration_request(config, domain);
    const auto output = t3::narrate_graph(*graph, request);
    warn_all(output.result.warnings);
    emit(config.out, "narrative.json",
        t3::dump_document(t3::narrative_to_json(output, t3::to_string(config.mode), source)));
    return 0;
}

struct BenchFlags {
    std::string manifest = "fixtures/manifest.json";
    std::vector<std::string> datasets;
    double max_error = t3::kDefaultMaxError;
    std::vector<double> sweep;
    std::size_t synthetic = 0;
    std::uint64_t seed = 1;
    std::string metric = "euclidean";
    std::optional<std::size_t> window;
    std::optional<std::size_t> n_regimes;
    std::string out;
};

int cmd_bench_seg(const BenchFlags& f)
{
    Json doc;
    if (f.synthetic == 0) {
        const auto manifest = t3::load_manifest(f.manifest);
        const auto rows = t3::bench_segmentation(manifest, f.max_error, f.datasets);
        std::cout << t3::format_seg_table(t3::summarize_segmentation(rows));
        doc = t3::seg_bench_to_json(rows, f.max_error);
        if (!f.sweep.empty()) {
            Json sweeps = Json::array();
            for (const auto& ds : manifest.datasets) {
                if (!f.datasets.empty() && std::find(f.datasets.begin(), f.datasets.end(), ds.name) == f.datasets.end())
                    continue;
                for (const auto& entity : ds.entities) {
                    const auto values = t3::working_values(t3::load_fixture_series(ds, entity));
                    Json curve = Json::array();
                    for (const auto& pt : t3::sweep_threshold(values, t3::Algorithm::swab, f.sweep))
                        curve.push_back(Json{{"max_error", pt.max_error}, {"total_sse", pt.total_sse}, {"segments", pt.segments}});
                    sweeps.push_back(Json{{"dataset", ds.name}, {"entity", entity}, {"algorithm", "swab"}, {"curve", curve}});
                }
            }
            doc["sweep"] = std::move(sweeps);
        }
    } else {
        const auto study = t3::segmentation_ordering_study(f.synthetic, f.seed, f.max_error);
        std::printf("synthetic runs: %zu  swab <= sliding_window: %zu  bottom_up <= sliding_window: %zu\n",
            study.trials.size(), study.swab_not_worse, study.bottom_up_not_worse);
        doc["schema_version"] = std::string(t3::kSegBenchSchema);
        doc["max_error"] = f.max_error;
        doc["synthetic_runs"] = study.trials.size();
        doc["swab_not_worse"] = study.swab_not_worse;
        doc["bottom_up_not_worse"] = study.bottom_up_not_worse;
        Json trials = Json::array();
        for (const auto& t : study.trials)
            trials.push_back(Json{{"seed", t.seed}, {"sliding_window_sse", t.sliding_window_sse},
                {"bottom_up_sse", t.bottom_up_sse}, {"swab_sse", t.swab_sse}});
        doc["trials"] = std::move(trials);
    }
    if (!f.out.empty())
        emit(f.out, "bench_seg.json", t3::dump_document(doc));
    return 0;
}

int cmd_bench_regime(const BenchFlags& f)
{
    const auto metric = *t3::parse_metric(f.metric);
    Json doc;
    if (f.synthetic == 0) {
        const auto manifest = t3::load_manifest(f.manifest);
        const auto rows = t3::bench_regimes(manifest, metric, f.window, f.n_regimes, f.datasets);
        doc = t3::regime_bench_to_json(rows, metric);
        std::printf("%-20s %-28s %7s %8s  boundaries\n", "dataset", "entity", "window", "sigma");
        for (const auto& r : rows) {
            std::string cuts;
            for (std::size_t i = 1; i < r.regimes.size(); ++i)
                cuts += (i > 1 ? "," : "") + std::to_string(r.regimes[i].start_index);
            std::printf("%-20s %-28s %7zu %8.4f  %s\n", r.dataset.c_str(), r.entity.c_str(), r.window, r.sigma, cuts.c_str());
        }
        for (const auto& d : doc["datasets"])
            std::printf("mean sigma %-20s %.4f over %zu series\n", d["dataset"].get<std::string>().c_str(),
                d["mean_sigma"].get<double>(), d["series"].get<std::size_t>());
    } else {
        const std::size_t window = f.window.value_or(20);
        const auto study = t3::planted_regime_study(f.synthetic, f.seed, 400, window, 3.0, metric);
        std::printf("planted runs: %zu  boundary within +/-%zu: %zu\n", study.trials.size(), window, study.hits);
        doc["schema_version"] = std::string(t3::kRegimeBenchSchema);
        doc["metric"] = f.metric;
        doc["planted_runs"] = study.trials.size();
        doc["window"] = window;
        doc["hits"] = study.hits;
        Json trials = Json::array();
        for (const auto& t : study.trials)
            trials.push_back(Json{{"seed", t.seed}, {"truth", t.truth}, {"detected", t.detected}, {"hit", t.hit}});
        doc["trials"] = std::move(trials);
    }
    if (!f.out.empty())
        emit(f.out, "bench_regime.json", t3::dump_document(doc));
    return 0;
}

int cmd_eval(const std::string& text_arg, const std::string& file, std::optional<double> baseline_ttr, const std::string& out)
{
    std::string text = text_arg;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in)
            t3::fail(t3::ErrorKind::Io, "cli", "cannot open text file " + file);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    const auto report = t3::evaluate_text(text);
    Json doc;
    doc["schema_version"] = std::string(t3::kMetricsSchema);
    doc["metrics"] = t3::metrics_to_json(report);
    if (baseline_ttr)
        doc["ttr_gain_percent"] = t3::ttr_gain(report.ttr, *baseline_ttr);
    emit(out, "metrics.json", t3::dump_document(doc));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"t3: time-series narration pipeline"};
    app.require_subcommand(1);

    PipelineFlags analyze_flags;
    auto* analyze = app.add_subcommand("analyze", "Extract trends, regimes and peaks into an analysis document");
    add_pipeline_flags(*analyze, analyze_flags, false);

    PipelineFlags narrate_flags;
    std::string analysis_path;
    auto* narrate = app.add_subcommand("narrate", "Realize the knowledge graph as text and score it");
    add_pipeline_flags(*narrate, narrate_flags, true);
    narrate->add_option("--analysis", analysis_path, "Existing analysis document instead of --input");

    BenchFlags seg_flags;
    auto* bench_seg = app.add_subcommand("bench-seg", "Compare segmentation algorithms over the fixtures");
    bench_seg->add_option("--fixtures", seg_flags.manifest, "Fixture manifest")->capture_default_str();
    bench_seg->add_option("--dataset", seg_flags.datasets, "Restrict to these datasets");
    bench_seg->add_option("--max-error", seg_flags.max_error, "Per-segment SSE threshold")->capture_default_str();
    bench_seg->add_option("--sweep", seg_flags.sweep, "Threshold values for an SSE-vs-threshold sweep")->delimiter(',');
    bench_seg->add_option("--synthetic", seg_flags.synthetic, "Run N seeded synthetic trials instead of fixtures");
    bench_seg->add_option("--seed", seg_flags.seed, "First synthetic seed")->capture_default_str();
    bench_seg->add_option("--out", seg_flags.out, "Output directory for the benchmark document");

    BenchFlags regime_flags;
    auto* bench_regime = app.add_subcommand("bench-regime", "Regime detection and sigma over the fixtures");
    bench_regime->add_option("--fixtures", regime_flags.manifest, "Fixture manifest")->capture_default_str();
    bench_regime->add_option("--dataset", regime_flags.datasets, "Restrict to these datasets");
    bench_regime->add_option("--metric", regime_flags.metric, "Matrix profile distance")
        ->check(CLI::IsMember({"z_normalized", "euclidean"}))
        ->capture_default_str();
    bench_regime->add_option("--window", regime_flags.window, "Sub-sequence length (default: per-series auto)");
    bench_regime->add_option("--n-regimes", regime_flags.n_regimes, "Override the manifest's regime counts");
    bench_regime->add_option("--synthetic", regime_flags.synthetic, "Run N planted two-level trials instead of fixtures");
    bench_regime->add_option("--seed", regime_flags.seed, "First synthetic seed")->capture_default_str();
    bench_regime->add_option("--out", regime_flags.out, "Output directory for the benchmark document");

    std::string eval_text, eval_file, eval_out;
    std::optional<double> baseline_ttr;
    auto* eval = app.add_subcommand("eval", "Readability, diversity and grammar metrics for a text");
    auto* text_opt = eval->add_option("--text", eval_text, "Text to score");
    auto* file_opt = eval->add_option("--text-file", eval_file, "File holding the text to score");
    text_opt->excludes(file_opt);
    eval->add_option("--baseline-ttr", baseline_ttr, "Report the relative TTR gain over this baseline");
    eval->add_option("--out", eval_out, "Output directory; stdout when omitted");

    std::string vectors_out;
    auto* vectors = app.add_subcommand("decode-vectors", "Emit decoding conformance vectors for backends");
    vectors->add_option("--out", vectors_out, "Output directory; stdout when omitted");

    std::string template_domain = "generic";
    auto* templates = app.add_subcommand("templates", "Print a built-in template set");
    templates->add_option("--domain", template_domain, "Domain name")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze)
            return cmd_analyze(analyze_flags);
        if (*narrate)
            return cmd_narrate(narrate_flags, analysis_path);
        if (*bench_seg)
            return cmd_bench_seg(seg_flags);
        if (*bench_regime)
            return cmd_bench_regime(regime_flags);
        if (*eval) {
            if (!*text_opt && !*file_opt)
                t3::fail(t3::ErrorKind::InvalidConfig, "cli", "eval needs --text or --text-file");
            return cmd_eval(eval_text, eval_file, baseline_ttr, eval_out);
        }
        if (*vectors) {
            emit(vectors_out, "decode_vectors.json", t3::dump_document(t3::decode_conformance_vectors()));
            return 0;
        }
        if (*templates) {
            for (const auto& b : t3::kBuiltinTemplates)
                if (b.domain == template_domain) {
                    std::cout << b.text;
                    return 0;
                }
            t3::fail(t3::ErrorKind::InvalidConfig, "cli", "no built-in template set for domain '" + template_domain + "'");
        }
    } catch (const t3::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: cli: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
