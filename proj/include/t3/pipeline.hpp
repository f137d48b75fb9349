#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "t3/decode.hpp"
#include "t3/error.hpp"
#include "t3/features.hpp"
#include "t3/ingest.hpp"
#include "t3/kg.hpp"
#include "t3/metrics.hpp"
#include "t3/narrate.hpp"
#include "t3/regime.hpp"
#include "t3/segment.hpp"
#include "t3/synthetic.hpp"

namespace t3 {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kAnalysisSchema = "t3.analysis/1";
inline constexpr std::string_view kNarrativeSchema = "t3.narrative/1";
inline constexpr std::string_view kMetricsSchema = "t3.metrics/1";

enum class LogMode { automatic, on, off };

constexpr std::string_view to_string(LogMode m) noexcept
{
    switch (m) {
    case LogMode::automatic: return "auto";
    case LogMode::on: return "on";
    case LogMode::off: return "off";
    }
    return "auto";
}

inline std::optional<LogMode> parse_log_mode(std::string_view s)
{
    if (s == "auto")
        return LogMode::automatic;
    if (s == "on")
        return LogMode::on;
    if (s == "off")
        return LogMode::off;
    return std::nullopt;
}

struct PipelineConfig {
    std::filesystem::path input;
    SeriesSchema schema;
    std::string domain = "generic";
    LogMode log_transform = LogMode::automatic;

    double max_error = kDefaultMaxError;
    Algorithm algorithm = Algorithm::swab;

    std::optional<std::size_t> window;
    std::optional<std::size_t> n_regimes; // empty = auto
    ProfileMetric regime_metric = ProfileMetric::euclidean;

    std::optional<double> min_prominence; // empty = 5% of the range
    std::size_t max_peaks = kDefaultMaxPeaks;

    NarrationMode mode = NarrationMode::templated;
    std::string endpoint;
    DecodingConfig decoding;
    std::chrono::milliseconds timeout{30000};
    std::optional<std::filesystem::path> templates;

    std::filesystem::path out;
};

/// Endpoint default from the T3_ENDPOINT environment variable.
inline std::string default_endpoint()
{
    const char* env = std::getenv("T3_ENDPOINT");
    return env ? std::string(env) : std::string();
}

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key) && !j[key].is_null())
        out = j[key].get<T>();
}

} // namespace detail

/// Reads a declarative JSON config. Keys mirror the long CLI flag names with
/// dashes replaced by underscores; unknown keys are rejected.
inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {})
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cli", "cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidConfig, "cli", "config " + path.string() + ": " + e.what());
    }
    static const std::vector<std::string> known = {"input", "time_col", "value_col", "entity_col", "entity", "measure",
        "unit", "domain", "log_transform", "max_error", "algorithm", "window", "n_regimes", "metric", "min_prominence",
        "max_peaks", "mode", "endpoint", "strategy", "k", "p", "seed", "max_tokens", "timeout_ms", "templates", "out"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail(ErrorKind::InvalidConfig, "cli", "unknown config key '" + key + "'");

    PipelineConfig c = std::move(base);
    try {
        std::string s;
        if (j.contains("input"))
            c.input = j["input"].get<std::string>();
        detail::read_opt(j, "time_col", c.schema.time_column);
        detail::read_opt(j, "value_col", c.schema.value_column);
        detail::read_opt(j, "entity_col", c.schema.entity_column);
        detail::read_opt(j, "entity", c.schema.entity);
        detail::read_opt(j, "measure", c.schema.measure.name);
        detail::read_opt(j, "unit", c.schema.measure.unit);
        detail::read_opt(j, "domain", c.domain);
        if (j.contains("log_transform")) {
            const auto m = parse_log_mode(j["log_transform"].get<std::string>());
            if (!m)
                fail(ErrorKind::InvalidConfig, "cli", "log_transform must be auto, on or off");
            c.log_transform = *m;
        }
        detail::read_opt(j, "max_error", c.max_error);
        if (j.contains("algorithm")) {
            const auto a = parse_algorithm(j["algorithm"].get<std::string>());
            if (!a || *a == Algorithm::optimal_dp)
                fail(ErrorKind::InvalidConfig, "cli", "algorithm must be sliding_window, bottom_up or swab");
            c.algorithm = *a;
        }
        if (j.contains("window") && !j["window"].is_null())
            c.window = j["window"].get<std::size_t>();
        if (j.contains("n_regimes") && !j["n_regimes"].is_null()) {
            if (j["n_regimes"].is_string() && j["n_regimes"].get<std::string>() == "auto")
                c.n_regimes.reset();
            else
                c.n_regimes = j["n_regimes"].get<std::size_t>();
        }
        if (j.contains("metric")) {
            const auto m = parse_metric(j["metric"].get<std::string>());
            if (!m)
                fail(ErrorKind::InvalidConfig, "cli", "metric must be z_normalized or euclidean");
            c.regime_metric = *m;
        }
        if (j.contains("min_prominence") && !j["min_prominence"].is_null())
            c.min_prominence = j["min_prominence"].get<double>();
        detail::read_opt(j, "max_peaks", c.max_peaks);
        if (j.contains("mode")) {
            const auto m = parse_mode(j["mode"].get<std::string>());
            if (!m)
                fail(ErrorKind::InvalidConfig, "cli", "mode must be templated, neural or neural-with-fallback");
            c.mode = *m;
        }
        detail::read_opt(j, "endpoint", c.endpoint);
        if (j.contains("strategy")) {
            const auto st = parse_strategy(j["strategy"].get<std::string>());
            if (!st)
                fail(ErrorKind::InvalidConfig, "cli", "strategy must be basic, top_k or top_p");
            c.decoding.strategy = *st;
        }
        detail::read_opt(j, "k", c.decoding.k);
        detail::read_opt(j, "p", c.decoding.p);
        detail::read_opt(j, "seed", c.decoding.seed);
        detail::read_opt(j, "max_tokens", c.decoding.max_tokens);
        if (j.contains("timeout_ms"))
            c.timeout = std::chrono::milliseconds(j["timeout_ms"].get<std::int64_t>());
        if (j.contains("templates") && !j["templates"].is_null())
            c.templates = j["templates"].get<std::string>();
        if (j.contains("out"))
            c.out = j["out"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidConfig, "cli", "config " + path.string() + ": " + e.what());
    }
    return c;
}

/// Writes via a sibling temporary and rename so readers never observe a
/// partial document.
inline void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(ErrorKind::Io, "cli", "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            fail(ErrorKind::Io, "cli", "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        fail(ErrorKind::Io, "cli", "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

// --- Stage I ----------------------------------------------------------------

struct Analysis {
    TimeSeries raw;
    TimeSeries working; // log domain when the transform applied
    bool log_applied = false;
    SeriesStats raw_stats;
    SegmentationResult segments;
    SegmentationResult trends;
    std::size_t window = 0;
    ProfileMetric metric = ProfileMetric::euclidean;
    std::vector<Regime> regimes;
    double sigma = 0.0;
    std::vector<Peak> peaks;
    Extrema extrema;
    KnowledgeGraph graph;
    std::string linearized;
    std::vector<std::string> warnings;
};

/// Auto regime count: three when the series is long enough for three
/// regimes of the chosen window, otherwise as many as fit.
inline std::size_t auto_regime_count(std::size_t n, std::size_t window)
{
    return std::clamp<std::size_t>(n / (2 * window), 1, 3);
}

/// ingest -> log transform -> segment -> consolidate -> regimes -> peaks ->
/// graph, on an already loaded series.
inline Analysis analyze_series(const TimeSeries& raw, const PipelineConfig& config)
{
    std::vector<std::string> warnings;
    bool log_applied = false;
    std::optional<TimeSeries> working;
    switch (config.log_transform) {
    case LogMode::on:
        working = log_transform(raw);
        log_applied = true;
        break;
    case LogMode::off: working = raw; break;
    case LogMode::automatic:
        if (has_negative_values(raw)) {
            working = raw;
            warnings.push_back("series has negative values; log transform skipped, analysis runs on raw values");
        } else {
            working = log_transform(raw);
            log_applied = true;
        }
        break;
    }
    if (raw.irregularly_spaced())
        warnings.push_back("timestamps are irregularly spaced; regression uses index positions");

    const auto stats = summary_stats(raw);
    auto segments = segment_series(working->values(), config.algorithm, config.max_error);
    auto trends = consolidate(segments, working->values());

    const std::size_t n = raw.size();
    std::size_t window = config.window.value_or(default_regime_window(n));
    std::vector<Regime> regimes;
    if (!config.window && 2 * window > n) {
        window = std::max<std::size_t>(3, n / 2);
    }
    if (n < 2 * window || window < 3) {
        regimes.push_back(make_regime(working->values(), 0, n - 1));
        warnings.push_back("series too short for a matrix profile; reporting a single regime");
    } else {
        // A flat series has nothing to split, whatever its length.
        const bool flat = summarize(working->values()).std == 0.0;
        const std::size_t count = config.n_regimes.value_or(flat ? 1 : auto_regime_count(n, window));
        if (count == 1) {
            regimes.push_back(make_regime(working->values(), 0, n - 1));
        } else {
            const auto mp = matrix_profile(working->values(), window, config.regime_metric);
            if (mp.constant_subsequences > 0)
                warnings.push_back(std::to_string(mp.constant_subsequences)
                    + " constant sub-sequences were normalized as zero vectors");
            regimes = detect_regimes(working->values(), mp, count);
        }
    }
    const double sigma = regime_sigma(regimes, working->values());

    const auto [lo, hi] = std::minmax_element(raw.values().begin(), raw.values().end());
    const double min_prom = config.min_prominence.value_or(kDefaultProminenceFraction * (*hi - *lo));
    auto peaks = n >= 3 ? detect_peaks(raw, min_prom, config.max_peaks) : std::vector<Peak>{};
    const auto extrema = global_extrema(raw);

    auto graph = build_graph(raw, stats, trends, regimes, peaks);
    auto linearized = linearize(graph);
    return Analysis{raw, *working, log_applied, stats, std::move(segments), std::move(trends), window,
        config.regime_metric, std::move(regimes), sigma, std::move(peaks), extrema, std::move(graph),
        std::move(linearized), std::move(warnings)};
}

inline Analysis run_analysis(const PipelineConfig& config)
{
    if (config.input.empty())
        fail(ErrorKind::InvalidConfig, "cli", "no input file given (--input)");
    if (!std::filesystem::exists(config.input))
        fail(ErrorKind::Io, "ingest", "input file not found: " + config.input.string());
    return analyze_series(load_series(config.input, config.schema), config);
}

// --- documents ---------------------------------------------------------------

inline Json segment_to_json(const Segment& s, const TimeSeries& ts)
{
    Json j;
    j["start"] = s.start_index;
    j["end"] = s.end_index;
    j["start_time"] = format_iso8601(ts.timestamps()[s.start_index]);
    j["end_time"] = format_iso8601(ts.timestamps()[s.end_index]);
    j["slope"] = s.slope;
    j["intercept"] = s.intercept;
    j["sse"] = s.sse;
    j["direction"] = std::string(to_string(s.direction));
    return j;
}

inline Json segmentation_to_json(const SegmentationResult& r, const TimeSeries& ts)
{
    Json j;
    j["algorithm"] = std::string(to_string(r.algorithm));
    j["max_error"] = r.max_error;
    j["consolidated"] = r.consolidated;
    j["segment_count"] = r.segments.size();
    j["total_sse"] = r.total_sse;
    j["r_squared"] = r.r_squared;
    Json segs = Json::array();
    for (const auto& s : r.segments)
        segs.push_back(segment_to_json(s, ts));
    j["segments"] = std::move(segs);
    return j;
}

inline Json graph_to_json(const KnowledgeGraph& kg)
{
    Json triples = Json::array();
    for (const auto& t : kg.triples())
        triples.push_back(Json::array({t.head, t.relation, t.tail}));
    return triples;
}

inline KnowledgeGraph graph_from_json(const nlohmann::json& triples)
{
    std::vector<Triple> out;
    for (const auto& t : triples) {
        if (!t.is_array() || t.size() != 3)
            fail(ErrorKind::InvalidConfig, "cli", "graph triples must be [head, relation, tail] arrays");
        out.push_back(Triple{t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
    }
    return KnowledgeGraph(std::move(out));
}

inline Json analysis_to_json(const Analysis& a, const PipelineConfig& config)
{
    Json doc;
    doc["schema_version"] = std::string(kAnalysisSchema);
    doc["input"] = config.input.generic_string();
    doc["domain"] = config.domain;
    doc["entity"] = a.raw.entity();
    doc["measure"] = a.raw.measure().name;
    doc["unit"] = a.raw.measure().unit;
    doc["root_entity"] = a.graph.root_entity();

    Json cfg;
    cfg["max_error"] = config.max_error;
    cfg["algorithm"] = std::string(to_string(config.algorithm));
    cfg["window"] = a.window;
    cfg["n_regimes"] = config.n_regimes ? Json(*config.n_regimes) : Json("auto");
    cfg["metric"] = std::string(to_string(a.metric));
    cfg["log_transform"] = std::string(to_string(config.log_transform));
    doc["config"] = std::move(cfg);

    Json stats;
    stats["domain"] = "raw";
    stats["n"] = a.raw_stats.n;
    stats["mean"] = a.raw_stats.mean;
    stats["std"] = a.raw_stats.std;
    doc["stats"] = std::move(stats);

    Json transform;
    transform["applied"] = a.log_applied;
    transform["function"] = a.log_applied ? "ln(1+x)" : "identity";
    doc["transform"] = std::move(transform);

    doc["segmentation"] = segmentation_to_json(a.segments, a.raw);
    doc["trends"] = segmentation_to_json(a.trends, a.raw);

    Json regimes;
    regimes["window"] = a.window;
    regimes["metric"] = std::string(to_string(a.metric));
    regimes["value_domain"] = a.log_applied ? "log" : "raw";
    regimes["sigma"] = a.sigma;
    Json list = Json::array();
    for (const auto& r : a.regimes) {
        Json jr;
        jr["start"] = r.start_index;
        jr["end"] = r.end_index;
        jr["start_time"] = format_iso8601(a.raw.timestamps()[r.start_index]);
        jr["end_time"] = format_iso8601(a.raw.timestamps()[r.end_index]);
        jr["mean"] = r.mean;
        jr["std"] = r.std;
        list.push_back(std::move(jr));
    }
    regimes["regimes"] = std::move(list);
    doc["regimes"] = std::move(regimes);

    Json peaks = Json::array();
    for (const auto& p : a.peaks) {
        Json jp;
        jp["index"] = p.index;
        jp["time"] = format_iso8601(p.timestamp);
        jp["value"] = p.value;
        jp["prominence"] = p.prominence;
        peaks.push_back(std::move(jp));
    }
    doc["peaks"] = std::move(peaks);

    auto point = [](const ExtremePoint& e) {
        Json j;
        j["index"] = e.index;
        j["time"] = format_iso8601(e.timestamp);
        j["value"] = e.value;
        return j;
    };
    doc["extrema"] = Json{{"max", point(a.extrema.max)}, {"min", point(a.extrema.min)}};
    doc["graph"] = graph_to_json(a.graph);
    doc["linearized"] = a.linearized;
    doc["warnings"] = a.warnings;
    return doc;
}

inline Json metrics_to_json(const MetricsReport& m)
{
    Json j;
    j["re"] = m.re;
    j["ttr"] = m.ttr;
    j["g"] = m.g;
    j["word_count"] = m.word_count;
    j["sentence_count"] = m.sentence_count;
    j["type_count"] = m.type_count;
    j["checker"] = "naive";
    return j;
}

// --- Stage II ---------------------------------------------------------------

struct NarrationOutput {
    NarrationResult result;
    MetricsReport metrics;
};

inline NarrationRequest narration_request(const PipelineConfig& config, std::string_view domain)
{
    NarrationRequest req;
    req.mode = config.mode;
    req.templates = config.templates ? TemplateSet::load(*config.templates) : TemplateSet::builtin(domain);
    req.endpoint = config.endpoint.empty() ? default_endpoint() : config.endpoint;
    req.decoding = config.decoding;
    req.timeout = config.timeout;
    return req;
}

inline NarrationOutput narrate_graph(const KnowledgeGraph& kg, const NarrationRequest& request)
{
    auto result = narrate(kg, request);
    auto metrics = evaluate_text(result.narrative.text);
    return {std::move(result), metrics};
}

inline Json narrative_to_json(const NarrationOutput& out, std::string_view mode, std::string_view source)
{
    const auto& n = out.result.narrative;
    Json doc;
    doc["schema_version"] = std::string(kNarrativeSchema);
    doc["source"] = std::string(source);
    doc["mode"] = std::string(mode);
    doc["generator"] = std::string(to_string(n.generator));
    doc["model_id"] = n.model_id ? Json(*n.model_id) : Json(nullptr);
    doc["decoding"] = n.decoding ? Json(decoding_to_json(*n.decoding)) : Json(nullptr);
    doc["text"] = n.text;
    doc["metrics"] = metrics_to_json(out.metrics);
    doc["warnings"] = out.result.warnings;
    return doc;
}

// --- fixtures and benchmarks --------------------------------------------------

struct FixtureDataset {
    std::string name;
    std::filesystem::path file;
    SeriesSchema schema; // entity left empty
    std::vector<std::string> entities;
    std::size_t n_regimes = 2;
};

struct FixtureManifest {
    std::filesystem::path root;
    std::vector<FixtureDataset> datasets;
};

inline FixtureManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cli", "cannot open fixture manifest " + path.string());
    FixtureManifest m;
    m.root = path.parent_path();
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& d : j.at("datasets")) {
            FixtureDataset ds;
            ds.name = d.at("name").get<std::string>();
            ds.file = m.root / d.at("file").get<std::string>();
            ds.schema.time_column = d.value("time_col", std::string("date"));
            ds.schema.value_column = d.value("value_col", std::string("value"));
            ds.schema.entity_column = d.value("entity_col", std::string("entity"));
            ds.schema.measure.name = d.at("measure").get<std::string>();
            ds.schema.measure.unit = d.value("unit", std::string());
            ds.entities = d.at("entities").get<std::vector<std::string>>();
            ds.n_regimes = d.value("n_regimes", std::size_t{2});
            m.datasets.push_back(std::move(ds));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidConfig, "cli", "fixture manifest " + path.string() + ": " + e.what());
    }
    return m;
}

inline const FixtureDataset& find_dataset(const FixtureManifest& m, std::string_view name)
{
    for (const auto& d : m.datasets)
        if (d.name == name)
            return d;
    fail(ErrorKind::InvalidConfig, "cli", "no dataset named '" + std::string(name) + "' in the fixture manifest");
}

inline TimeSeries load_fixture_series(const FixtureDataset& ds, const std::string& entity)
{
    SeriesSchema schema = ds.schema;
    schema.entity = entity;
    return load_series(ds.file, schema);
}

/// Working-domain values for segmentation and regimes: ln(1+x) unless the
/// series has negative values.
inline std::vector<double> working_values(const TimeSeries& raw)
{
    if (has_negative_values(raw))
        return {raw.values().begin(), raw.values().end()};
    const auto t = log_transform(raw);
    return {t.values().begin(), t.values().end()};
}

struct SegBenchRow {
    std::string dataset;
    std::string entity;
    Algorithm algorithm = Algorithm::swab;
    double total_sse = 0.0;
    double r_squared = 0.0;
    std::size_t segments = 0;
    double wall_ms = 0.0;
};

inline std::vector<SegBenchRow> bench_segmentation(const FixtureManifest& manifest, double max_error,
    const std::vector<std::string>& only_datasets = {})
{
    std::vector<SegBenchRow> rows;
    for (const auto& ds : manifest.datasets) {
        if (!only_datasets.empty() && std::find(only_datasets.begin(), only_datasets.end(), ds.name) == only_datasets.end())
            continue;
        for (const auto& entity : ds.entities) {
            const auto values = working_values(load_fixture_series(ds, entity));
            for (auto algo : {Algorithm::sliding_window, Algorithm::bottom_up, Algorithm::swab}) {
                const auto t0 = std::chrono::steady_clock::now();
                const auto r = segment_series(values, algo, max_error);
                const auto t1 = std::chrono::steady_clock::now();
                rows.push_back(SegBenchRow{ds.name, entity, algo, r.total_sse, r.r_squared, r.segments.size(),
                    std::chrono::duration<double, std::milli>(t1 - t0).count()});
            }
        }
    }
    return rows;
}

struct SegBenchSummary {
    std::string dataset;
    Algorithm algorithm = Algorithm::swab;
    double total_sse = 0.0;    // summed over series
    double mean_r_squared = 0.0; // unweighted mean over series
    double mean_segments = 0.0;
    std::size_t series = 0;
};

inline std::vector<SegBenchSummary> summarize_segmentation(const std::vector<SegBenchRow>& rows)
{
    std::vector<SegBenchSummary> out;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(),
            [&](const SegBenchSummary& s) { return s.dataset == r.dataset && s.algorithm == r.algorithm; });
        if (it == out.end()) {
            out.push_back(SegBenchSummary{r.dataset, r.algorithm});
            it = out.end() - 1;
        }
        it->total_sse += r.total_sse;
        it->mean_r_squared += r.r_squared;
        it->mean_segments += static_cast<double>(r.segments);
        ++it->series;
    }
    for (auto& s : out) {
        s.mean_r_squared /= static_cast<double>(s.series);
        s.mean_segments /= static_cast<double>(s.series);
    }
    return out;
}

struct SweepPoint {
    double max_error = 0.0;
    double total_sse = 0.0;
    std::size_t segments = 0;
};

/// Total SSE and segment count as a function of the error threshold.
inline std::vector<SweepPoint> sweep_threshold(
    std::span<const double> values, Algorithm algorithm, const std::vector<double>& thresholds)
{
    std::vector<SweepPoint> out;
    for (double e : thresholds) {
        const auto r = segment_series(values, algorithm, e);
        out.push_back(SweepPoint{e, r.total_sse, r.segments.size()});
    }
    return out;
}

struct RegimeBenchRow {
    std::string dataset;
    std::string entity;
    std::size_t window = 0;
    std::vector<Regime> regimes;
    double sigma = 0.0;
};

inline std::vector<RegimeBenchRow> bench_regimes(const FixtureManifest& manifest, ProfileMetric metric,
    std::optional<std::size_t> window_override, std::optional<std::size_t> n_override,
    const std::vector<std::string>& only_datasets = {})
{
    std::vector<RegimeBenchRow> rows;
    for (const auto& ds : manifest.datasets) {
        if (!only_datasets.empty() && std::find(only_datasets.begin(), only_datasets.end(), ds.name) == only_datasets.end())
            continue;
        for (const auto& entity : ds.entities) {
            const auto values = working_values(load_fixture_series(ds, entity));
            const std::size_t window = window_override.value_or(default_regime_window(values.size()));
            const std::size_t count = n_override.value_or(ds.n_regimes);
            std::vector<Regime> regimes;
            if (count == 1) {
                regimes.push_back(make_regime(values, 0, values.size() - 1));
            } else {
                const auto mp = matrix_profile(values, window, metric);
                regimes = detect_regimes(values, mp, count);
            }
            rows.push_back(RegimeBenchRow{ds.name, entity, window, regimes, regime_sigma(regimes, values)});
        }
    }
    return rows;
}

inline constexpr std::string_view kSegBenchSchema = "t3.bench_seg/1";
inline constexpr std::string_view kRegimeBenchSchema = "t3.bench_regime/1";
inline constexpr std::string_view kConformanceSchema = "t3.decode_vectors/1";

/// Plain-text table in the layout of the segmentation comparison: one row
/// per algorithm, SSE and r^2 columns per dataset.
inline std::string format_seg_table(const std::vector<SegBenchSummary>& summary)
{
    std::vector<std::string> datasets;
    for (const auto& s : summary)
        if (std::find(datasets.begin(), datasets.end(), s.dataset) == datasets.end())
            datasets.push_back(s.dataset);
    std::ostringstream out;
    char buf[64];
    out << "algorithm      ";
    for (const auto& d : datasets) {
        std::snprintf(buf, sizeof buf, " | %-26s", d.c_str());
        out << buf;
    }
    out << "\n               ";
    for (std::size_t i = 0; i < datasets.size(); ++i)
        out << " | SSE          r^2     segs";
    out << "\n";
    for (auto algo : {Algorithm::sliding_window, Algorithm::bottom_up, Algorithm::swab}) {
        std::snprintf(buf, sizeof buf, "%-15s", std::string(to_string(algo)).c_str());
        out << buf;
        for (const auto& d : datasets) {
            auto it = std::find_if(summary.begin(), summary.end(),
                [&](const SegBenchSummary& s) { return s.dataset == d && s.algorithm == algo; });
            if (it == summary.end()) {
                out << " | " << std::string(26, ' ');
                continue;
            }
            std::snprintf(buf, sizeof buf, " | %-12.4g %-7.4f %-5.1f", it->total_sse, it->mean_r_squared, it->mean_segments);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

struct OrderingTrial {
    std::uint64_t seed = 0;
    double sliding_window_sse = 0.0;
    double bottom_up_sse = 0.0;
    double swab_sse = 0.0;
};

struct OrderingStudy {
    std::vector<OrderingTrial> trials;
    std::size_t swab_not_worse = 0;      // swab <= sliding window
    std::size_t bottom_up_not_worse = 0; // bottom-up <= sliding window
};

/// Monte Carlo over seeded noisy piecewise-linear series: how often SWAB and
/// bottom-up match or beat sliding window on total SSE.
inline OrderingStudy segmentation_ordering_study(
    std::size_t runs, std::uint64_t base_seed, double max_error, double noise_sd = 0.5, std::size_t n = 400)
{
    OrderingStudy study;
    for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t seed = base_seed + r;
        synthetic::Rng rng(seed);
        const auto series = synthetic::noisy_piecewise_linear(rng, n, 6, 0.2, noise_sd);
        OrderingTrial t{seed};
        t.sliding_window_sse = sliding_window(series.values, max_error).total_sse;
        t.bottom_up_sse = bottom_up(series.values, max_error).total_sse;
        t.swab_sse = swab(series.values, max_error).total_sse;
        study.swab_not_worse += t.swab_sse <= t.sliding_window_sse;
        study.bottom_up_not_worse += t.bottom_up_sse <= t.sliding_window_sse;
        study.trials.push_back(t);
    }
    return study;
}

struct PlantedTrial {
    std::uint64_t seed = 0;
    std::size_t truth = 0;
    std::size_t detected = 0;
    bool hit = false;
};

struct PlantedStudy {
    std::vector<PlantedTrial> trials;
    std::size_t hits = 0;
    std::size_t window = 0;
};

/// Two-level noise with one planted change point; a trial hits when the
/// detected boundary (first index of the second regime) is within one
/// window of the truth.
inline PlantedStudy planted_regime_study(std::size_t runs, std::uint64_t base_seed, std::size_t n = 400,
    std::size_t window = 20, double level_gap = 3.0, ProfileMetric metric = ProfileMetric::euclidean)
{
    PlantedStudy study;
    study.window = window;
    for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t seed = base_seed + r;
        synthetic::Rng rng(seed);
        const auto series = synthetic::two_level_noise(rng, n, level_gap);
        const auto mp = matrix_profile(series.values, window, metric);
        const auto regimes = detect_regimes(series.values, mp, 2);
        PlantedTrial t{seed, series.breakpoints.front(), regimes.at(1).start_index};
        const auto diff = t.detected > t.truth ? t.detected - t.truth : t.truth - t.detected;
        t.hit = diff <= window;
        study.hits += t.hit;
        study.trials.push_back(t);
    }
    return study;
}

inline Json seg_bench_to_json(const std::vector<SegBenchRow>& rows, double max_error)
{
    Json doc;
    doc["schema_version"] = std::string(kSegBenchSchema);
    doc["max_error"] = max_error;
    doc["value_domain"] = "log unless the series has negative values";
    Json per = Json::array();
    for (const auto& r : rows) {
        Json j;
        j["dataset"] = r.dataset;
        j["entity"] = r.entity;
        j["algorithm"] = std::string(to_string(r.algorithm));
        j["total_sse"] = r.total_sse;
        j["r_squared"] = r.r_squared;
        j["segments"] = r.segments;
        j["wall_ms"] = r.wall_ms;
        per.push_back(std::move(j));
    }
    doc["series"] = std::move(per);
    Json agg = Json::array();
    for (const auto& s : summarize_segmentation(rows)) {
        Json j;
        j["dataset"] = s.dataset;
        j["algorithm"] = std::string(to_string(s.algorithm));
        j["series"] = s.series;
        j["total_sse"] = s.total_sse;
        j["mean_r_squared"] = s.mean_r_squared;
        j["mean_segments"] = s.mean_segments;
        agg.push_back(std::move(j));
    }
    doc["datasets"] = std::move(agg);
    return doc;
}

inline Json regime_bench_to_json(const std::vector<RegimeBenchRow>& rows, ProfileMetric metric)
{
    Json doc;
    doc["schema_version"] = std::string(kRegimeBenchSchema);
    doc["metric"] = std::string(to_string(metric));
    // The reference does not say which domain its sigma is measured in.
    doc["value_domain"] = "log unless the series has negative values (assumed)";
    Json per = Json::array();
    std::vector<std::pair<std::string, std::pair<double, std::size_t>>> means;
    for (const auto& r : rows) {
        Json j;
        j["dataset"] = r.dataset;
        j["entity"] = r.entity;
        j["window"] = r.window;
        Json regs = Json::array();
        for (const auto& g : r.regimes)
            regs.push_back(Json{{"start", g.start_index}, {"end", g.end_index}, {"mean", g.mean}, {"std", g.std}});
        j["regimes"] = std::move(regs);
        j["sigma"] = r.sigma;
        per.push_back(std::move(j));
        auto it = std::find_if(means.begin(), means.end(), [&](const auto& m) { return m.first == r.dataset; });
        if (it == means.end()) {
            means.push_back({r.dataset, {0.0, 0}});
            it = means.end() - 1;
        }
        it->second.first += r.sigma;
        ++it->second.second;
    }
    doc["series"] = std::move(per);
    Json agg = Json::array();
    for (const auto& [name, acc] : means)
        agg.push_back(Json{{"dataset", name}, {"series", acc.second}, {"mean_sigma", acc.first / static_cast<double>(acc.second)}});
    doc["datasets"] = std::move(agg);
    return doc;
}

// --- decode conformance vectors ------------------------------------------------

namespace detail {

inline Json distribution_to_json(const TokenDistribution& d)
{
    Json j = Json::object();
    for (const auto& [id, p] : d.ranked())
        j[std::to_string(id)] = p;
    return j;
}

} // namespace detail

/// Shared vectors for backends: each case gives a source distribution, a
/// strategy with k or p, and the expected truncated distribution.
inline Json decode_conformance_vectors()
{
    struct Case {
        std::string name;
        std::map<TokenId, double> probs;
        Strategy strategy;
        std::size_t k;
        double p;
    };
    const std::map<TokenId, double> abc = {{0, 0.5}, {1, 0.3}, {2, 0.2}};
    const std::map<TokenId, double> tied = {{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}};
    const std::map<TokenId, double> skewed = {{7, 0.05}, {3, 0.6}, {9, 0.05}, {1, 0.2}, {4, 0.1}};
    const std::vector<Case> cases = {
        {"abc_top_k_1", abc, Strategy::top_k, 1, 0.0},
        {"abc_top_k_2", abc, Strategy::top_k, 2, 0.0},
        {"abc_top_k_full", abc, Strategy::top_k, 3, 0.0},
        {"abc_top_k_over", abc, Strategy::top_k, 10, 0.0},
        {"abc_top_p_0.5", abc, Strategy::top_p, 0, 0.5},
        {"abc_top_p_0.6", abc, Strategy::top_p, 0, 0.6},
        {"abc_top_p_0.8", abc, Strategy::top_p, 0, 0.8},
        {"abc_top_p_0.92", abc, Strategy::top_p, 0, 0.92},
        {"abc_top_p_1.0", abc, Strategy::top_p, 0, 1.0},
        {"tied_top_k_2", tied, Strategy::top_k, 2, 0.0},
        {"tied_top_p_0.6", tied, Strategy::top_p, 0, 0.6},
        {"skewed_top_k_3", skewed, Strategy::top_k, 3, 0.0},
        {"skewed_top_p_0.9", skewed, Strategy::top_p, 0, 0.9},
        {"skewed_top_p_0.92", skewed, Strategy::top_p, 0, 0.92},
    };
    Json doc;
    doc["schema_version"] = std::string(kConformanceSchema);
    doc["tolerance"] = 1e-6;
    doc["tie_break"] = "ascending token id";
    doc["top_p_rule"] = "shortest prefix with cumulative mass >= p";
    Json list = Json::array();
    for (const auto& c : cases) {
        const TokenDistribution src(c.probs);
        DecodingConfig cfg;
        cfg.strategy = c.strategy;
        cfg.k = c.k == 0 ? 1 : c.k;
        cfg.p = c.p == 0.0 ? 1.0 : c.p;
        Json j;
        j["name"] = c.name;
        j["distribution"] = detail::distribution_to_json(src);
        j["strategy"] = std::string(to_string(c.strategy));
        if (c.strategy == Strategy::top_k)
            j["k"] = c.k;
        else
            j["p"] = c.p;
        j["expected"] = detail::distribution_to_json(apply_strategy(src, cfg));
        list.push_back(std::move(j));
    }
    doc["vectors"] = std::move(list);
    return doc;
}

} // namespace t3
