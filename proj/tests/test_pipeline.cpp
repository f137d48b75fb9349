#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "stub_backend.hpp"
#include "support.hpp"

namespace {

using namespace t3;
using namespace std::chrono_literals;

const std::filesystem::path kFixtures = std::filesystem::path(T3_SOURCE_DIR) / "fixtures";

template <typename F>
ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected a t3::Error";
    return ErrorKind::InvalidConfig;
}

std::filesystem::path write_text(const std::string& name, const std::string& text)
{
    const auto path = test::scratch_dir("pipeline") / name;
    std::ofstream(path) << text;
    return path;
}

PipelineConfig covid_config(const std::string& entity)
{
    PipelineConfig c;
    c.input = kFixtures / "covid19.csv";
    c.schema.entity = entity;
    c.schema.measure = {"daily new cases", "cases"};
    c.domain = "covid19";
    return c;
}

TEST(Config, DefaultsMatchReferenceSettings)
{
    const PipelineConfig c;
    EXPECT_EQ(c.max_error, 2.75);
    EXPECT_EQ(c.algorithm, Algorithm::swab);
    EXPECT_EQ(c.decoding.k, 50u);
    EXPECT_EQ(c.decoding.p, 0.92);
    EXPECT_EQ(c.decoding.strategy, Strategy::top_p);
    EXPECT_EQ(c.mode, NarrationMode::templated);
    EXPECT_FALSE(c.n_regimes);
}

TEST(Config, LoadsKnownKeys)
{
    const auto path = write_text("good.json", R"({
        "input": "data.csv", "entity": "France", "measure": "cases", "unit": "cases",
        "max_error": 1.5, "algorithm": "bottom_up", "n_regimes": 2, "window": 12, "metric": "z_normalized",
        "mode": "neural-with-fallback", "strategy": "top_k", "k": 10, "seed": 4, "timeout_ms": 250,
        "log_transform": "off", "out": "results"})");
    const auto c = load_config(path);
    EXPECT_EQ(c.input, "data.csv");
    EXPECT_EQ(c.schema.entity, "France");
    EXPECT_EQ(c.schema.measure.unit, "cases");
    EXPECT_EQ(c.max_error, 1.5);
    EXPECT_EQ(c.algorithm, Algorithm::bottom_up);
    EXPECT_EQ(c.n_regimes, 2u);
    EXPECT_EQ(c.window, 12u);
    EXPECT_EQ(c.regime_metric, ProfileMetric::z_normalized);
    EXPECT_EQ(c.mode, NarrationMode::neural_with_fallback);
    EXPECT_EQ(c.decoding.strategy, Strategy::top_k);
    EXPECT_EQ(c.decoding.k, 10u);
    EXPECT_EQ(c.decoding.seed, 4u);
    EXPECT_EQ(c.timeout, 250ms);
    EXPECT_EQ(c.log_transform, LogMode::off);
    EXPECT_EQ(c.out, "results");

    const auto auto_path = write_text("auto.json", R"({"n_regimes": "auto"})");
    PipelineConfig base;
    base.n_regimes = 3;
    EXPECT_FALSE(load_config(auto_path, base).n_regimes);
}

TEST(Config, RejectsUnknownKeysAndBadValues)
{
    for (const char* bad : {R"({"max_eror": 2})", R"({"algorithm": "top_down"})", R"({"mode": "fast"})",
             R"({"k": "many"})", R"({"metric": "cosine"})", "{not json"}) {
        try {
            load_config(write_text("bad.json", bad));
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig) << bad;
            EXPECT_EQ(e.module(), "cli");
        }
    }
    EXPECT_EQ(kind_of([] { load_config("/nonexistent/config.json"); }), ErrorKind::Io);
}

TEST(Config, FileValuesLayerOverBase)
{
    PipelineConfig base;
    base.schema.entity = "Spain";
    base.max_error = 9.0;
    const auto c = load_config(write_text("partial.json", R"({"max_error": 1.0})"), base);
    EXPECT_EQ(c.schema.entity, "Spain");
    EXPECT_EQ(c.max_error, 1.0);
}

TEST(Output, AtomicWriteLeavesNoTemporary)
{
    const auto dir = test::scratch_dir("atomic") / "nested";
    std::filesystem::remove_all(dir);
    write_atomic(dir / "doc.json", "first\n");
    write_atomic(dir / "doc.json", "second\n");
    std::ifstream in(dir / "doc.json");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "second\n");
    EXPECT_FALSE(std::filesystem::exists(dir / "doc.json.tmp"));
}

TEST(Analysis, MissingInputs)
{
    PipelineConfig c;
    EXPECT_EQ(kind_of([&] { run_analysis(c); }), ErrorKind::InvalidConfig);
    c.input = "/nonexistent/series.csv";
    try {
        run_analysis(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
        EXPECT_EQ(e.module(), "ingest");
        EXPECT_NE(std::string(e.what()).find("/nonexistent/series.csv"), std::string::npos);
    }
}

TEST(Analysis, ConstantSeriesIsOneFlatTrendOneRegimeNoPeaks)
{
    const auto ts = test::daily_series(std::vector<double>(60, 5.0));
    const auto a = analyze_series(ts, PipelineConfig{});
    ASSERT_EQ(a.trends.segments.size(), 1u);
    EXPECT_EQ(a.trends.segments[0].direction, Direction::flat);
    EXPECT_EQ(a.regimes.size(), 1u);
    EXPECT_TRUE(a.peaks.empty());
    EXPECT_EQ(a.sigma, 0.0);
    EXPECT_TRUE(a.log_applied);
}

TEST(Analysis, ShortSeriesDegradesToOneRegime)
{
    const auto a = analyze_series(test::daily_series({1, 2}), PipelineConfig{});
    EXPECT_EQ(a.regimes.size(), 1u);
    EXPECT_FALSE(a.warnings.empty());
}

TEST(Analysis, NegativeValuesSkipAutoLog)
{
    const auto ts = test::daily_series({-3, -1, 2, 4, 1, -2, 0, 5, 6, 7, 3, 2});
    const auto a = analyze_series(ts, PipelineConfig{});
    EXPECT_FALSE(a.log_applied);
    EXPECT_FALSE(a.warnings.empty());
    PipelineConfig forced;
    forced.log_transform = LogMode::on;
    EXPECT_EQ(kind_of([&] { analyze_series(ts, forced); }), ErrorKind::NegativeValue);
}

TEST(Analysis, DocumentIsDeterministic)
{
    const auto c = covid_config("United States");
    const auto first = dump_document(analysis_to_json(run_analysis(c), c));
    const auto second = dump_document(analysis_to_json(run_analysis(c), c));
    EXPECT_EQ(first, second);
    const auto doc = nlohmann::json::parse(first);
    EXPECT_EQ(doc["schema_version"], "t3.analysis/1");
    EXPECT_EQ(doc["trends"]["segment_count"], 6);
    EXPECT_EQ(doc["regimes"]["regimes"].size(), 3u);
    EXPECT_EQ(graph_from_json(doc["graph"]), run_analysis(c).graph);
    EXPECT_EQ(doc["linearized"], linearize(run_analysis(c).graph));
}

TEST(Analysis, EveryFixtureSeriesRuns)
{
    const auto manifest = load_manifest(kFixtures / "manifest.json");
    ASSERT_EQ(manifest.datasets.size(), 5u);
    for (const auto& ds : manifest.datasets) {
        PipelineConfig c;
        c.schema = ds.schema;
        c.schema.entity = ds.entities.front();
        c.domain = ds.name;
        const auto a = analyze_series(load_fixture_series(ds, ds.entities.front()), c);
        const auto text = template_render(a.graph, TemplateSet::builtin(ds.name)).text;
        EXPECT_EQ(grammar_score(text, naive_checker), 1.0) << ds.name;
        EXPECT_FALSE(contains_marker(text));
    }
}

TEST(Narration, TemplatedDocument)
{
    const auto c = covid_config("United Kingdom");
    const auto a = run_analysis(c);
    const auto out = narrate_graph(a.graph, narration_request(c, c.domain));
    const auto doc = narrative_to_json(out, to_string(c.mode), "covid19.csv");
    EXPECT_EQ(doc["schema_version"], "t3.narrative/1");
    EXPECT_EQ(doc["generator"], "templated");
    EXPECT_TRUE(doc["decoding"].is_null());
    EXPECT_EQ(doc["metrics"]["g"], 1.0);
    EXPECT_EQ(doc["text"], template_render(a.graph, TemplateSet::builtin("covid19")).text);
}

TEST(Narration, NeuralAgainstStub)
{
    test::StubBackend stub;
    auto c = covid_config("United Kingdom");
    c.mode = NarrationMode::neural;
    c.endpoint = stub.endpoint();
    c.decoding.seed = 11;
    const auto a = run_analysis(c);
    const auto out = narrate_graph(a.graph, narration_request(c, c.domain));
    EXPECT_EQ(out.result.narrative.text, test::canonical_echo(a.graph));
    const auto doc = narrative_to_json(out, to_string(c.mode), "covid19.csv");
    EXPECT_EQ(doc["generator"], "neural");
    EXPECT_EQ(doc["model_id"], test::kStubModelId);
    EXPECT_EQ(doc["decoding"]["seed"], 11);
}

TEST(Narration, CustomTemplateFile)
{
    const auto path = write_text("mini.tpl", std::string(kGenericTemplates));
    auto c = covid_config("France");
    c.templates = path;
    const auto req = narration_request(c, c.domain);
    EXPECT_EQ(req.templates.domain(), "generic");
}

TEST(Bench, SegmentationRowsAndSweep)
{
    const auto manifest = load_manifest(kFixtures / "manifest.json");
    const auto rows = bench_segmentation(manifest, 2.75, {"world_population"});
    ASSERT_EQ(rows.size(), 3u * 10u);
    for (const auto& r : rows) {
        EXPECT_GE(r.r_squared, -1e-9);
        EXPECT_GE(r.total_sse, 0.0);
    }
    const auto summary = summarize_segmentation(rows);
    EXPECT_EQ(summary.size(), 3u);
    const auto doc = seg_bench_to_json(rows, 2.75);
    EXPECT_EQ(doc["schema_version"], "t3.bench_seg/1");
}

TEST(Bench, RegimeRows)
{
    const auto manifest = load_manifest(kFixtures / "manifest.json");
    const auto rows = bench_regimes(manifest, ProfileMetric::euclidean, std::nullopt, std::nullopt, {"world_population"});
    ASSERT_EQ(rows.size(), 10u);
    for (const auto& r : rows)
        EXPECT_GE(r.sigma, 0.0);
    EXPECT_EQ(regime_bench_to_json(rows, ProfileMetric::euclidean)["schema_version"], "t3.bench_regime/1");
}

} // namespace
