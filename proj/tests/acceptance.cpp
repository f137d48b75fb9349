// Acceptance suite: one PASS/FAIL line per headline criterion. Tolerances,
// run counts and time limits are fixed here rather than read from flags.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

namespace {

using namespace t3;
using Clock = std::chrono::steady_clock;

const std::filesystem::path kRoot = T3_SOURCE_DIR;
const std::filesystem::path kCli = T3_CLI_PATH;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double time_limit_s; // 0 = none
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome oracle_bound()
{
    constexpr int kSeries = 200;
    std::size_t violations = 0, checks = 0;
    for (int s = 0; s < kSeries; ++s) {
        synthetic::Rng rng(100000 + static_cast<std::uint64_t>(s));
        std::vector<double> v(4 + rng.index(0, 60));
        double level = 0.0;
        for (auto& x : v) {
            level += rng.normal() * (s % 2 ? 1.0 : 0.2);
            x = level + rng.normal();
        }
        const double max_error = rng.uniform(0.05, 5.0);
        for (auto algo : {Algorithm::sliding_window, Algorithm::bottom_up, Algorithm::swab}) {
            const auto r = segment_series(v, algo, max_error);
            const auto oracle = optimal_segmentation_oracle(v, r.segments.size());
            ++checks;
            // Relative slack only absorbs rounding between two exact evaluations.
            if (r.total_sse < oracle.total_sse - 1e-9 * std::max(1.0, oracle.total_sse))
                ++violations;
        }
    }
    return {violations == 0, fmt("%zu comparisons over %d series, %zu violations", checks, kSeries, violations)};
}

Outcome segmentation_ordering()
{
    constexpr std::size_t kRuns = 100;
    const auto study = segmentation_ordering_study(kRuns, 1, kDefaultMaxError);
    const double share = static_cast<double>(study.swab_not_worse) / kRuns;
    return {share >= 0.90, fmt("swab <= sliding_window in %zu/%zu runs (need >= 90%%); bottom_up <= sliding_window in %zu/%zu",
                               study.swab_not_worse, kRuns, study.bottom_up_not_worse, kRuns)};
}

Outcome consolidation()
{
    PipelineConfig c;
    c.input = kRoot / "fixtures/covid19.csv";
    c.schema.entity = "United States";
    c.schema.measure = {"daily new cases", "cases"};
    const auto a = run_analysis(c);
    std::string dirs;
    for (const auto& s : a.trends.segments)
        dirs += std::string(to_string(s.direction)).substr(0, 1);
    return {a.trends.segments.size() == 6,
        fmt("%zu raw segments -> %zu consolidated trends (%s), need exactly 6", a.segments.segments.size(),
            a.trends.segments.size(), dirs.c_str())};
}

Outcome matrix_profile_correctness()
{
    constexpr int kSeries = 50;
    double worst_oracle = 0.0, worst_shift = 0.0, worst_scale = 0.0;
    for (int s = 0; s < kSeries; ++s) {
        synthetic::Rng rng(7000 + static_cast<std::uint64_t>(s));
        const std::size_t n = 16 + rng.index(0, 240);
        const std::size_t m = 3 + rng.index(0, std::min<std::size_t>(n / 2 - 3, 40));
        std::vector<double> x;
        switch (s % 3) {
        case 0: x = synthetic::random_walk(rng, n); break;
        case 1: x = synthetic::two_level_noise(rng, n, 3.0).values; break;
        default: x = synthetic::noisy_piecewise_linear(rng, n, 4, 0.3, 0.2, 4).values; break;
        }
        for (auto metric : {ProfileMetric::z_normalized, ProfileMetric::euclidean}) {
            const auto fast = matrix_profile(x, m, metric);
            const auto slow = test::naive_matrix_profile(x, m, metric);
            for (std::size_t i = 0; i < fast.size(); ++i)
                worst_oracle = std::max(worst_oracle, std::abs(fast.distances[i] - slow.distances[i]));
        }
        const double shift = rng.uniform(-1000.0, 1000.0);
        const double scale = rng.uniform(0.01, 100.0);
        std::vector<double> shifted = x, scaled = x;
        for (auto& v : shifted)
            v += shift;
        for (auto& v : scaled)
            v *= scale;
        const auto base = matrix_profile(x, m);
        const auto a = matrix_profile(shifted, m);
        const auto b = matrix_profile(scaled, m);
        for (std::size_t i = 0; i < base.size(); ++i) {
            worst_shift = std::max(worst_shift, std::abs(a.distances[i] - base.distances[i]));
            worst_scale = std::max(worst_scale, std::abs(b.distances[i] - base.distances[i]));
        }
    }
    constexpr double kTol = 1e-9;
    return {worst_oracle <= kTol && worst_shift <= kTol && worst_scale <= kTol,
        fmt("max |fast - naive| = %.3g, shift = %.3g, scale = %.3g (tol 1e-9)", worst_oracle, worst_shift, worst_scale)};
}

Outcome regime_recovery()
{
    constexpr std::size_t kRuns = 100;
    const auto study = planted_regime_study(kRuns, 1);
    return {study.hits >= 95,
        fmt("boundary within +/-%zu in %zu/%zu runs (need >= 95)", study.window, study.hits, kRuns)};
}

Outcome decoding()
{
    std::vector<std::string> failures;
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::map<TokenId, double> m;
        const std::size_t n = 1 + gen() % 50;
        double total = 0.0;
        std::vector<double> w(n);
        for (auto& x : w)
            total += (x = u(gen) + 1e-3);
        for (std::size_t i = 0; i < n; ++i)
            m.emplace(static_cast<TokenId>(i), w[i] / total);
        const TokenDistribution d(m);
        const auto k_id = truncate_top_k(d, d.size());
        const auto p_id = truncate_top_p(d, 1.0);
        for (const auto& [id, p] : d.probabilities())
            if (std::abs(k_id[id] - p) > 1e-12 || std::abs(p_id[id] - p) > 1e-12) {
                failures.push_back("identity");
                break;
            }
    }
    const TokenDistribution abc({{0, 0.5}, {1, 0.3}, {2, 0.2}});
    const auto k2 = truncate_top_k(abc, 2);
    const auto p7 = truncate_top_p(abc, 0.7);
    if (k2.size() != 2 || k2[0] != 0.5 / 0.8 || k2[1] != 0.3 / 0.8)
        failures.push_back("top_k(2)");
    if (p7.size() != 2 || p7[0] != 0.5 / 0.8 || p7[1] != 0.3 / 0.8)
        failures.push_back("top_p(0.7)");
    const auto tied = truncate_top_k(TokenDistribution({{0, 0.4}, {1, 0.4}, {2, 0.2}}), 1);
    if (tied.size() != 1 || tied[0] != 1.0)
        failures.push_back("tie break");
    if (truncate_top_p(TokenDistribution({{0, 0.9}, {1, 0.1}}), 0.5)[0] != 1.0)
        failures.push_back("top_p(0.5)");

    double worst_l1 = 0.0;
    std::mt19937_64 rng(20220217);
    for (const auto& d : {TokenDistribution({{0, 0.5}, {1, 0.5}}), abc}) {
        std::map<TokenId, int> counts;
        constexpr int kDraws = 100000;
        for (int i = 0; i < kDraws; ++i)
            ++counts[sample_basic(d, rng)];
        double l1 = 0.0;
        for (const auto& [id, p] : d.probabilities())
            l1 += std::abs(static_cast<double>(counts[id]) / kDraws - p);
        worst_l1 = std::max(worst_l1, l1);
    }
    if (worst_l1 >= 0.01)
        failures.push_back("sampling L1");
    std::string detail = fmt("hand vectors exact, identities within 1e-12, sampling L1 = %.4f (need < 0.01)", worst_l1);
    if (!failures.empty()) {
        detail = "failed:";
        for (const auto& f : failures)
            detail += " " + f;
    }
    return {failures.empty(), detail};
}

Outcome metrics()
{
    const double t = ttr("the cat and the dog");
    const double re = flesch_re("The cat sat.");
    const double gain = ttr_gain(0.43, 0.26);
    const GrammarChecker one = [](std::string_view) -> std::size_t { return 1; };
    const GrammarChecker first = [](std::string_view s) -> std::size_t { return s.starts_with("One") ? 1 : 0; };
    const double g1 = grammar_score("One two three four five six seven eight nine ten.", one);
    const double g2 = grammar_score("One two three four five six seven eight nine ten. Five short words here now.", first);
    const double g0 = grammar_score("Any text at all. even this", zero_checker);
    const bool ok = t == 0.8 && std::abs(re - 119.19) <= 0.01 && std::abs(gain - 65.38) <= 0.01 && g1 == 0.9 && g2 == 0.95
        && g0 == 1.0;
    return {ok, fmt("ttr = %.17g, RE = %.4f, gain = %.4f%%, G = %.17g / %.17g / %.17g", t, re, gain, g1, g2, g0)};
}

Outcome linearization()
{
    constexpr int kGraphs = 1000;
    std::mt19937_64 rng(99);
    int failures = 0;
    std::size_t triples = 0;
    for (int i = 0; i < kGraphs; ++i) {
        const auto kg = test::random_graph(rng);
        triples += kg.size();
        if (!(parse_linearized(linearize(kg)) == kg))
            ++failures;
    }
    return {failures == 0, fmt("%d graphs (%zu triples), %d round-trip failures", kGraphs, triples, failures)};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quoted(const std::string& s)
{
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

Outcome end_to_end()
{
    const auto manifest = load_manifest(kRoot / "fixtures/manifest.json");
    const auto scratch = test::scratch_dir("acceptance_e2e");
    std::vector<std::string> problems;
    std::string summary;
    for (const auto& ds : manifest.datasets) {
        const auto dir = scratch / ds.name;
        std::filesystem::remove_all(dir);
        const std::string entity = ds.entities.front();
        const std::string common = " --input " + quoted(ds.file.string()) + " --entity " + quoted(entity) + " --measure "
            + quoted(ds.schema.measure.name) + " --unit " + quoted(ds.schema.measure.unit) + " --domain " + ds.name;
        const std::string analyze = quoted(kCli.string()) + " analyze" + common + " --out " + quoted(dir.string());
        const std::string narrate = quoted(kCli.string()) + " narrate --analysis " + quoted((dir / "analysis.json").string())
            + " --domain " + ds.name + " --out " + quoted(dir.string());
        std::string first_analysis, first_narrative;
        for (int run = 0; run < 2; ++run) {
            const int a = std::system((analyze + " > /dev/null").c_str());
            const int n = a == 0 ? std::system((narrate + " > /dev/null").c_str()) : -1;
            if (a != 0 || n != 0) {
                problems.push_back(ds.name + ": nonzero exit");
                break;
            }
            const auto analysis = slurp(dir / "analysis.json");
            const auto narrative = slurp(dir / "narrative.json");
            if (run == 0) {
                first_analysis = analysis;
                first_narrative = narrative;
                const auto doc = nlohmann::json::parse(narrative);
                const double g = doc["metrics"]["g"].get<double>();
                if (g != 1.0)
                    problems.push_back(ds.name + ": G = " + std::to_string(g));
                summary += fmt(" %s(G=%g, RE=%.1f)", ds.name.c_str(), g, doc["metrics"]["re"].get<double>());
            } else if (analysis != first_analysis || narrative != first_narrative) {
                problems.push_back(ds.name + ": rerun differs");
            }
        }
    }
    std::string detail = "5 domains, 2 runs each, byte-identical:" + summary;
    if (!problems.empty()) {
        detail = "problems:";
        for (const auto& p : problems)
            detail += " [" + p + "]";
    }
    return {problems.empty() && manifest.datasets.size() == 5, detail};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {"segmentation oracle bound", 60, oracle_bound},
        {"segmentation ordering", 120, segmentation_ordering},
        {"consolidation to six trends", 0, consolidation},
        {"matrix profile correctness", 60, matrix_profile_correctness},
        {"regime recovery", 0, regime_recovery},
        {"decoding", 0, decoding},
        {"metrics", 0, metrics},
        {"linearization round trip", 0, linearization},
        {"end-to-end templated path", 0, end_to_end},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s limit", c.time_limit_s);
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  (" << fmt("%.2f s", secs) << ")  " << o.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
