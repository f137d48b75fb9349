#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "t3/t3.hpp"

namespace t3::test {

/// Daily series starting 2020-01-01.
inline TimeSeries daily_series(std::vector<double> values, std::string entity = "Testland",
    Measure measure = {"cases", "cases"})
{
    using namespace std::chrono;
    std::vector<TimePoint> ts;
    const sys_days start = year{2020} / January / 1;
    for (std::size_t i = 0; i < values.size(); ++i)
        ts.push_back(TimePoint{sys_seconds{start + days{static_cast<int>(i)}}, TimePrecision::day});
    return TimeSeries(std::move(entity), std::move(measure), std::move(ts), std::move(values));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("t3_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// --- oracles ----------------------------------------------------------------

/// Least squares by the textbook normal equations, written independently of
/// fit_line.
inline double naive_sse(const std::vector<double>& y, std::size_t start, std::size_t end)
{
    const double n = static_cast<double>(end - start + 1);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i <= end; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double sse = 0;
    for (std::size_t i = start; i <= end; ++i) {
        const double r = y[i] - (intercept + slope * static_cast<double>(i));
        sse += r * r;
    }
    return sse;
}

/// Best 2-piece split point (first index of the right piece), exhaustive.
inline std::size_t brute_force_two_piece_split(const std::vector<double>& y)
{
    std::size_t best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t cut = 2; cut + 2 <= y.size(); ++cut) {
        const double s = naive_sse(y, 0, cut - 1) + naive_sse(y, cut, y.size() - 1);
        if (s < best_sse - 1e-12) {
            best_sse = s;
            best = cut;
        }
    }
    return best;
}

/// Change point minimizing the pooled within-segment variance of a
/// two-regime split.
inline std::size_t brute_force_variance_split(const std::vector<double>& y, std::size_t min_len)
{
    std::size_t best = min_len;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t cut = min_len; cut + min_len <= y.size(); ++cut) {
        auto ss = [&](std::size_t a, std::size_t b) {
            double m = 0;
            for (std::size_t i = a; i < b; ++i)
                m += y[i];
            m /= static_cast<double>(b - a);
            double s = 0;
            for (std::size_t i = a; i < b; ++i)
                s += (y[i] - m) * (y[i] - m);
            return s;
        };
        const double cost = ss(0, cut) + ss(cut, y.size());
        if (cost < best_cost) {
            best_cost = cost;
            best = cut;
        }
    }
    return best;
}

/// All-pairs matrix profile with explicit z-normalization per pair.
inline MatrixProfile naive_matrix_profile(const std::vector<double>& x, std::size_t m, ProfileMetric metric)
{
    const std::size_t count = x.size() - m + 1;
    const std::size_t excl = (m + 3) / 4;
    auto normalized = [&](std::size_t i) {
        std::vector<double> s(x.begin() + static_cast<std::ptrdiff_t>(i), x.begin() + static_cast<std::ptrdiff_t>(i + m));
        if (metric == ProfileMetric::euclidean)
            return s;
        double mu = 0;
        for (double v : s)
            mu += v;
        mu /= static_cast<double>(m);
        double var = 0;
        for (double v : s)
            var += (v - mu) * (v - mu);
        const double sd = std::sqrt(var / static_cast<double>(m));
        double peak = 0;
        for (double v : s)
            peak = std::max(peak, std::abs(v));
        const bool constant = sd <= 1e-12 * std::max(peak, 1e-300);
        for (double& v : s)
            v = constant ? 0.0 : (v - mu) / sd;
        return s;
    };
    std::vector<std::vector<double>> subs;
    for (std::size_t i = 0; i < count; ++i)
        subs.push_back(normalized(i));
    MatrixProfile mp;
    mp.window = m;
    mp.exclusion = excl;
    mp.metric = metric;
    mp.distances.assign(count, std::numeric_limits<double>::infinity());
    mp.neighbor_index.assign(count, 0);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < count; ++j) {
            if ((i > j ? i - j : j - i) < excl)
                continue;
            double d = 0;
            for (std::size_t t = 0; t < m; ++t)
                d += (subs[i][t] - subs[j][t]) * (subs[i][t] - subs[j][t]);
            d = std::sqrt(d);
            if (d < mp.distances[i]) {
                mp.distances[i] = d;
                mp.neighbor_index[i] = j;
            }
        }
    return mp;
}

/// Random connected graph over the schema relations with awkward but legal
/// field text: spaces, unicode, angle brackets that are not markers.
inline KnowledgeGraph random_graph(std::mt19937_64& rng)
{
    static const std::vector<std::string> words = {"alpha", "beta", "2020-01-01", "17.5 thousand", "-3.2%",
        "Côte d'Ivoire", "<x>", "a<b", "H>", "<h>", "R", "T>", "trend 1", "a  b", "x|y", "\"q\"", "tab\tsep", "<", ">",
        "end.", "ü", "0"};
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    auto phrase = [&] {
        std::string s = words[pick(words.size())];
        const std::size_t extra = pick(3);
        for (std::size_t i = 0; i < extra; ++i)
            s += " " + words[pick(words.size())];
        return s;
    };
    std::vector<std::string> nodes = {phrase()};
    std::vector<Triple> triples;
    const std::size_t n = 1 + pick(20);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& head = nodes[pick(nodes.size())];
        const auto relation = std::string(kSchemaRelations[pick(kSchemaRelations.size())]);
        auto tail = phrase();
        triples.push_back(Triple{head, relation, tail});
        nodes.push_back(tail);
    }
    return KnowledgeGraph(std::move(triples));
}

} // namespace t3::test
