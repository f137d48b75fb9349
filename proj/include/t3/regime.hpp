#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "t3/error.hpp"
#include "t3/ingest.hpp"

namespace t3 {

/// Sub-sequence distance. `z_normalized` is the matrix-profile standard and
/// is shift/scale invariant; `euclidean` compares raw values and so keeps
/// level information.
enum class ProfileMetric { z_normalized, euclidean };

constexpr std::string_view to_string(ProfileMetric m) noexcept
{
    return m == ProfileMetric::z_normalized ? "z_normalized" : "euclidean";
}

inline std::optional<ProfileMetric> parse_metric(std::string_view name)
{
    if (name == "z_normalized")
        return ProfileMetric::z_normalized;
    if (name == "euclidean")
        return ProfileMetric::euclidean;
    return std::nullopt;
}

struct MatrixProfile {
    std::size_t window = 0;
    std::size_t exclusion = 0;
    ProfileMetric metric = ProfileMetric::z_normalized;
    std::vector<double> distances;
    std::vector<std::size_t> neighbor_index;
    /// Sub-sequences with zero variance; normalized as all-zero vectors.
    std::size_t constant_subsequences = 0;

    std::size_t size() const noexcept { return distances.size(); }
};

struct Regime {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double mean = 0.0;
    double std = 0.0;
};

inline std::size_t exclusion_zone(std::size_t window) noexcept { return (window + 3) / 4; }

/// ceil(N/20) clamped to [4, 128].
inline std::size_t default_regime_window(std::size_t n) noexcept
{
    return std::clamp<std::size_t>((n + 19) / 20, 4, 128);
}

namespace detail {

struct WindowMoments {
    std::vector<double> mean;
    std::vector<double> sigma; // population standard deviation
    std::vector<double> sum_sq;
    std::vector<bool> constant;
};

inline WindowMoments window_moments(std::span<const double> x, std::size_t m)
{
    const std::size_t count = x.size() - m + 1;
    WindowMoments w;
    w.mean.resize(count);
    w.sigma.resize(count);
    w.sum_sq.resize(count);
    w.constant.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        double mean = 0.0;
        double peak = 0.0;
        double sq = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            mean += x[i + k];
            sq += x[i + k] * x[i + k];
            peak = std::max(peak, std::abs(x[i + k]));
        }
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            var += (x[i + k] - mean) * (x[i + k] - mean);
        var /= static_cast<double>(m);
        w.mean[i] = mean;
        w.sigma[i] = std::sqrt(var);
        w.sum_sq[i] = sq;
        // Relative tolerance so shifted or rescaled copies classify alike.
        w.constant[i] = w.sigma[i] <= 1e-12 * std::max(peak, 1e-300);
    }
    return w;
}

/// Exact distance between sub-sequences i and j, evaluated element-wise.
inline double subsequence_distance(
    std::span<const double> x, const WindowMoments& w, std::size_t m, std::size_t i, std::size_t j, ProfileMetric metric)
{
    double acc = 0.0;
    if (metric == ProfileMetric::euclidean) {
        for (std::size_t k = 0; k < m; ++k) {
            const double d = x[i + k] - x[j + k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    for (std::size_t k = 0; k < m; ++k) {
        const double zi = w.constant[i] ? 0.0 : (x[i + k] - w.mean[i]) / w.sigma[i];
        const double zj = w.constant[j] ? 0.0 : (x[j + k] - w.mean[j]) / w.sigma[j];
        acc += (zi - zj) * (zi - zj);
    }
    return std::sqrt(acc);
}

} // namespace detail

/// Self-join matrix profile. Candidate neighbours are ranked with the
/// sliding dot-product recurrence (O(N^2) overall); the reported distance is
/// then recomputed element-wise for the chosen neighbour so values do not
/// inherit the recurrence's cancellation error near zero.
inline MatrixProfile matrix_profile(
    std::span<const double> x, std::size_t window, ProfileMetric metric = ProfileMetric::z_normalized)
{
    const std::size_t n = x.size();
    if (window < 3)
        fail(ErrorKind::WindowTooSmall, "regime", "window must be at least 3, got " + std::to_string(window));
    if (window > n / 2)
        fail(ErrorKind::WindowTooLarge, "regime",
            "window " + std::to_string(window) + " exceeds half the series length " + std::to_string(n));

    const std::size_t m = window;
    const std::size_t count = n - m + 1;
    const std::size_t excl = exclusion_zone(m);
    const auto w = detail::window_moments(x, m);
    const auto md = static_cast<double>(m);

    MatrixProfile mp;
    mp.window = m;
    mp.exclusion = excl;
    mp.metric = metric;
    mp.distances.assign(count, std::numeric_limits<double>::infinity());
    mp.neighbor_index.assign(count, 0);
    mp.constant_subsequences = static_cast<std::size_t>(std::count(w.constant.begin(), w.constant.end(), true));

    // Squared distance from the dot product QT of sub-sequences i and j.
    auto squared = [&](std::size_t i, std::size_t j, double qt) {
        if (metric == ProfileMetric::euclidean)
            return w.sum_sq[i] + w.sum_sq[j] - 2.0 * qt;
        if (w.constant[i] || w.constant[j])
            return (w.constant[i] ? 0.0 : md) + (w.constant[j] ? 0.0 : md);
        const double corr = (qt - md * w.mean[i] * w.mean[j]) / (md * w.sigma[i] * w.sigma[j]);
        return 2.0 * md * (1.0 - corr);
    };

    std::vector<double> first_row(count);
    for (std::size_t j = 0; j < count; ++j) {
        double qt = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            qt += x[k] * x[j + k];
        first_row[j] = qt;
    }

    std::vector<double> best(count, std::numeric_limits<double>::infinity());
    std::vector<double> qt = first_row;
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) {
            for (std::size_t j = count - 1; j >= 1; --j)
                qt[j] = qt[j - 1] - x[i - 1] * x[j - 1] + x[i + m - 1] * x[j + m - 1];
            qt[0] = first_row[i];
        }
        for (std::size_t j = i + excl; j < count; ++j) {
            const double d2 = squared(i, j, qt[j]);
            if (d2 < best[i]) {
                best[i] = d2;
                mp.neighbor_index[i] = j;
            }
            if (d2 < best[j]) {
                best[j] = d2;
                mp.neighbor_index[j] = i;
            }
        }
    }

    for (std::size_t i = 0; i < count; ++i)
        mp.distances[i] = detail::subsequence_distance(x, w, m, i, mp.neighbor_index[i], metric);
    return mp;
}

inline MatrixProfile matrix_profile(
    const TimeSeries& ts, std::size_t window, ProfileMetric metric = ProfileMetric::z_normalized)
{
    return matrix_profile(ts.values(), window, metric);
}

/// Arc-crossing counts normalised by the count expected under uniformly
/// random neighbours, min(AC/IAC, 1). Positions within one window of either
/// end are pinned to 1.
inline std::vector<double> corrected_arc_curve(const MatrixProfile& mp)
{
    const std::size_t count = mp.size();
    std::vector<double> marks(count + 1, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t a = std::min(i, mp.neighbor_index[i]);
        const std::size_t b = std::max(i, mp.neighbor_index[i]);
        marks[a + 1] += 1.0;
        marks[b] -= 1.0;
    }
    std::vector<double> cac(count, 1.0);
    double crossing = 0.0;
    const auto len = static_cast<double>(count);
    for (std::size_t j = 0; j < count; ++j) {
        crossing += marks[j];
        const auto jd = static_cast<double>(j);
        const double ideal = 2.0 * jd * (len - jd) / len;
        if (ideal > 0.0)
            cac[j] = std::min(crossing / ideal, 1.0);
    }
    for (std::size_t j = 0; j < count; ++j)
        if (j < mp.window || j + mp.window >= count)
            cac[j] = 1.0;
    return cac;
}

inline Regime make_regime(std::span<const double> values, std::size_t start, std::size_t end)
{
    const auto stats = summarize(values.subspan(start, end - start + 1));
    return Regime{start, end, stats.mean, stats.std};
}

/// Splits the series into exactly `n_regimes` contiguous regimes. Boundaries
/// are the lowest minima of the corrected arc curve, chosen greedily with at
/// least one window between any two boundaries (leftmost on ties). Regime k+1
/// starts at the index following regime k's end.
inline std::vector<Regime> detect_regimes(std::span<const double> values, const MatrixProfile& mp, std::size_t n_regimes)
{
    if (n_regimes < 1)
        fail(ErrorKind::InvalidCount, "regime", "n_regimes must be at least 1");
    if (mp.size() + mp.window - 1 != values.size())
        fail(ErrorKind::MismatchedLength, "regime", "matrix profile was computed for a different series length");
    const std::size_t n = values.size();
    if (n < 2 * mp.window * n_regimes)
        fail(ErrorKind::TooManyRegimes, "regime",
            std::to_string(n_regimes) + " regimes of window " + std::to_string(mp.window) + " need at least "
                + std::to_string(2 * mp.window * n_regimes) + " points, series has " + std::to_string(n));

    std::vector<std::size_t> cuts;
    if (n_regimes > 1) {
        auto cac = corrected_arc_curve(mp);
        std::vector<bool> blocked(cac.size(), false);
        for (std::size_t j = 0; j < cac.size(); ++j)
            blocked[j] = j < mp.window || j + mp.window >= cac.size();
        while (cuts.size() + 1 < n_regimes) {
            std::optional<std::size_t> pick;
            for (std::size_t j = 0; j < cac.size(); ++j)
                if (!blocked[j] && (!pick || cac[j] < cac[*pick]))
                    pick = j;
            if (!pick)
                fail(ErrorKind::TooManyRegimes, "regime",
                    "only " + std::to_string(cuts.size() + 1) + " separable regimes found for window "
                        + std::to_string(mp.window));
            cuts.push_back(*pick);
            const std::size_t lo = *pick >= mp.window ? *pick - mp.window + 1 : 0;
            const std::size_t hi = std::min(cac.size() - 1, *pick + mp.window - 1);
            for (std::size_t j = lo; j <= hi; ++j)
                blocked[j] = true;
        }
        std::sort(cuts.begin(), cuts.end());
    }

    std::vector<Regime> regimes;
    std::size_t start = 0;
    for (std::size_t cut : cuts) {
        regimes.push_back(make_regime(values, start, cut - 1));
        start = cut;
    }
    regimes.push_back(make_regime(values, start, n - 1));
    return regimes;
}

inline std::vector<Regime> detect_regimes(const TimeSeries& ts, const MatrixProfile& mp, std::size_t n_regimes)
{
    return detect_regimes(ts.values(), mp, n_regimes);
}

/// Unweighted mean of per-regime sample standard deviations.
inline double regime_sigma(const std::vector<Regime>& regimes, std::span<const double> values)
{
    if (regimes.empty() || regimes.front().start_index != 0 || regimes.back().end_index + 1 != values.size())
        fail(ErrorKind::MismatchedTiling, "regime", "regimes do not cover a series of length " + std::to_string(values.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < regimes.size(); ++i) {
        const auto& r = regimes[i];
        if (r.end_index <= r.start_index || (i > 0 && r.start_index != regimes[i - 1].end_index + 1))
            fail(ErrorKind::MismatchedTiling, "regime", "regime " + std::to_string(i) + " breaks the tiling");
        total += summarize(values.subspan(r.start_index, r.end_index - r.start_index + 1)).std;
    }
    return total / static_cast<double>(regimes.size());
}

inline double regime_sigma(const std::vector<Regime>& regimes, const TimeSeries& ts)
{
    return regime_sigma(regimes, ts.values());
}

} // namespace t3
