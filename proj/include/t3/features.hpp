#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "t3/error.hpp"
#include "t3/ingest.hpp"

namespace t3 {

struct Peak {
    std::size_t index = 0;
    TimePoint timestamp;
    double value = 0.0;
    double prominence = 0.0;
};

struct ExtremePoint {
    std::size_t index = 0;
    TimePoint timestamp;
    double value = 0.0;
};

struct Extrema {
    ExtremePoint max;
    ExtremePoint min;
};

inline constexpr std::size_t kDefaultMaxPeaks = 3;
inline constexpr double kDefaultProminenceFraction = 0.05;

/// Topographic prominence of the strict local maximum at `peak`: walk out on
/// each side until a strictly higher sample (or the edge); the higher of the
/// two minima found is the key col.
inline double prominence_at(std::span<const double> x, std::size_t peak)
{
    double left_min = x[peak];
    for (std::size_t i = peak; i-- > 0;) {
        if (x[i] > x[peak])
            break;
        left_min = std::min(left_min, x[i]);
    }
    double right_min = x[peak];
    for (std::size_t i = peak + 1; i < x.size(); ++i) {
        if (x[i] > x[peak])
            break;
        right_min = std::min(right_min, x[i]);
    }
    return x[peak] - std::max(left_min, right_min);
}

/// Strict interior local maxima with prominence >= min_prominence, most
/// prominent first (earlier index on ties), at most max_peaks of them.
inline std::vector<Peak> detect_peaks(const TimeSeries& ts, double min_prominence, std::size_t max_peaks)
{
    const auto x = ts.values();
    if (x.size() < 3)
        fail(ErrorKind::SeriesTooShort, "features", "peak detection needs at least 3 points");
    if (min_prominence < 0.0 || max_peaks < 1)
        fail(ErrorKind::InvalidConfig, "features", "min_prominence must be >= 0 and max_peaks >= 1");

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (!(x[i - 1] < x[i] && x[i] > x[i + 1]))
            continue;
        const double prom = prominence_at(x, i);
        if (prom >= min_prominence)
            peaks.push_back(Peak{i, ts.timestamps()[i], x[i], prom});
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.prominence > b.prominence; });
    if (peaks.size() > max_peaks)
        peaks.resize(max_peaks);
    return peaks;
}

/// Defaults: prominence floor at 5% of the value range, three peaks.
inline std::vector<Peak> detect_peaks(const TimeSeries& ts)
{
    const auto [lo, hi] = std::minmax_element(ts.values().begin(), ts.values().end());
    return detect_peaks(ts, kDefaultProminenceFraction * (*hi - *lo), kDefaultMaxPeaks);
}

/// Earliest-index maximum and minimum.
inline Extrema global_extrema(const TimeSeries& ts)
{
    const auto x = ts.values();
    if (x.empty())
        fail(ErrorKind::EmptySeries, "features", "empty series");
    std::size_t hi = 0;
    std::size_t lo = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] > x[hi])
            hi = i;
        if (x[i] < x[lo])
            lo = i;
    }
    return Extrema{{hi, ts.timestamps()[hi], x[hi]}, {lo, ts.timestamps()[lo], x[lo]}};
}

} // namespace t3
