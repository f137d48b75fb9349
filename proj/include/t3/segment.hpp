#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t3/error.hpp"
#include "t3/ingest.hpp"

namespace t3 {

enum class Algorithm { sliding_window, bottom_up, swab, optimal_dp };
enum class Direction { increasing, decreasing, flat };

/// |slope| below this (log units per index step) counts as flat.
inline constexpr double kFlatSlope = 1e-3;
inline constexpr double kDefaultMaxError = 2.75;

constexpr std::string_view to_string(Algorithm a) noexcept
{
    switch (a) {
    case Algorithm::sliding_window: return "sliding_window";
    case Algorithm::bottom_up: return "bottom_up";
    case Algorithm::swab: return "swab";
    case Algorithm::optimal_dp: return "optimal_dp";
    }
    return "unknown";
}

constexpr std::string_view to_string(Direction d) noexcept
{
    switch (d) {
    case Direction::increasing: return "increasing";
    case Direction::decreasing: return "decreasing";
    case Direction::flat: return "flat";
    }
    return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name)
{
    for (auto a : {Algorithm::sliding_window, Algorithm::bottom_up, Algorithm::swab, Algorithm::optimal_dp})
        if (to_string(a) == name)
            return a;
    return std::nullopt;
}

inline Direction direction_of(double slope) noexcept
{
    if (std::abs(slope) < kFlatSlope)
        return Direction::flat;
    return slope > 0.0 ? Direction::increasing : Direction::decreasing;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0; // value at index 0 of the whole series
    double sse = 0.0;
};

/// A fitted piece over the inclusive index range [start_index, end_index].
/// Pieces of one result are disjoint: the next piece starts at end_index + 1.
struct Segment {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
    Direction direction = Direction::flat;

    std::size_t length() const noexcept { return end_index - start_index + 1; }
};

struct SegmentationResult {
    std::vector<Segment> segments;
    Algorithm algorithm = Algorithm::swab;
    double max_error = kDefaultMaxError;
    double total_sse = 0.0;
    double r_squared = 0.0;
    bool consolidated = false;
};

/// Ordinary least squares of value against absolute index over [start, end].
inline LineFit fit_line(std::span<const double> values, std::size_t start, std::size_t end)
{
    if (start >= values.size() || end >= values.size())
        fail(ErrorKind::IndexOutOfRange, "segment",
            "span [" + std::to_string(start) + ", " + std::to_string(end) + "] outside series of length "
                + std::to_string(values.size()));
    if (end <= start)
        fail(ErrorKind::DegenerateSpan, "segment",
            "span [" + std::to_string(start) + ", " + std::to_string(end) + "] needs end > start");

    const auto n = static_cast<double>(end - start + 1);
    const double mean_x = (static_cast<double>(start) + static_cast<double>(end)) / 2.0;
    double mean_y = 0.0;
    for (std::size_t i = start; i <= end; ++i)
        mean_y += values[i];
    mean_y /= n;

    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = start; i <= end; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        sxy += dx * (values[i] - mean_y);
        sxx += dx * dx;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    for (std::size_t i = start; i <= end; ++i) {
        const double r = values[i] - (fit.slope * static_cast<double>(i) + fit.intercept);
        fit.sse += r * r;
    }
    return fit;
}

inline LineFit fit_line(const TimeSeries& ts, std::size_t start, std::size_t end)
{
    return fit_line(ts.values(), start, end);
}

/// O(1) residual-SSE queries after O(N) setup, via prefix sums. The
/// segmentation searches use this for their cost evaluations; reported
/// segment statistics come from fit_line.
class SpanCost {
public:
    explicit SpanCost(std::span<const double> values)
        : sum_y_(values.size() + 1, 0.0L)
        , sum_iy_(values.size() + 1, 0.0L)
        , sum_yy_(values.size() + 1, 0.0L)
    {
        for (std::size_t i = 0; i < values.size(); ++i) {
            const long double y = values[i];
            sum_y_[i + 1] = sum_y_[i] + y;
            sum_iy_[i + 1] = sum_iy_[i] + static_cast<long double>(i) * y;
            sum_yy_[i + 1] = sum_yy_[i] + y * y;
        }
    }

    std::size_t size() const noexcept { return sum_y_.size() - 1; }

    /// Residual SSE of the least-squares line over [start, end]; 0 for a
    /// single point.
    double operator()(std::size_t start, std::size_t end) const noexcept
    {
        if (end <= start)
            return 0.0;
        const auto n = static_cast<long double>(end - start + 1);
        const long double sy = sum_y_[end + 1] - sum_y_[start];
        // x measured from `start` keeps the moments small.
        const long double sxy = (sum_iy_[end + 1] - sum_iy_[start]) - static_cast<long double>(start) * sy;
        const long double syy = sum_yy_[end + 1] - sum_yy_[start];
        const long double sx = n * (n - 1.0L) / 2.0L;
        const long double sxx = (n - 1.0L) * n * (2.0L * n - 1.0L) / 6.0L;
        const long double cxx = sxx - sx * sx / n;
        const long double cxy = sxy - sx * sy / n;
        const long double cyy = syy - sy * sy / n;
        const long double sse = cyy - cxy * cxy / cxx;
        return sse > 0.0L ? static_cast<double>(sse) : 0.0;
    }

private:
    std::vector<long double> sum_y_;
    std::vector<long double> sum_iy_;
    std::vector<long double> sum_yy_;
};

namespace detail {

using Span = std::pair<std::size_t, std::size_t>;

inline void require_threshold(std::size_t n, double max_error)
{
    if (n < 2)
        fail(ErrorKind::EmptySeries, "segment", "segmentation needs at least 2 points");
    if (!(max_error > 0.0) || !std::isfinite(max_error))
        fail(ErrorKind::NonPositiveThreshold, "segment", "max_error must be positive, got " + std::to_string(max_error));
}

/// Greedy extent of a line anchored at `start`: the furthest end whose fit
/// stays within budget. Residual SSE only grows as the span widens, so the
/// first failure bounds the search.
inline std::size_t best_line_end(const SpanCost& cost, std::size_t start, std::size_t last, double max_error)
{
    if (start >= last)
        return start;
    std::size_t end = start + 1;
    while (end + 1 <= last && cost(start, end + 1) <= max_error)
        ++end;
    return end;
}

/// A lone trailing point cannot form a segment. Borrow the last point of the
/// previous piece when it has one to spare (its fit can only improve), else
/// extend it.
inline void absorb_tail(std::vector<Span>& spans, std::size_t last)
{
    if (spans.empty())
        return;
    auto& prev = spans.back();
    if (prev.second >= last)
        return;
    if (prev.second - prev.first + 1 >= 3 && prev.second + 1 == last) {
        --prev.second;
        spans.emplace_back(prev.second + 1, last);
    } else {
        prev.second = last;
    }
}

/// Bottom-up merging over [lo, hi]. Starts from pairs (lo, lo+1), (lo+2,
/// lo+3), ... with an odd trailing point joining the last pair, then merges
/// the cheapest adjacent pair (leftmost on ties) while the merged fit stays
/// within budget.
inline std::vector<Span> bottom_up_spans(const SpanCost& cost, std::size_t lo, std::size_t hi, double max_error)
{
    std::vector<Span> spans;
    for (std::size_t s = lo; s + 1 <= hi; s += 2)
        spans.emplace_back(s, s + 1);
    if (spans.empty())
        return {{lo, hi}};
    if (spans.back().second < hi)
        spans.back().second = hi;

    std::vector<double> merge_cost(spans.size() > 1 ? spans.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < spans.size(); ++i)
        merge_cost[i] = cost(spans[i].first, spans[i + 1].second);

    while (!merge_cost.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < merge_cost.size(); ++i)
            if (merge_cost[i] < merge_cost[best])
                best = i;
        if (merge_cost[best] > max_error)
            break;
        spans[best].second = spans[best + 1].second;
        spans.erase(spans.begin() + static_cast<std::ptrdiff_t>(best) + 1);
        merge_cost.erase(merge_cost.begin() + static_cast<std::ptrdiff_t>(best));
        if (best > 0)
            merge_cost[best - 1] = cost(spans[best - 1].first, spans[best].second);
        if (best < merge_cost.size())
            merge_cost[best] = cost(spans[best].first, spans[best + 1].second);
    }
    return spans;
}

} // namespace detail

inline Segment make_segment(std::span<const double> values, std::size_t start, std::size_t end)
{
    const LineFit fit = fit_line(values, start, end);
    return Segment{start, end, fit.slope, fit.intercept, fit.sse, direction_of(fit.slope)};
}

/// Total SSE and r^2 = 1 - SSE / SST (clamped at 0). A constant series has
/// SST = 0; r^2 is then 1 for an exact fit and 0 otherwise.
inline std::pair<double, double> goodness(const SegmentationResult& result, std::span<const double> values)
{
    const auto& segs = result.segments;
    if (segs.empty() || segs.front().start_index != 0 || segs.back().end_index + 1 != values.size())
        fail(ErrorKind::MismatchedLength, "segment",
            "segments do not cover a series of length " + std::to_string(values.size()));
    for (std::size_t i = 1; i < segs.size(); ++i)
        if (segs[i].start_index != segs[i - 1].end_index + 1)
            fail(ErrorKind::MismatchedLength, "segment", "segments " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not contiguous");

    double total = 0.0;
    for (const auto& s : segs)
        total += s.sse;

    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double sst = 0.0;
    for (double v : values)
        sst += (v - mean) * (v - mean);

    double r2 = 0.0;
    if (sst == 0.0)
        r2 = total == 0.0 ? 1.0 : 0.0;
    else
        r2 = std::max(0.0, 1.0 - total / sst);
    return {total, r2};
}

inline std::pair<double, double> goodness(const SegmentationResult& result, const TimeSeries& ts)
{
    return goodness(result, ts.values());
}

namespace detail {

inline SegmentationResult finish(
    std::span<const double> values, const std::vector<Span>& spans, Algorithm algorithm, double max_error)
{
    SegmentationResult result;
    result.algorithm = algorithm;
    result.max_error = max_error;
    result.segments.reserve(spans.size());
    for (const auto& [a, b] : spans)
        result.segments.push_back(make_segment(values, a, b));
    std::tie(result.total_sse, result.r_squared) = goodness(result, values);
    return result;
}

} // namespace detail

/// Greedy left-to-right: each segment is the longest extension from its
/// anchor whose fit SSE stays within max_error; the next anchor is the
/// following point.
inline SegmentationResult sliding_window(std::span<const double> values, double max_error)
{
    detail::require_threshold(values.size(), max_error);
    const SpanCost cost(values);
    const std::size_t last = values.size() - 1;
    std::vector<detail::Span> spans;
    std::size_t anchor = 0;
    while (anchor < last) {
        const std::size_t end = detail::best_line_end(cost, anchor, last, max_error);
        spans.emplace_back(anchor, end);
        anchor = end + 1;
    }
    detail::absorb_tail(spans, last);
    return detail::finish(values, spans, Algorithm::sliding_window, max_error);
}

inline SegmentationResult sliding_window(const TimeSeries& ts, double max_error)
{
    return sliding_window(ts.values(), max_error);
}

/// Merge-based segmentation. The per-segment budget is honoured whenever the
/// initial pairing allows it; a 3-point trailing piece can start above it.
inline SegmentationResult bottom_up(std::span<const double> values, double max_error)
{
    detail::require_threshold(values.size(), max_error);
    const SpanCost cost(values);
    return detail::finish(
        values, detail::bottom_up_spans(cost, 0, values.size() - 1, max_error), Algorithm::bottom_up, max_error);
}

inline SegmentationResult bottom_up(const TimeSeries& ts, double max_error) { return bottom_up(ts.values(), max_error); }

/// ceil(N/8) clamped to [8, 256], and never more than N.
inline std::size_t default_swab_buffer(std::size_t n)
{
    const std::size_t b = std::clamp<std::size_t>((n + 7) / 8, 8, 256);
    return std::min(b, n);
}

/// Sliding Window And Bottom-up. Bottom-up runs over a buffer; its leftmost
/// segment is emitted and those points leave the buffer, which is then
/// refilled with greedy best-line chunks from the unread data until it is
/// back to `buffer_len` points (never beyond twice that). A buffer that
/// bottom-up leaves in one piece keeps growing instead. The last buffer is
/// emitted whole.
inline SegmentationResult swab(std::span<const double> values, double max_error, std::size_t buffer_len)
{
    detail::require_threshold(values.size(), max_error);
    const std::size_t n = values.size();
    if (buffer_len < 4 || buffer_len > n)
        fail(ErrorKind::BufferTooSmall, "segment",
            "buffer_len must lie in [4, " + std::to_string(n) + "], got " + std::to_string(buffer_len));

    const SpanCost cost(values);
    const std::size_t last = n - 1;
    const std::size_t upper = 2 * buffer_len;
    std::vector<detail::Span> spans;

    std::size_t lo = 0;
    std::size_t hi = buffer_len - 1;
    for (;;) {
        if (lo == hi) {
            // Only reachable at the end of the data.
            detail::absorb_tail(spans, last);
            break;
        }
        const auto buffered = detail::bottom_up_spans(cost, lo, hi, max_error);
        if (hi == last) {
            spans.insert(spans.end(), buffered.begin(), buffered.end());
            break;
        }
        if (buffered.size() == 1) {
            // The whole buffer is still one line: read on before committing,
            // so straight stretches are not cut at buffer boundaries.
            hi = std::max(hi + 1, detail::best_line_end(cost, hi + 1, last, max_error));
            continue;
        }
        spans.push_back(buffered.front());
        lo = buffered.front().second + 1;
        while (hi < last) {
            const std::size_t chunk_end = detail::best_line_end(cost, hi + 1, last, max_error);
            hi = std::max(hi + 1, std::min(chunk_end, lo + upper - 1));
            if (hi - lo + 1 >= buffer_len)
                break;
        }
    }
    return detail::finish(values, spans, Algorithm::swab, max_error);
}

inline SegmentationResult swab(std::span<const double> values, double max_error)
{
    const std::size_t buffer = default_swab_buffer(values.size());
    if (buffer < 4) {
        // Too short for a buffer; plain bottom-up is what SWAB degenerates to.
        auto r = bottom_up(values, max_error);
        r.algorithm = Algorithm::swab;
        return r;
    }
    return swab(values, max_error, buffer);
}

inline SegmentationResult swab(const TimeSeries& ts, double max_error, std::size_t buffer_len)
{
    return swab(ts.values(), max_error, buffer_len);
}

inline SegmentationResult swab(const TimeSeries& ts, double max_error) { return swab(ts.values(), max_error); }

inline SegmentationResult segment_series(std::span<const double> values, Algorithm algorithm, double max_error)
{
    switch (algorithm) {
    case Algorithm::sliding_window: return sliding_window(values, max_error);
    case Algorithm::bottom_up: return bottom_up(values, max_error);
    case Algorithm::swab: return swab(values, max_error);
    case Algorithm::optimal_dp: break;
    }
    fail(ErrorKind::InvalidConfig, "segment", "optimal_dp is a test oracle, not a threshold segmenter");
}

/// Merges adjacent segments that share a direction, refitting the line over
/// the union, until directions alternate.
inline SegmentationResult consolidate(const SegmentationResult& result, std::span<const double> values)
{
    SegmentationResult out = result;
    out.consolidated = true;
    auto& segs = out.segments;
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
            if (segs[i].direction == segs[i + 1].direction) {
                segs[i] = make_segment(values, segs[i].start_index, segs[i + 1].end_index);
                segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                merged = true;
                break;
            }
        }
    }
    std::tie(out.total_sse, out.r_squared) = goodness(out, values);
    return out;
}

inline SegmentationResult consolidate(const SegmentationResult& result, const TimeSeries& ts)
{
    return consolidate(result, ts.values());
}

inline constexpr std::size_t kOracleMaxLength = 64;

/// Globally SSE-minimal segmentation into exactly k disjoint pieces of at
/// least two points each. Dynamic program over precomputed span costs;
/// intended for tests and benchmarks on short series.
inline SegmentationResult optimal_segmentation_oracle(std::span<const double> values, std::size_t k)
{
    const std::size_t n = values.size();
    if (n > kOracleMaxLength)
        fail(ErrorKind::SeriesTooLong, "segment",
            "oracle accepts at most " + std::to_string(kOracleMaxLength) + " points, got " + std::to_string(n));
    if (n < 2 || k < 1 || k > n / 2)
        fail(ErrorKind::InvalidK, "segment",
            "k must lie in [1, " + std::to_string(n / 2) + "], got " + std::to_string(k));

    constexpr double inf = std::numeric_limits<double>::infinity();
    // cost[a][b]: SSE of one piece over [a, b], b >= a + 1.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, inf));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            cost[a][b] = fit_line(values, a, b).sse;

    // best[s][e]: minimal SSE covering [0, e] with s pieces; from[s][e] the
    // start of the last piece.
    std::vector<std::vector<double>> best(k + 1, std::vector<double>(n, inf));
    std::vector<std::vector<std::size_t>> from(k + 1, std::vector<std::size_t>(n, 0));
    for (std::size_t e = 1; e < n; ++e)
        best[1][e] = cost[0][e];
    for (std::size_t s = 2; s <= k; ++s) {
        for (std::size_t e = 2 * s - 1; e < n; ++e) {
            for (std::size_t start = 2 * (s - 1); start + 1 <= e; ++start) {
                const double candidate = best[s - 1][start - 1] + cost[start][e];
                if (candidate < best[s][e]) {
                    best[s][e] = candidate;
                    from[s][e] = start;
                }
            }
        }
    }

    std::vector<detail::Span> spans(k);
    std::size_t end = n - 1;
    for (std::size_t s = k; s >= 1; --s) {
        const std::size_t start = s == 1 ? 0 : from[s][end];
        spans[s - 1] = {start, end};
        if (s > 1)
            end = start - 1;
    }
    return detail::finish(values, spans, Algorithm::optimal_dp, 0.0);
}

inline SegmentationResult optimal_segmentation_oracle(const TimeSeries& ts, std::size_t k)
{
    return optimal_segmentation_oracle(ts.values(), k);
}

} // namespace t3
