#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace t3;

void expect_tiles(const SegmentationResult& r, std::size_t n)
{
    ASSERT_FALSE(r.segments.empty());
    EXPECT_EQ(r.segments.front().start_index, 0u);
    EXPECT_EQ(r.segments.back().end_index, n - 1);
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        EXPECT_GT(r.segments[i].end_index, r.segments[i].start_index);
        EXPECT_GE(r.segments[i].sse, 0.0);
        if (i > 0) {
            EXPECT_EQ(r.segments[i].start_index, r.segments[i - 1].end_index + 1);
        }
    }
    double sum = 0;
    for (const auto& s : r.segments)
        sum += s.sse;
    EXPECT_NEAR(r.total_sse, sum, 1e-9 * std::max(1.0, sum));
}

std::vector<double> linear(std::size_t n, double a, double b)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + b * static_cast<double>(i);
    return v;
}

TEST(FitLine, ExactLine)
{
    const std::vector<double> v = {0, 1, 2, 3};
    const auto f = fit_line(v, 0, 3);
    EXPECT_NEAR(f.slope, 1.0, 1e-15);
    EXPECT_NEAR(f.intercept, 0.0, 1e-15);
    EXPECT_NEAR(f.sse, 0.0, 1e-15);
}

TEST(FitLine, HandComputedTriangle)
{
    const std::vector<double> v = {0, 2, 0};
    const auto f = fit_line(v, 0, 2);
    EXPECT_NEAR(f.slope, 0.0, 1e-15);
    EXPECT_NEAR(f.intercept, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(f.sse, 8.0 / 3.0, 1e-14);
}

TEST(FitLine, ConstantPair)
{
    const std::vector<double> v = {5, 5};
    const auto f = fit_line(v, 0, 1);
    EXPECT_EQ(f.slope, 0.0);
    EXPECT_EQ(f.intercept, 5.0);
    EXPECT_EQ(f.sse, 0.0);
}

TEST(FitLine, InterceptIsAtAbsoluteIndexZero)
{
    const auto v = linear(20, 3.0, -0.5);
    const auto f = fit_line(v, 10, 15);
    EXPECT_NEAR(f.intercept, 3.0, 1e-12);
    EXPECT_NEAR(f.slope, -0.5, 1e-12);
}

TEST(FitLine, Errors)
{
    const std::vector<double> v = {1, 2, 3};
    EXPECT_THROW(fit_line(v, 1, 1), Error);
    try {
        fit_line(v, 1, 1);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateSpan);
    }
    try {
        fit_line(v, 0, 3);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
    }
}

TEST(FitLine, PrefixSumCostMatchesDirectFit)
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(5.0, 3.0);
    std::vector<double> v(200);
    for (auto& x : v)
        x = nd(rng);
    const SpanCost cost(v);
    for (std::size_t a = 0; a < v.size(); a += 13)
        for (std::size_t b = a + 1; b < v.size(); b += 17) {
            EXPECT_NEAR(cost(a, b), fit_line(v, a, b).sse, 1e-9);
            EXPECT_NEAR(cost(a, b), test::naive_sse(v, a, b), 1e-8);
        }
}

TEST(SlidingWindow, LinearSeriesIsOneSegment)
{
    const auto v = linear(50, 1.0, 0.3);
    const auto r = sliding_window(v, 0.01);
    ASSERT_EQ(r.segments.size(), 1u);
    EXPECT_NEAR(r.total_sse, 0.0, 1e-12);
    EXPECT_EQ(r.segments[0].direction, Direction::increasing);
}

TEST(SlidingWindow, SplitsAtJump)
{
    const std::vector<double> v = {0, 1, 2, 3, 10, 11, 12, 13};
    const auto r = sliding_window(v, 0.5);
    ASSERT_EQ(r.segments.size(), 2u);
    EXPECT_EQ(r.segments[0].end_index, 3u);
    EXPECT_EQ(r.segments[1].start_index, 4u);
    // Every alternative 2-piece split is worse.
    EXPECT_EQ(test::brute_force_two_piece_split(v), 4u);
}

TEST(SlidingWindow, Errors)
{
    const std::vector<double> v = {1, 2, 3};
    try {
        sliding_window(v, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPositiveThreshold);
    }
    const std::vector<double> one = {1};
    try {
        sliding_window(one, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySeries);
    }
}

TEST(BottomUp, ConstantSeriesIsOneSegment)
{
    const std::vector<double> v(31, 4.0);
    const auto r = bottom_up(v, 0.1);
    ASSERT_EQ(r.segments.size(), 1u);
    EXPECT_EQ(r.segments[0].direction, Direction::flat);
    EXPECT_EQ(r.r_squared, 1.0);
}

TEST(BottomUp, VShapeMeetsAtTheBottom)
{
    const std::vector<double> v = {4, 3, 2, 1, 0, 1, 2, 3, 4};
    const auto r = bottom_up(v, 0.05);
    ASSERT_EQ(r.segments.size(), 2u);
    // Disjoint pieces: the vertex lands in one of them. The exhaustive
    // 2-piece search agrees on where the second piece begins.
    EXPECT_EQ(r.segments[1].start_index, test::brute_force_two_piece_split(v));
    const auto oracle = optimal_segmentation_oracle(v, 2);
    EXPECT_EQ(oracle.segments[1].start_index, r.segments[1].start_index);
    EXPECT_NEAR(oracle.total_sse, r.total_sse, 1e-12);
}

TEST(BottomUp, OddLengthTrailingPointJoinsLastPair)
{
    // Noisy enough that no merge is affordable at a tiny threshold.
    const std::vector<double> v = {0, 5, -3, 8, 1, -6, 9};
    const auto r = bottom_up(v, 1e-9);
    ASSERT_EQ(r.segments.size(), 3u);
    EXPECT_EQ(r.segments[2].start_index, 4u);
    EXPECT_EQ(r.segments[2].end_index, 6u);
}

TEST(Swab, LinearSeriesIsOneSegment)
{
    const auto v = linear(300, -2.0, 0.01);
    const auto r = swab(v, 0.1);
    ASSERT_EQ(r.segments.size(), 1u);
}

TEST(Swab, RecoversThreeSlopeBreakpoints)
{
    std::vector<double> v;
    double y = 0;
    for (int piece = 0; piece < 3; ++piece) {
        const double slope = piece == 0 ? 1.0 : piece == 1 ? 0.0 : -1.0;
        for (int i = 0; i < 40; ++i) {
            v.push_back(y);
            y += slope;
        }
    }
    const auto r = swab(v, 1e-6);
    ASSERT_EQ(r.segments.size(), 3u);
    // With continuous pieces the corner sample fits either side exactly, so
    // allow the cut to sit one step either way of the slope change.
    EXPECT_NEAR(static_cast<double>(r.segments[1].start_index), 40.0, 1.0);
    EXPECT_NEAR(static_cast<double>(r.segments[2].start_index), 80.0, 1.0);
    EXPECT_NEAR(r.total_sse, 0.0, 1e-9);
    EXPECT_EQ(r.segments[0].direction, Direction::increasing);
    EXPECT_EQ(r.segments[1].direction, Direction::flat);
    EXPECT_EQ(r.segments[2].direction, Direction::decreasing);
}

TEST(Swab, BufferBounds)
{
    const auto v = linear(10, 0, 1);
    for (std::size_t bad : {std::size_t{3}, std::size_t{11}}) {
        try {
            swab(v, 1.0, bad);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::BufferTooSmall);
        }
    }
    EXPECT_NO_THROW(swab(v, 1.0, 4));
    EXPECT_NO_THROW(swab(v, 1.0, 10));
}

TEST(Swab, DefaultBuffer)
{
    EXPECT_EQ(default_swab_buffer(10), 8u);
    EXPECT_EQ(default_swab_buffer(5), 5u);
    EXPECT_EQ(default_swab_buffer(351), 44u);
    EXPECT_EQ(default_swab_buffer(100000), 256u);
}

TEST(Consolidate, SingleSegmentUnchanged)
{
    const auto v = linear(20, 0, 1);
    const auto r = sliding_window(v, 1.0);
    const auto c = consolidate(r, v);
    ASSERT_EQ(c.segments.size(), 1u);
    EXPECT_EQ(c.segments[0].start_index, r.segments[0].start_index);
    EXPECT_EQ(c.segments[0].end_index, r.segments[0].end_index);
    EXPECT_TRUE(c.consolidated);
}

TEST(Consolidate, SameDirectionPiecesMergeWithRefit)
{
    std::vector<double> v;
    for (int i = 0; i < 10; ++i)
        v.push_back(0.5 * i);
    for (int i = 0; i < 10; ++i)
        v.push_back(4.5 + 0.7 * (i + 1));
    const auto r = sliding_window(v, 1e-9);
    ASSERT_GE(r.segments.size(), 2u);
    const auto c = consolidate(r, v);
    ASSERT_EQ(c.segments.size(), 1u);
    const auto refit = fit_line(v, 0, v.size() - 1);
    EXPECT_DOUBLE_EQ(c.segments[0].slope, refit.slope);
    EXPECT_DOUBLE_EQ(c.segments[0].sse, refit.sse);
}

TEST(Goodness, ExactFitAndConstant)
{
    const std::vector<double> v = {0, 1, 2, 3, 10, 11, 12, 13};
    const auto r = sliding_window(v, 0.5);
    EXPECT_NEAR(r.total_sse, 0.0, 1e-12);
    EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
    const std::vector<double> c(6, 2.0);
    EXPECT_EQ(bottom_up(c, 1.0).r_squared, 1.0);
}

TEST(Goodness, TriangleHasZeroRSquared)
{
    const std::vector<double> v = {0, 2, 0};
    SegmentationResult r;
    r.segments.push_back(make_segment(v, 0, 2));
    const auto [sse, r2] = goodness(r, v);
    EXPECT_NEAR(sse, 8.0 / 3.0, 1e-14);
    EXPECT_NEAR(r2, 0.0, 1e-14);
}

TEST(Goodness, RejectsNonTiling)
{
    const std::vector<double> v = {0, 1, 2, 3};
    SegmentationResult r;
    r.segments.push_back(make_segment(v, 0, 2));
    try {
        goodness(r, v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MismatchedLength);
    }
}

TEST(Oracle, Examples)
{
    const auto v = linear(30, 1, 2);
    EXPECT_NEAR(optimal_segmentation_oracle(v, 1).total_sse, 0.0, 1e-9);

    std::vector<double> step(8, 0.0);
    step.insert(step.end(), 8, 10.0);
    const auto r = optimal_segmentation_oracle(step, 2);
    EXPECT_EQ(r.segments[1].start_index, 8u);
    EXPECT_EQ(test::brute_force_two_piece_split(step), 8u);
}

TEST(Oracle, Errors)
{
    const std::vector<double> long_series(65, 1.0);
    try {
        optimal_segmentation_oracle(long_series, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SeriesTooLong);
    }
    const std::vector<double> v(10, 1.0);
    for (std::size_t k : {std::size_t{0}, std::size_t{6}}) {
        try {
            optimal_segmentation_oracle(v, k);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidK);
        }
    }
}

TEST(Oracle, MatchesExhaustiveTwoPieceSearch)
{
    synthetic::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(8 + rng.index(0, 30));
        for (auto& x : v)
            x = rng.normal();
        const auto r = optimal_segmentation_oracle(v, 2);
        const auto cut = test::brute_force_two_piece_split(v);
        const double brute = test::naive_sse(v, 0, cut - 1) + test::naive_sse(v, cut, v.size() - 1);
        EXPECT_NEAR(r.total_sse, brute, 1e-9);
    }
}

// --- properties ---------------------------------------------------------------

class SegmentProperties : public ::testing::TestWithParam<Algorithm> {};

TEST_P(SegmentProperties, TilingThresholdAndDeterminism)
{
    synthetic::Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.index(0, 400);
        const double noise = rng.uniform(0.0, 1.0);
        const auto s = synthetic::noisy_piecewise_linear(rng, n, 1 + rng.index(0, 6), 0.3, noise, 2);
        const double max_error = rng.uniform(0.05, 5.0);
        const auto r = segment_series(s.values, GetParam(), max_error);
        expect_tiles(r, n);
        if (GetParam() != Algorithm::bottom_up)
            for (const auto& seg : r.segments)
                if (seg.length() > 3) {
                    EXPECT_LE(seg.sse, max_error + 1e-12) << "n=" << n << " trial=" << trial;
                }
        const auto again = segment_series(s.values, GetParam(), max_error);
        ASSERT_EQ(again.segments.size(), r.segments.size());
        EXPECT_EQ(again.total_sse, r.total_sse);
    }
}

TEST_P(SegmentProperties, OracleLowerBound)
{
    synthetic::Rng rng(7);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 4 + rng.index(0, 60);
        std::vector<double> v(n);
        for (auto& x : v)
            x = rng.normal() + 0.2 * static_cast<double>(rng.index(0, 3));
        const auto r = segment_series(v, GetParam(), rng.uniform(0.1, 3.0));
        const auto oracle = optimal_segmentation_oracle(v, r.segments.size());
        EXPECT_GE(r.total_sse, oracle.total_sse - 1e-9 * std::max(1.0, oracle.total_sse));
    }
}

TEST_P(SegmentProperties, ConsolidationFixpointAlternates)
{
    synthetic::Rng rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        const auto s = synthetic::noisy_piecewise_linear(rng, 200, 5, 0.2, 0.3);
        const auto r = segment_series(s.values, GetParam(), 1.0);
        const auto c = consolidate(r, s.values);
        expect_tiles(c, 200);
        for (std::size_t i = 1; i < c.segments.size(); ++i)
            EXPECT_NE(c.segments[i].direction, c.segments[i - 1].direction);
        const auto cc = consolidate(c, s.values);
        ASSERT_EQ(cc.segments.size(), c.segments.size());
        for (std::size_t i = 0; i < c.segments.size(); ++i) {
            EXPECT_EQ(cc.segments[i].start_index, c.segments[i].start_index);
            EXPECT_EQ(cc.segments[i].end_index, c.segments[i].end_index);
            EXPECT_EQ(cc.segments[i].slope, c.segments[i].slope);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(AllAlgorithms, SegmentProperties,
    ::testing::Values(Algorithm::sliding_window, Algorithm::bottom_up, Algorithm::swab),
    [](const auto& info) { return std::string(to_string(info.param)); });

TEST(SlidingWindow, TighterThresholdNeverFewerSegments)
{
    synthetic::Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const auto s = synthetic::noisy_piecewise_linear(rng, 300, 4, 0.2, 0.5);
        std::size_t previous = 0;
        for (double e : {20.0, 10.0, 5.0, 2.75, 1.0, 0.5, 0.1, 0.01}) {
            const auto count = sliding_window(s.values, e).segments.size();
            EXPECT_GE(count, previous) << "threshold " << e;
            previous = count;
        }
    }
}

} // namespace
