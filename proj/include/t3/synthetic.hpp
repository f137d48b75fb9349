#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace t3::synthetic {

/// Seeded generators used by benchmarks and the acceptance suite. Normal
/// deviates use Box-Muller over 53-bit uniforms so outputs do not depend on
/// the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : engine_(seed)
    {
    }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t index(std::size_t lo, std::size_t hi) // inclusive
    {
        return lo + static_cast<std::size_t>(uniform() * static_cast<double>(hi - lo + 1));
    }

    double normal()
    {
        if (spare_) {
            spare_ = false;
            return spare_value_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_value_ = r * std::sin(2.0 * std::numbers::pi * u2);
        spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    bool spare_ = false;
    double spare_value_ = 0.0;
};

struct PlantedSeries {
    std::vector<double> values;
    std::vector<std::size_t> breakpoints; // first index of each new piece
};

/// Continuous piecewise-linear signal plus Gaussian noise. Pieces have
/// random lengths (>= min_piece) and slopes in [-max_slope, max_slope].
inline PlantedSeries noisy_piecewise_linear(
    Rng& rng, std::size_t n, std::size_t pieces, double max_slope, double noise_sd, std::size_t min_piece = 10)
{
    PlantedSeries out;
    pieces = std::max<std::size_t>(1, std::min(pieces, n / min_piece));
    // Breakpoints: draw until all pieces respect the minimum length.
    std::vector<std::size_t> cuts;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        cuts.clear();
        for (std::size_t i = 1; i < pieces; ++i)
            cuts.push_back(rng.index(min_piece, n - min_piece));
        std::sort(cuts.begin(), cuts.end());
        bool ok = true;
        std::size_t prev = 0;
        for (std::size_t c : cuts) {
            if (c - prev < min_piece)
                ok = false;
            prev = c;
        }
        if (ok && n - prev >= min_piece)
            break;
    }
    out.breakpoints = cuts;
    double level = rng.uniform(2.0, 8.0);
    double slope = rng.uniform(-max_slope, max_slope);
    std::size_t next_cut = 0;
    out.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (next_cut < cuts.size() && i == cuts[next_cut]) {
            slope = rng.uniform(-max_slope, max_slope);
            ++next_cut;
        }
        out.values.push_back(level + noise_sd * rng.normal());
        level += slope;
    }
    return out;
}

/// Two i.i.d. Gaussian stretches with different means. The change point is
/// drawn from the middle half of the series.
inline PlantedSeries two_level_noise(Rng& rng, std::size_t n, double level_gap, double noise_sd = 1.0)
{
    PlantedSeries out;
    const std::size_t change = rng.index(n / 4, 3 * n / 4);
    out.breakpoints = {change};
    out.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.values.push_back((i < change ? 0.0 : level_gap) + noise_sd * rng.normal());
    return out;
}

/// Gaussian random walk.
inline std::vector<double> random_walk(Rng& rng, std::size_t n, double step_sd = 1.0)
{
    std::vector<double> v(n);
    double x = 0.0;
    for (auto& e : v) {
        x += step_sd * rng.normal();
        e = x;
    }
    return v;
}

} // namespace t3::synthetic
