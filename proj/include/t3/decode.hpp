#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "t3/error.hpp"

namespace t3 {

using TokenId = std::uint32_t;

inline constexpr double kDistributionTolerance = 1e-9;

/// Next-token probabilities keyed by token id. Validated on construction:
/// non-empty, finite, non-negative, summing to 1 within 1e-9.
class TokenDistribution {
public:
    explicit TokenDistribution(std::map<TokenId, double> probabilities)
        : probs_(std::move(probabilities))
    {
        if (probs_.empty())
            fail(ErrorKind::InvalidDistribution, "decode", "empty distribution");
        double sum = 0.0;
        for (const auto& [id, p] : probs_) {
            if (!std::isfinite(p) || p < 0.0)
                fail(ErrorKind::InvalidDistribution, "decode", "token " + std::to_string(id) + " has invalid mass");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kDistributionTolerance)
            fail(ErrorKind::InvalidDistribution, "decode", "probabilities sum to " + std::to_string(sum));
    }

    const std::map<TokenId, double>& probabilities() const noexcept { return probs_; }
    std::size_t size() const noexcept { return probs_.size(); }

    double operator[](TokenId id) const
    {
        const auto it = probs_.find(id);
        return it == probs_.end() ? 0.0 : it->second;
    }

    /// Tokens by descending probability, ascending id on ties.
    std::vector<std::pair<TokenId, double>> ranked() const
    {
        std::vector<std::pair<TokenId, double>> v(probs_.begin(), probs_.end());
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        return v;
    }

    friend bool operator==(const TokenDistribution&, const TokenDistribution&) = default;

private:
    std::map<TokenId, double> probs_;
};

enum class Strategy { basic, top_k, top_p };

constexpr std::string_view to_string(Strategy s) noexcept
{
    switch (s) {
    case Strategy::basic: return "basic";
    case Strategy::top_k: return "top_k";
    case Strategy::top_p: return "top_p";
    }
    return "unknown";
}

inline std::optional<Strategy> parse_strategy(std::string_view name)
{
    for (auto s : {Strategy::basic, Strategy::top_k, Strategy::top_p})
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

struct DecodingConfig {
    Strategy strategy = Strategy::top_p;
    std::size_t k = 50;
    double p = 0.92;
    std::uint64_t seed = 0;
    std::size_t max_tokens = 512;

    void validate() const
    {
        if (k < 1)
            fail(ErrorKind::InvalidK, "decode", "k must be at least 1");
        if (!(p > 0.0 && p <= 1.0))
            fail(ErrorKind::InvalidP, "decode", "p must lie in (0, 1], got " + std::to_string(p));
    }
};

namespace detail {

inline TokenDistribution keep_renormalized(
    const TokenDistribution& dist, std::span<const std::pair<TokenId, double>> kept)
{
    if (kept.size() == dist.size())
        return dist;
    double mass = 0.0;
    for (const auto& [id, p] : kept)
        mass += p;
    std::map<TokenId, double> out;
    if (mass <= 0.0) {
        // All kept tokens had zero mass; spread uniformly.
        for (const auto& [id, p] : kept)
            out.emplace(id, 1.0 / static_cast<double>(kept.size()));
    } else {
        for (const auto& [id, p] : kept)
            out.emplace(id, p / mass);
    }
    return TokenDistribution(std::move(out));
}

/// 53 random bits mapped to [0, 1). Spelled out rather than delegated to
/// std::uniform_real_distribution, whose algorithm varies by library.
inline double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace detail

/// Draws a token with probability proportional to its mass. Tokens are
/// scanned in ascending id order against one uniform draw.
inline TokenId sample_basic(const TokenDistribution& dist, std::mt19937_64& rng)
{
    const double u = detail::unit_interval(rng);
    double total = 0.0;
    for (const auto& [id, p] : dist.probabilities())
        total += p;
    const double target = u * total;
    double cumulative = 0.0;
    std::optional<TokenId> last_positive;
    for (const auto& [id, p] : dist.probabilities()) {
        if (p <= 0.0)
            continue;
        cumulative += p;
        last_positive = id;
        if (target < cumulative)
            return id;
    }
    return *last_positive;
}

/// Keeps the k most probable tokens (smaller id wins ties) and renormalizes.
inline TokenDistribution truncate_top_k(const TokenDistribution& dist, std::size_t k)
{
    if (k < 1)
        fail(ErrorKind::InvalidK, "decode", "k must be at least 1");
    if (k >= dist.size())
        return dist;
    const auto ranked = dist.ranked();
    return detail::keep_renormalized(dist, std::span(ranked).first(k));
}

/// Keeps the shortest probability-ranked prefix whose cumulative mass is
/// >= p, then renormalizes.
inline TokenDistribution truncate_top_p(const TokenDistribution& dist, double p)
{
    if (!(p > 0.0 && p <= 1.0))
        fail(ErrorKind::InvalidP, "decode", "p must lie in (0, 1], got " + std::to_string(p));
    const auto ranked = dist.ranked();
    double cumulative = 0.0;
    std::size_t keep = ranked.size();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        cumulative += ranked[i].second;
        if (cumulative >= p) {
            keep = i + 1;
            break;
        }
    }
    return detail::keep_renormalized(dist, std::span(ranked).first(keep));
}

inline TokenDistribution apply_strategy(const TokenDistribution& dist, const DecodingConfig& config)
{
    switch (config.strategy) {
    case Strategy::basic: return dist;
    case Strategy::top_k: return truncate_top_k(dist, config.k);
    case Strategy::top_p: return truncate_top_p(dist, config.p);
    }
    return dist;
}

/// Truncate per the configured strategy, then draw.
inline TokenId sample(const TokenDistribution& dist, const DecodingConfig& config, std::mt19937_64& rng)
{
    return sample_basic(apply_strategy(dist, config), rng);
}

/// Product of per-step conditionals for `sequence`; a token absent from its
/// step contributes probability 0.
inline double chain_probability(std::span<const TokenDistribution> steps, std::span<const TokenId> sequence)
{
    if (steps.size() != sequence.size())
        fail(ErrorKind::LengthMismatch, "decode",
            std::to_string(steps.size()) + " step distributions for a sequence of " + std::to_string(sequence.size()));
    double product = 1.0;
    for (std::size_t t = 0; t < steps.size(); ++t)
        product *= steps[t][sequence[t]];
    return std::clamp(product, 0.0, 1.0);
}

} // namespace t3
