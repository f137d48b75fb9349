#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "t3/error.hpp"

namespace t3 {

namespace detail {

inline std::string trim_decimals(std::string s)
{
    if (s.find('.') == std::string::npos)
        return s;
    while (!s.empty() && s.back() == '0')
        s.pop_back();
    if (!s.empty() && s.back() == '.')
        s.pop_back();
    return s;
}

inline std::string plain_number(double x)
{
    char buf[64];
    const double a = std::abs(x);
    if (a >= 1.0) {
        std::snprintf(buf, sizeof buf, "%.2f", x);
    } else {
        // Two significant digits in fixed notation; anything below 1e-12 is 0.
        const int decimals = 1 - static_cast<int>(std::floor(std::log10(a)));
        if (decimals > 12)
            return "0";
        std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    }
    std::string s = trim_decimals(buf);
    if (s == "-0")
        s = "0";
    return s;
}

} // namespace detail

/// Magnitude-scaled rendering: "N.n billion|million|thousand" at or above
/// 1e9/1e6/1e3, otherwise at most two decimals (two significant digits below
/// 1). Never scientific notation. `unit` is appended after a space.
inline std::string verbalize_number(double x, std::string_view unit = {})
{
    if (!std::isfinite(x))
        fail(ErrorKind::NonFiniteValue, "narrate", "cannot verbalize a non-finite value");

    struct Scale {
        double factor;
        const char* word;
    };
    static constexpr Scale scales[] = {{1e9, "billion"}, {1e6, "million"}, {1e3, "thousand"}};

    std::string text;
    const double a = std::abs(x);
    if (x == 0.0) {
        text = "0";
    } else {
        for (std::size_t s = 0; s < 3 && text.empty(); ++s) {
            if (a < scales[s].factor)
                continue;
            const double scaled = x / scales[s].factor;
            // 999.96 thousand rounds to 1000.0 thousand; promote instead.
            if (s > 0 && std::round(std::abs(scaled) * 10.0) >= 10000.0) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.1f %s", x / scales[s - 1].factor, scales[s - 1].word);
                text = buf;
                break;
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.1f %s", scaled, scales[s].word);
            text = buf;
        }
        if (text.empty()) {
            text = detail::plain_number(x);
            if (text == "1000" || text == "-1000")
                text = x < 0 ? "-1.0 thousand" : "1.0 thousand";
        }
    }
    if (!unit.empty()) {
        text += ' ';
        text += unit;
    }
    return text;
}

/// One decimal place below 1000%, magnitude words above that.
inline std::string verbalize_percent(double pct)
{
    if (!std::isfinite(pct))
        fail(ErrorKind::NonFiniteValue, "narrate", "cannot verbalize a non-finite percentage");
    if (std::abs(pct) >= 1000.0)
        return verbalize_number(pct) + "%";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f%%", pct);
    std::string s = buf;
    if (s == "-0.0%")
        s = "0.0%";
    return s;
}

} // namespace t3
