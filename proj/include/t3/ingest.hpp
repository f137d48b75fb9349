#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "t3/error.hpp"

namespace t3 {

/// How much of an ISO-8601 timestamp was present in the source. Rendering
/// reproduces the source precision so "1999" stays "1999".
enum class TimePrecision { year, month, day, second };

struct TimePoint {
    std::chrono::sys_seconds instant{};
    TimePrecision precision = TimePrecision::day;

    friend bool operator==(const TimePoint&, const TimePoint&) = default;
    friend auto operator<=>(const TimePoint& a, const TimePoint& b) { return a.instant <=> b.instant; }
};

namespace detail {

inline bool parse_int(std::string_view s, int& out)
{
    if (s.empty())
        return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Accepts YYYY, YYYY-MM, YYYY-MM-DD and YYYY-MM-DDTHH:MM:SS with an optional
/// trailing 'Z'.
inline std::optional<TimePoint> parse_iso8601(std::string_view text)
{
    using namespace std::chrono;
    text = detail::trim(text);
    int y = 0, mo = 1, d = 1, hh = 0, mi = 0, ss = 0;
    TimePrecision precision = TimePrecision::year;

    if (text.size() < 4 || !detail::parse_int(text.substr(0, 4), y))
        return std::nullopt;
    std::string_view rest = text.substr(4);
    if (!rest.empty()) {
        if (rest.size() < 3 || rest[0] != '-' || !detail::parse_int(rest.substr(1, 2), mo))
            return std::nullopt;
        precision = TimePrecision::month;
        rest = rest.substr(3);
    }
    if (!rest.empty()) {
        if (rest.size() < 3 || rest[0] != '-' || !detail::parse_int(rest.substr(1, 2), d))
            return std::nullopt;
        precision = TimePrecision::day;
        rest = rest.substr(3);
    }
    if (!rest.empty()) {
        if (rest.back() == 'Z')
            rest.remove_suffix(1);
        if (rest.size() != 9 || (rest[0] != 'T' && rest[0] != ' ') || rest[3] != ':' || rest[6] != ':')
            return std::nullopt;
        if (!detail::parse_int(rest.substr(1, 2), hh) || !detail::parse_int(rest.substr(4, 2), mi)
            || !detail::parse_int(rest.substr(7, 2), ss))
            return std::nullopt;
        if (hh > 23 || mi > 59 || ss > 60)
            return std::nullopt;
        precision = TimePrecision::second;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        return std::nullopt;
    const sys_seconds instant = sys_days{ymd} + hours{hh} + minutes{mi} + seconds{ss};
    return TimePoint{instant, precision};
}

inline std::string format_iso8601(const TimePoint& tp)
{
    using namespace std::chrono;
    const auto day_point = floor<days>(tp.instant);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{tp.instant - day_point};
    char buf[32];
    const int y = static_cast<int>(ymd.year());
    const unsigned m = static_cast<unsigned>(ymd.month());
    const unsigned d = static_cast<unsigned>(ymd.day());
    switch (tp.precision) {
    case TimePrecision::year: std::snprintf(buf, sizeof buf, "%04d", y); break;
    case TimePrecision::month: std::snprintf(buf, sizeof buf, "%04d-%02u", y, m); break;
    case TimePrecision::day: std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d); break;
    case TimePrecision::second:
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d, static_cast<int>(hms.hours().count()),
            static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
        break;
    }
    return buf;
}

struct Measure {
    std::string name; // e.g. "COVID19 cases"
    std::string unit; // e.g. "cases"; may be empty

    friend bool operator==(const Measure&, const Measure&) = default;
};

/// Immutable univariate series. Construction validates every invariant, so a
/// TimeSeries in hand always has N >= 2, finite values and strictly
/// increasing timestamps.
class TimeSeries {
public:
    TimeSeries(std::string entity, Measure measure, std::vector<TimePoint> timestamps, std::vector<double> values,
        bool transformed = false)
        : entity_(std::move(entity))
        , measure_(std::move(measure))
        , timestamps_(std::move(timestamps))
        , values_(std::move(values))
        , transformed_(transformed)
    {
        if (timestamps_.size() != values_.size())
            fail(ErrorKind::MismatchedLength, "ingest",
                "timestamps (" + std::to_string(timestamps_.size()) + ") and values (" + std::to_string(values_.size())
                    + ") differ in length");
        if (values_.size() < 2)
            fail(ErrorKind::EmptySeries, "ingest", "series needs at least 2 observations, got " + std::to_string(values_.size()));
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i]))
                fail(ErrorKind::UnparseableValue, "ingest", "non-finite value at index " + std::to_string(i));
            if (i > 0 && !(timestamps_[i - 1].instant < timestamps_[i].instant))
                fail(ErrorKind::NonMonotonicTime, "ingest",
                    "timestamp at index " + std::to_string(i) + " (" + format_iso8601(timestamps_[i])
                        + ") does not follow " + format_iso8601(timestamps_[i - 1]));
        }
    }

    const std::string& entity() const noexcept { return entity_; }
    const Measure& measure() const noexcept { return measure_; }
    std::span<const TimePoint> timestamps() const noexcept { return timestamps_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool transformed() const noexcept { return transformed_; }

    /// Same metadata and timestamps, new values.
    TimeSeries with_values(std::vector<double> values, bool transformed) const
    {
        return TimeSeries(entity_, measure_, timestamps_, std::move(values), transformed);
    }

    /// True when consecutive gaps differ; regression runs on index positions
    /// regardless, so callers surface this as a warning.
    bool irregularly_spaced() const
    {
        if (timestamps_.size() < 3)
            return false;
        const auto first_gap = timestamps_[1].instant - timestamps_[0].instant;
        for (std::size_t i = 2; i < timestamps_.size(); ++i) {
            const auto gap = timestamps_[i].instant - timestamps_[i - 1].instant;
            // Calendar months and years vary in length; compare in days with slack.
            const auto diff = std::chrono::abs(gap - first_gap);
            if (diff > std::chrono::hours(24 * 3))
                return true;
        }
        return false;
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::string entity_;
    Measure measure_;
    std::vector<TimePoint> timestamps_;
    std::vector<double> values_;
    bool transformed_ = false;
};

struct SeriesSchema {
    std::string time_column = "date";
    std::string value_column = "value";
    /// When non-empty and present in the header, only rows whose entity
    /// column equals `entity` are loaded.
    std::string entity_column = "entity";
    std::string entity;
    Measure measure;
};

struct SeriesStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0; // sample standard deviation (divisor n - 1)
};

namespace detail {

/// Splits one CSV record. Supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

inline std::string quote_csv(std::string_view field)
{
    if (field.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out += '"';
    return out;
}

inline std::optional<double> parse_real(std::string_view text)
{
    text = trim(text);
    if (text.empty())
        return std::nullopt;
    if (text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

} // namespace detail

/// Loads a comma-separated file with a header row. Data rows are numbered
/// from 1 (the header is row 0) in error messages.
inline TimeSeries load_series(const std::filesystem::path& path, const SeriesSchema& schema)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "ingest", "cannot open input file " + path.string());

    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::EmptySeries, "ingest", path.string() + " is empty");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF && static_cast<unsigned char>(line[1]) == 0xBB
        && static_cast<unsigned char>(line[2]) == 0xBF)
        line.erase(0, 3);

    const auto header = detail::split_csv_line(line);
    auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (detail::trim(header[i]) == name)
                return i;
        return std::nullopt;
    };
    const auto time_col = column_of(schema.time_column);
    if (!time_col)
        fail(ErrorKind::MissingColumn, "ingest", "column '" + schema.time_column + "' not found in " + path.string());
    const auto value_col = column_of(schema.value_column);
    if (!value_col)
        fail(ErrorKind::MissingColumn, "ingest", "column '" + schema.value_column + "' not found in " + path.string());
    std::optional<std::size_t> entity_col;
    if (!schema.entity.empty() && !schema.entity_column.empty())
        entity_col = column_of(schema.entity_column);

    std::vector<TimePoint> timestamps;
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty())
            continue;
        const auto fields = detail::split_csv_line(line);
        const std::size_t needed = std::max({*time_col, *value_col, entity_col.value_or(0)});
        if (fields.size() <= needed)
            fail(ErrorKind::UnparseableValue, "ingest",
                "row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields");
        if (entity_col && detail::trim(fields[*entity_col]) != schema.entity)
            continue;
        const auto tp = parse_iso8601(fields[*time_col]);
        if (!tp)
            fail(ErrorKind::UnparseableValue, "ingest",
                "row " + std::to_string(row) + ": cannot parse timestamp '" + fields[*time_col] + "'");
        const auto value = detail::parse_real(fields[*value_col]);
        if (!value)
            fail(ErrorKind::UnparseableValue, "ingest",
                "row " + std::to_string(row) + ": cannot parse value '" + fields[*value_col] + "'");
        if (!timestamps.empty() && !(timestamps.back().instant < tp->instant))
            fail(ErrorKind::NonMonotonicTime, "ingest",
                "row " + std::to_string(row) + ": timestamp " + format_iso8601(*tp) + " does not follow "
                    + format_iso8601(timestamps.back()));
        timestamps.push_back(*tp);
        values.push_back(*value);
    }
    if (values.empty())
        fail(ErrorKind::EmptySeries, "ingest",
            "no observations" + (entity_col ? " for entity '" + schema.entity + "'" : std::string()) + " in "
                + path.string());
    return TimeSeries(schema.entity, schema.measure, std::move(timestamps), std::move(values));
}

/// Writes the on-disk format read by load_series: header
/// "<time>,<entity>,<value>" with values printed to round-trip precision.
inline void write_series(const TimeSeries& ts, const std::filesystem::path& path, const SeriesSchema& schema)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "ingest", "cannot write " + path.string());
    const bool with_entity = !schema.entity_column.empty();
    out << detail::quote_csv(schema.time_column);
    if (with_entity)
        out << ',' << detail::quote_csv(schema.entity_column);
    out << ',' << detail::quote_csv(schema.value_column) << '\n';
    char buf[64];
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", ts.values()[i]);
        out << format_iso8601(ts.timestamps()[i]);
        if (with_entity)
            out << ',' << detail::quote_csv(ts.entity());
        out << ',' << buf << '\n';
    }
    if (!out)
        fail(ErrorKind::Io, "ingest", "write failed for " + path.string());
}

/// ln(1 + x) element-wise. Zeros stay zero.
inline TimeSeries log_transform(const TimeSeries& ts)
{
    std::vector<double> out;
    out.reserve(ts.size());
    const auto values = ts.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0)
            fail(ErrorKind::NegativeValue, "ingest",
                "cannot log-transform negative value " + std::to_string(values[i]) + " at index " + std::to_string(i));
        out.push_back(std::log1p(values[i]));
    }
    return ts.with_values(std::move(out), true);
}

inline bool has_negative_values(const TimeSeries& ts)
{
    return std::any_of(ts.values().begin(), ts.values().end(), [](double v) { return v < 0.0; });
}

/// Mean and sample standard deviation of a span. Two-pass, so constant input
/// gives exactly zero dispersion (short-circuited for all-equal input).
inline SeriesStats summarize(std::span<const double> values)
{
    if (values.size() < 2)
        fail(ErrorKind::EmptySeries, "ingest", "statistics need at least 2 values");
    SeriesStats stats;
    stats.n = values.size();
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
        stats.mean = values.front();
        return stats;
    }
    long double sum = 0.0L;
    for (double v : values)
        sum += v;
    const long double mean = sum / static_cast<long double>(values.size());
    long double ss = 0.0L;
    for (double v : values) {
        const long double d = static_cast<long double>(v) - mean;
        ss += d * d;
    }
    stats.mean = static_cast<double>(mean);
    stats.std = static_cast<double>(std::sqrt(ss / static_cast<long double>(values.size() - 1)));
    return stats;
}

/// Statistics of the series as stored (raw unless the caller passes a
/// transformed series).
inline SeriesStats summary_stats(const TimeSeries& ts) { return summarize(ts.values()); }

} // namespace t3
