#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "t3/error.hpp"
#include "t3/features.hpp"
#include "t3/ingest.hpp"
#include "t3/regime.hpp"
#include "t3/segment.hpp"
#include "t3/verbalize.hpp"

namespace t3 {

inline constexpr std::string_view kHeadMarker = "<H>";
inline constexpr std::string_view kRelationMarker = "<R>";
inline constexpr std::string_view kTailMarker = "<T>";

namespace rel {
inline constexpr std::string_view has_observations = "has observations";
inline constexpr std::string_view spans = "spans";
inline constexpr std::string_view unit = "unit";
inline constexpr std::string_view maximum = "maximum";
inline constexpr std::string_view minimum = "minimum";
inline constexpr std::string_view has_trend = "has trend";
inline constexpr std::string_view direction = "direction";
inline constexpr std::string_view from = "from";
inline constexpr std::string_view to = "to";
inline constexpr std::string_view percent_change = "percent change";
inline constexpr std::string_view has_regime = "has regime";
inline constexpr std::string_view average_level = "average level";
inline constexpr std::string_view has_peak = "has peak";
inline constexpr std::string_view peak_value = "peak value";
inline constexpr std::string_view peak_date = "peak date";
} // namespace rel

/// The fixed relation vocabulary emitted by build_graph.
inline constexpr std::array<std::string_view, 15> kSchemaRelations = {rel::has_observations, rel::spans, rel::has_trend,
    rel::direction, rel::from, rel::to, rel::percent_change, rel::has_regime, rel::average_level, rel::has_peak,
    rel::peak_value, rel::peak_date, rel::maximum, rel::minimum, rel::unit};

inline bool is_schema_relation(std::string_view r)
{
    return std::find(kSchemaRelations.begin(), kSchemaRelations.end(), r) != kSchemaRelations.end();
}

inline bool contains_marker(std::string_view field)
{
    return field.find(kHeadMarker) != std::string_view::npos || field.find(kRelationMarker) != std::string_view::npos
        || field.find(kTailMarker) != std::string_view::npos;
}

struct Triple {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// Ordered triples rooted at the first head. Every other head must have been
/// introduced earlier as a tail, which keeps the graph connected.
class KnowledgeGraph {
public:
    explicit KnowledgeGraph(std::vector<Triple> triples)
        : triples_(std::move(triples))
    {
        if (triples_.empty())
            fail(ErrorKind::InconsistentInputs, "kg", "a knowledge graph needs at least one triple");
        std::set<std::string_view> introduced;
        introduced.insert(triples_.front().head);
        for (std::size_t i = 0; i < triples_.size(); ++i) {
            const auto& t = triples_[i];
            for (const std::string* field : {&t.head, &t.relation, &t.tail}) {
                if (field->empty())
                    fail(ErrorKind::InconsistentInputs, "kg", "triple " + std::to_string(i) + " has an empty field");
                if (contains_marker(*field))
                    fail(ErrorKind::ReservedMarkerInField, "kg",
                        "triple " + std::to_string(i) + " field '" + *field + "' contains a reserved marker");
            }
            if (!introduced.contains(t.head))
                fail(ErrorKind::InconsistentInputs, "kg",
                    "triple " + std::to_string(i) + " head '" + t.head + "' is not reachable from the root");
            introduced.insert(t.tail);
        }
    }

    const std::vector<Triple>& triples() const noexcept { return triples_; }
    const std::string& root_entity() const noexcept { return triples_.front().head; }
    std::size_t size() const noexcept { return triples_.size(); }

    std::size_t count_relation(std::string_view relation) const
    {
        return static_cast<std::size_t>(
            std::count_if(triples_.begin(), triples_.end(), [&](const Triple& t) { return t.relation == relation; }));
    }

    friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;

private:
    std::vector<Triple> triples_;
};

inline std::string root_entity_name(const TimeSeries& ts)
{
    if (ts.entity().empty())
        return ts.measure().name.empty() ? "the series" : ts.measure().name;
    if (ts.measure().name.empty())
        return ts.entity();
    return ts.entity() + " " + ts.measure().name;
}

/// Percent change between two raw values, guarded against a zero start.
inline double percent_change(double start, double end)
{
    return 100.0 * (end - start) / std::max(std::abs(start), 1e-9);
}

/// Encodes Stage I outputs of one series. `raw` is the untransformed series;
/// trends and regimes carry index ranges into it. Emission order: metadata,
/// trends (chronological), regimes (chronological), peaks (as given).
inline KnowledgeGraph build_graph(const TimeSeries& raw, const SeriesStats& stats, const SegmentationResult& trends,
    const std::vector<Regime>& regimes, const std::vector<Peak>& peaks)
{
    const std::size_t n = raw.size();
    if (stats.n != n)
        fail(ErrorKind::InconsistentInputs, "kg",
            "statistics describe " + std::to_string(stats.n) + " points, series has " + std::to_string(n));
    for (const auto& s : trends.segments)
        if (s.end_index >= n || s.start_index >= s.end_index)
            fail(ErrorKind::InconsistentInputs, "kg", "trend range exceeds the series");
    for (const auto& r : regimes)
        if (r.end_index >= n || r.start_index > r.end_index)
            fail(ErrorKind::InconsistentInputs, "kg", "regime range exceeds the series");
    for (const auto& p : peaks)
        if (p.index >= n)
            fail(ErrorKind::InconsistentInputs, "kg", "peak index exceeds the series");

    const auto values = raw.values();
    const auto times = raw.timestamps();
    const std::string& unit = raw.measure().unit;
    auto date = [&](std::size_t i) { return format_iso8601(times[i]); };

    const std::string root = root_entity_name(raw);
    std::vector<Triple> out;
    auto emit = [&](std::string head, std::string_view relation, std::string tail) {
        out.push_back(Triple{std::move(head), std::string(relation), std::move(tail)});
    };

    emit(root, rel::has_observations, verbalize_number(static_cast<double>(stats.n)));
    emit(root, rel::spans, date(0) + ".." + date(n - 1));
    if (!unit.empty())
        emit(root, rel::unit, unit);
    const auto ext = global_extrema(raw);
    if (ext.max.value > ext.min.value) {
        emit(root, rel::maximum, verbalize_number(ext.max.value, unit) + " on " + format_iso8601(ext.max.timestamp));
        emit(root, rel::minimum, verbalize_number(ext.min.value, unit) + " on " + format_iso8601(ext.min.timestamp));
    }

    for (std::size_t k = 0; k < trends.segments.size(); ++k) {
        const auto& s = trends.segments[k];
        const std::string node = "trend " + std::to_string(k + 1);
        emit(root, rel::has_trend, node);
        emit(node, rel::direction, std::string(to_string(s.direction)));
        emit(node, rel::from, date(s.start_index));
        emit(node, rel::to, date(s.end_index));
        if (s.direction != Direction::flat)
            emit(node, rel::percent_change, verbalize_percent(percent_change(values[s.start_index], values[s.end_index])));
    }

    for (std::size_t k = 0; k < regimes.size(); ++k) {
        const auto& r = regimes[k];
        const std::string node = "regime " + std::to_string(k + 1);
        double level = 0.0;
        for (std::size_t i = r.start_index; i <= r.end_index; ++i)
            level += values[i];
        level /= static_cast<double>(r.end_index - r.start_index + 1);
        emit(root, rel::has_regime, node);
        emit(node, rel::from, date(r.start_index));
        emit(node, rel::to, date(r.end_index));
        emit(node, rel::average_level, verbalize_number(level, unit));
    }

    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const auto& p = peaks[k];
        const std::string node = "peak " + std::to_string(k + 1);
        emit(root, rel::has_peak, node);
        emit(node, rel::peak_value, verbalize_number(p.value, unit));
        emit(node, rel::peak_date, format_iso8601(p.timestamp));
    }
    return KnowledgeGraph(std::move(out));
}

/// "<H> head <R> relation <T> tail" per triple, single-space joined.
inline std::string linearize(const KnowledgeGraph& kg)
{
    std::string out;
    for (const auto& t : kg.triples()) {
        if (contains_marker(t.head) || contains_marker(t.relation) || contains_marker(t.tail))
            fail(ErrorKind::ReservedMarkerInField, "kg", "triple field contains a reserved marker");
        if (!out.empty())
            out += ' ';
        out.append(kHeadMarker).append(" ").append(t.head);
        out.append(" ").append(kRelationMarker).append(" ").append(t.relation);
        out.append(" ").append(kTailMarker).append(" ").append(t.tail);
    }
    return out;
}

/// Inverse of linearize. Fields never contain markers, so each field ends
/// exactly where the next " <X> " delimiter begins.
inline KnowledgeGraph parse_linearized(std::string_view s)
{
    auto malformed = [](const std::string& why) { fail(ErrorKind::MalformedMarkerSequence, "kg", why); };
    const std::string head_open = std::string(kHeadMarker) + " ";
    const std::string rel_delim = " " + std::string(kRelationMarker) + " ";
    const std::string tail_delim = " " + std::string(kTailMarker) + " ";
    const std::string next_delim = " " + std::string(kHeadMarker) + " ";

    if (s.empty())
        malformed("empty linearization");
    std::vector<Triple> triples;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (s.compare(pos, head_open.size(), head_open) != 0)
            malformed("expected '<H> ' at offset " + std::to_string(pos));
        pos += head_open.size();
        const auto r = s.find(rel_delim, pos);
        if (r == std::string_view::npos)
            malformed("missing <R> after offset " + std::to_string(pos));
        const auto t = s.find(tail_delim, r + rel_delim.size());
        if (t == std::string_view::npos)
            malformed("missing <T> after offset " + std::to_string(r));
        auto next = s.find(next_delim, t + tail_delim.size());
        Triple triple{std::string(s.substr(pos, r - pos)),
            std::string(s.substr(r + rel_delim.size(), t - r - rel_delim.size())),
            std::string(s.substr(t + tail_delim.size(),
                (next == std::string_view::npos ? s.size() : next) - t - tail_delim.size()))};
        if (contains_marker(triple.head) || contains_marker(triple.relation) || contains_marker(triple.tail))
            malformed("marker out of sequence in triple " + std::to_string(triples.size()));
        if (triple.head.empty() || triple.relation.empty() || triple.tail.empty())
            malformed("empty field in triple " + std::to_string(triples.size()));
        triples.push_back(std::move(triple));
        pos = next == std::string_view::npos ? s.size() : next + 1;
    }
    return KnowledgeGraph(std::move(triples));
}

/// Human-readable "head | relation | tail" lines.
inline std::string to_triple_lines(const KnowledgeGraph& kg)
{
    std::string out;
    for (const auto& t : kg.triples())
        out += t.head + " | " + t.relation + " | " + t.tail + "\n";
    return out;
}

} // namespace t3
