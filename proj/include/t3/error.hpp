#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace t3 {

enum class ErrorKind {
    // ingest
    MissingColumn,
    NonMonotonicTime,
    EmptySeries,
    UnparseableValue,
    NegativeValue,
    Io,
    // segment
    IndexOutOfRange,
    DegenerateSpan,
    NonPositiveThreshold,
    BufferTooSmall,
    MismatchedLength,
    SeriesTooLong,
    InvalidK,
    // regime
    WindowTooLarge,
    WindowTooSmall,
    TooManyRegimes,
    InvalidCount,
    MismatchedTiling,
    // features
    SeriesTooShort,
    // kg
    InconsistentInputs,
    ReservedMarkerInField,
    MalformedMarkerSequence,
    // decode
    InvalidDistribution,
    InvalidP,
    LengthMismatch,
    // narrate
    NonFiniteValue,
    UncoveredRelation,
    BackendUnreachable,
    BackendError,
    Timeout,
    ContractViolation,
    // metrics
    EmptyText,
    // cli
    InvalidConfig,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::UnparseableValue: return "UnparseableValue";
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::Io: return "Io";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateSpan: return "DegenerateSpan";
    case ErrorKind::NonPositiveThreshold: return "NonPositiveThreshold";
    case ErrorKind::BufferTooSmall: return "BufferTooSmall";
    case ErrorKind::MismatchedLength: return "MismatchedLength";
    case ErrorKind::SeriesTooLong: return "SeriesTooLong";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::TooManyRegimes: return "TooManyRegimes";
    case ErrorKind::InvalidCount: return "InvalidCount";
    case ErrorKind::MismatchedTiling: return "MismatchedTiling";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::InconsistentInputs: return "InconsistentInputs";
    case ErrorKind::ReservedMarkerInField: return "ReservedMarkerInField";
    case ErrorKind::MalformedMarkerSequence: return "MalformedMarkerSequence";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::UncoveredRelation: return "UncoveredRelation";
    case ErrorKind::BackendUnreachable: return "BackendUnreachable";
    case ErrorKind::BackendError: return "BackendError";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::ContractViolation: return "ContractViolation";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

/// Every failure raised by the library. `module()` names the pipeline stage
/// that raised it so the CLI can report provenance.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& detail)
        : std::runtime_error(std::string(module) + ": " + std::string(to_string(kind)) + ": " + detail)
        , kind_(kind)
        , module_(std::move(module))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string_view module, const std::string& detail)
{
    throw Error(kind, std::string(module), detail);
}

} // namespace t3
