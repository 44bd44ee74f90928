#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fc {

enum class ErrorKind {
    EmptySegment,
    MissingYear,
    ZeroBaseline,
    DivisionByZero,
    LengthMismatch,
    TooLarge,
    ParseError,
    OrderError,
    ZeroTotal,
    DegenerateSample,
    InsufficientSamples,
    InvalidArgument,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::EmptySegment: return "EmptySegment";
    case ErrorKind::MissingYear: return "MissingYear";
    case ErrorKind::ZeroBaseline: return "ZeroBaseline";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OrderError: return "OrderError";
    case ErrorKind::ZeroTotal: return "ZeroTotal";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// True for errors caused by malformed or missing input rather than by the
/// computation itself. The CLI maps these to exit code 2.
inline bool is_input_error(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::OrderError:
    case ErrorKind::ZeroTotal:
    case ErrorKind::MissingYear:
    case ErrorKind::EmptySegment:
    case ErrorKind::LengthMismatch:
    case ErrorKind::InvalidArgument:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(message), kind_(kind), line_(line) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// 1-based input line for parse-time errors.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
};

} // namespace fc
