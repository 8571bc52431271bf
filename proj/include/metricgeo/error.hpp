#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metricgeo {

enum class ErrorCode {
    MalformedSpace,
    InvalidPoint,
    InvalidArgument,
    Unreachable,
    DuplicatePoint,
    DegenerateMetric,
    InvalidDensity,
    NoChain,
    EmptyFamily,
    IterationLimit,
    PathLimit,
    UnsupportedExponent,
    InvalidDilation,
    Schema,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedSpace: return "MalformedSpace";
        case ErrorCode::InvalidPoint: return "InvalidPoint";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::DuplicatePoint: return "DuplicatePoint";
        case ErrorCode::DegenerateMetric: return "DegenerateMetric";
        case ErrorCode::InvalidDensity: return "InvalidDensity";
        case ErrorCode::NoChain: return "NoChain";
        case ErrorCode::EmptyFamily: return "EmptyFamily";
        case ErrorCode::IterationLimit: return "IterationLimit";
        case ErrorCode::PathLimit: return "PathLimit";
        case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
        case ErrorCode::InvalidDilation: return "InvalidDilation";
        case ErrorCode::Schema: return "Schema";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace metricgeo
