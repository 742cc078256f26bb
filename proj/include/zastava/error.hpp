#pragma once

#include <stdexcept>
#include <string>

namespace zastava
{

// Failure taxonomy shared by every module. Codes are stable identifiers used in
// CLI reports; the message carries the offending values.
enum class ErrorCode {
    PoleAtLatticePoint,  // elliptic evaluation at (or too near) a lattice point
    CoincidentPoints,    // chart genericity violated: two w's closer than delta
    UnknownVertex,       // vertex id not present in the quiver
    DegreeOverflow,      // subdegree exceeds the ambient degree, or rank overflow
    DegreeMismatch,      // degrees indexed by different vertex sets
    DimensionMismatch,   // containers inconsistent with quiver/degree data
    TrajectoryLeftChart, // flow left the generic region mid-integration
    ThetaZero,           // theta factor vanishes: transform not defined here
    ContourTooClose,     // residue contour would overlap another pole
    DiagonalPoint,       // local model evaluated on (or too near) the diagonal
    SchemaError,         // malformed configuration/input document
    ValidationError,     // well-formed input violating a documented precondition
    IoError,             // file system failure
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          m_code(code)
    {
    }

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

inline const char* error_code_name(ErrorCode code) noexcept
{
    switch (code) {
        case ErrorCode::PoleAtLatticePoint: return "PoleAtLatticePoint";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::UnknownVertex: return "UnknownVertex";
        case ErrorCode::DegreeOverflow: return "DegreeOverflow";
        case ErrorCode::DegreeMismatch: return "DegreeMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::TrajectoryLeftChart: return "TrajectoryLeftChart";
        case ErrorCode::ThetaZero: return "ThetaZero";
        case ErrorCode::ContourTooClose: return "ContourTooClose";
        case ErrorCode::DiagonalPoint: return "DiagonalPoint";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace zastava
