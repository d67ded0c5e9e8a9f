#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace moyalkit {

enum class ErrorKind {
    NearSingular,
    DimensionMismatch,
    GridMismatch,
    EvaluationFailure,
    GrowthTooFast,
    IndefiniteQuadratic,
    SpectralBlowup,
    NormalizationError,
    InvalidArgument,
    FormatError,
    ConfigError,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::NearSingular: return "NearSingular";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::EvaluationFailure: return "EvaluationFailure";
        case ErrorKind::GrowthTooFast: return "GrowthTooFast";
        case ErrorKind::IndefiniteQuadratic: return "IndefiniteQuadratic";
        case ErrorKind::SpectralBlowup: return "SpectralBlowup";
        case ErrorKind::NormalizationError: return "NormalizationError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::FormatError: return "FormatError";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Soft diagnostics attached to results instead of thrown.
namespace warning {
inline constexpr std::string_view resampling_accuracy_loss = "ResamplingAccuracyLoss";
inline constexpr std::string_view shift_out_of_box = "ShiftOutOfBox";
inline constexpr std::string_view decay_check_failed = "DecayCheckFailed";
}  // namespace warning

}  // namespace moyalkit
