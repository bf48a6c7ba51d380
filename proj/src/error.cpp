#include "bsskit/error.hpp"

namespace bsskit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::LagTooLarge: return "LagTooLarge";
        case ErrorCode::DegenerateChannel: return "DegenerateChannel";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::DegenerateSpectra: return "DegenerateSpectra";
        case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorCode::SingularG: return "SingularG";
        case ErrorCode::Diverged: return "Diverged";
        case ErrorCode::ZeroUpdate: return "ZeroUpdate";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::ZeroContraction: return "ZeroContraction";
        case ErrorCode::SingularLS: return "SingularLS";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::InvalidPath: return "InvalidPath";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace bsskit
