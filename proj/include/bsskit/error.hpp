#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bsskit {

enum class ErrorCode {
    InvalidSpec,
    InvalidArgument,
    DimensionMismatch,
    LagTooLarge,
    DegenerateChannel,
    DegenerateInput,
    DegenerateSpectra,
    DegenerateSpectrum,
    SingularG,
    Diverged,
    ZeroUpdate,
    NotConverged,
    ZeroContraction,
    SingularLS,
    RankDeficient,
    InvalidPath,
    ConfigError,
    IoError,
};

/// Stable identifier used in result records ("DegenerateSpectra", ...).
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace bsskit
