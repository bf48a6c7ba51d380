#pragma once

// Synthetic sources, mixing models and the block-Toeplitz lifting of
// convolutive mixtures.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "bsskit/linalg.hpp"

namespace bsskit {

enum class SourceKind { Bpsk, Uniform, Laplace, Gaussian, Ar1 };

std::string_view to_string(SourceKind kind) noexcept;
std::optional<SourceKind> parse_source_kind(std::string_view name) noexcept;

/// One independent source stream. Every kind has zero mean and unit variance.
struct SourceSpec {
    SourceKind kind = SourceKind::Gaussian;
    std::optional<double> ar_coefficient;  // ar1 only, in (-1, 1)
    std::uint64_t seed = 0;
};

/// Channels x samples real data; row = channel.
class SignalMatrix {
public:
    SignalMatrix() = default;
    explicit SignalMatrix(Matrix data, std::optional<std::uint64_t> seed = std::nullopt,
                          Eigen::Index transient = 0);

    const Matrix& data() const noexcept { return data_; }
    Eigen::Index channels() const noexcept { return data_.rows(); }
    Eigen::Index samples() const noexcept { return data_.cols(); }

    auto channel(Eigen::Index i) const { return data_.row(i); }
    auto sample(Eigen::Index t) const { return data_.col(t); }

    /// Seed the data was generated from, when synthetic.
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }
    /// Leading samples affected by zero prehistory (convolutive outputs).
    Eigen::Index transient() const noexcept { return transient_; }

    /// Single-channel view of row i.
    SignalMatrix row(Eigen::Index i) const;

private:
    Matrix data_;
    std::optional<std::uint64_t> seed_;
    Eigen::Index transient_ = 0;
};

struct StaticMixing {
    Matrix h;
};

struct NoisyMixing {
    Matrix h;
    double noise_std = 0.0;
    std::uint64_t noise_seed = 0;
};

/// u(n) = sum_k taps[k] a(n - k).
struct ConvolutiveMixing {
    std::vector<Matrix> taps;
};

using MixingModel = std::variant<StaticMixing, NoisyMixing, ConvolutiveMixing>;

SignalMatrix generate_sources(std::span<const SourceSpec> specs, Eigen::Index samples);

SignalMatrix mix(const MixingModel& model, const SignalMatrix& sources);

/// Block-Toeplitz matrix of size M*L x N*(L+order): block row r holds
/// taps[0..order] starting at block column r.
Matrix lift_convolutive(std::span<const Matrix> taps, Eigen::Index equalizer_length);

/// MIMO convolution with zero prehistory; the first `order` samples are
/// flagged transient.
SignalMatrix convolve_mimo(std::span<const Matrix> taps, const SignalMatrix& sources);

/// Stacked sliding windows: column c holds [x(n); x(n-1); ...; x(n-depth+1)]
/// for n = c + depth - 1. Matches the block order of lift_convolutive.
Matrix stack_windows(const Matrix& x, Eigen::Index depth);

}  // namespace bsskit
