#include "bsskit/signals.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bsskit/error.hpp"
#include "bsskit/random.hpp"

namespace bsskit {

namespace {

constexpr Eigen::Index kAr1BurnIn = 1000;

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

void fill_channel(const SourceSpec& spec, Rng& rng, Eigen::Ref<Vector> out) {
    const Eigen::Index t = out.size();
    switch (spec.kind) {
        case SourceKind::Bpsk:
            for (Eigen::Index n = 0; n < t; ++n) out(n) = rng.sign();
            break;
        case SourceKind::Uniform: {
            const double a = std::sqrt(3.0);
            for (Eigen::Index n = 0; n < t; ++n) out(n) = rng.uniform(-a, a);
            break;
        }
        case SourceKind::Laplace: {
            // Inverse CDF with scale 1/sqrt(2): variance 2 b^2 = 1.
            const double b = 1.0 / std::numbers::sqrt2;
            for (Eigen::Index n = 0; n < t; ++n) {
                const double u = rng.uniform_open() - 0.5;
                out(n) = -b * std::copysign(1.0, u) * std::log(1.0 - 2.0 * std::abs(u));
            }
            break;
        }
        case SourceKind::Gaussian:
            for (Eigen::Index n = 0; n < t; ++n) out(n) = rng.normal();
            break;
        case SourceKind::Ar1: {
            const double rho = *spec.ar_coefficient;
            const double innovation = std::sqrt(1.0 - rho * rho);
            double x = rng.normal();
            for (Eigen::Index n = 0; n < kAr1BurnIn; ++n) x = rho * x + innovation * rng.normal();
            for (Eigen::Index n = 0; n < t; ++n) {
                x = rho * x + innovation * rng.normal();
                out(n) = x;
            }
            break;
        }
    }
}

}  // namespace

std::string_view to_string(SourceKind kind) noexcept {
    switch (kind) {
        case SourceKind::Bpsk: return "bpsk";
        case SourceKind::Uniform: return "uniform";
        case SourceKind::Laplace: return "laplace";
        case SourceKind::Gaussian: return "gaussian";
        case SourceKind::Ar1: return "ar1";
    }
    return "unknown";
}

std::optional<SourceKind> parse_source_kind(std::string_view name) noexcept {
    if (name == "bpsk") return SourceKind::Bpsk;
    if (name == "uniform") return SourceKind::Uniform;
    if (name == "laplace") return SourceKind::Laplace;
    if (name == "gaussian") return SourceKind::Gaussian;
    if (name == "ar1") return SourceKind::Ar1;
    return std::nullopt;
}

SignalMatrix::SignalMatrix(Matrix data, std::optional<std::uint64_t> seed, Eigen::Index transient)
    : data_(std::move(data)), seed_(seed), transient_(transient) {
    if (data_.rows() < 1 || data_.cols() < 1)
        throw Error(ErrorCode::InvalidArgument, "signal matrix needs at least one channel and sample");
    require_finite(data_, "signal matrix");
}

SignalMatrix SignalMatrix::row(Eigen::Index i) const {
    return SignalMatrix(Matrix(data_.row(i)), seed_, transient_);
}

SignalMatrix generate_sources(std::span<const SourceSpec> specs, Eigen::Index samples) {
    if (specs.empty()) throw Error(ErrorCode::InvalidSpec, "no source specs");
    if (samples < 1) throw Error(ErrorCode::InvalidSpec, "sample count must be >= 1");

    Matrix data(static_cast<Eigen::Index>(specs.size()), samples);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        if ((spec.kind == SourceKind::Ar1) != spec.ar_coefficient.has_value())
            throw Error(ErrorCode::InvalidSpec, "ar_coefficient must be given exactly for ar1 sources");
        if (spec.ar_coefficient && !(std::abs(*spec.ar_coefficient) < 1.0))
            throw Error(ErrorCode::InvalidSpec, "ar_coefficient must lie in (-1, 1)");
        Rng rng = Rng::substream(spec.seed, i);
        Vector row(samples);
        fill_channel(spec, rng, row);
        data.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return SignalMatrix(std::move(data), specs.front().seed);
}

Matrix stack_windows(const Matrix& x, Eigen::Index depth) {
    if (depth < 1 || depth > x.cols())
        throw Error(ErrorCode::InvalidArgument, "window depth must be in [1, samples]");
    const Eigen::Index c = x.rows();
    const Eigen::Index cols = x.cols() - depth + 1;
    Matrix out(c * depth, cols);
    for (Eigen::Index col = 0; col < cols; ++col) {
        const Eigen::Index n = col + depth - 1;
        for (Eigen::Index r = 0; r < depth; ++r) out.block(r * c, col, c, 1) = x.col(n - r);
    }
    return out;
}

Matrix lift_convolutive(std::span<const Matrix> taps, Eigen::Index equalizer_length) {
    if (taps.empty()) throw Error(ErrorCode::InvalidArgument, "convolutive taps list is empty");
    if (equalizer_length < 1) throw Error(ErrorCode::InvalidArgument, "equalizer length must be >= 1");
    const Eigen::Index m = taps.front().rows();
    const Eigen::Index n = taps.front().cols();
    for (const auto& h : taps)
        if (h.rows() != m || h.cols() != n)
            throw Error(ErrorCode::DimensionMismatch, "taps must share one M x N shape");

    const auto order = static_cast<Eigen::Index>(taps.size()) - 1;
    Matrix lifted = Matrix::Zero(m * equalizer_length, n * (equalizer_length + order));
    for (Eigen::Index r = 0; r < equalizer_length; ++r)
        for (Eigen::Index k = 0; k <= order; ++k)
            lifted.block(r * m, (r + k) * n, m, n) = taps[static_cast<std::size_t>(k)];
    return lifted;
}

SignalMatrix convolve_mimo(std::span<const Matrix> taps, const SignalMatrix& sources) {
    if (taps.empty()) throw Error(ErrorCode::InvalidArgument, "convolutive taps list is empty");
    const Eigen::Index m = taps.front().rows();
    for (const auto& h : taps) {
        if (h.cols() != sources.channels() || h.rows() != m)
            throw Error(ErrorCode::DimensionMismatch, "tap shape does not match source channels");
        require_finite(h, "tap");
    }
    const Eigen::Index t = sources.samples();
    const Matrix& a = sources.data();
    Matrix u = Matrix::Zero(m, t);
    for (std::size_t k = 0; k < taps.size(); ++k) {
        const auto lag = static_cast<Eigen::Index>(k);
        if (lag >= t) break;
        u.rightCols(t - lag).noalias() += taps[k] * a.leftCols(t - lag);
    }
    const auto order = static_cast<Eigen::Index>(taps.size()) - 1;
    return SignalMatrix(std::move(u), sources.seed(), std::min(order, t));
}

SignalMatrix mix(const MixingModel& model, const SignalMatrix& sources) {
    return std::visit(
        [&](const auto& m) -> SignalMatrix {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConvolutiveMixing>) {
                return convolve_mimo(m.taps, sources);
            } else {
                require_finite(m.h, "mixing matrix");
                if (m.h.cols() != sources.channels())
                    throw Error(ErrorCode::DimensionMismatch, "mixing matrix columns != source channels");
                Matrix u = m.h * sources.data();
                if constexpr (std::is_same_v<T, NoisyMixing>) {
                    if (!(m.noise_std >= 0.0))
                        throw Error(ErrorCode::InvalidArgument, "noise std must be nonnegative");
                    if (m.noise_std > 0.0) {
                        for (Eigen::Index i = 0; i < u.rows(); ++i) {
                            Rng rng = Rng::substream(m.noise_seed, static_cast<std::uint64_t>(i));
                            for (Eigen::Index n = 0; n < u.cols(); ++n) u(i, n) += m.noise_std * rng.normal();
                        }
                    }
                }
                return SignalMatrix(std::move(u), sources.seed());
            }
        },
        model);
}

}  // namespace bsskit
