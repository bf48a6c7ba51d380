#include "bsskit/sos.hpp"

#include <cmath>

#include "bsskit/error.hpp"
#include "bsskit/moments.hpp"

namespace bsskit {

Whitener Whitener::identity(Eigen::Index channels) {
    return {Matrix::Identity(channels, channels), Vector::Zero(channels), channels,
            Vector::Ones(channels)};
}

SignalMatrix Whitener::apply(const SignalMatrix& u) const {
    if (u.channels() != matrix.cols())
        throw Error(ErrorCode::DimensionMismatch, "whitener input width != signal channels");
    return SignalMatrix(matrix * (u.data().colwise() - mean), u.seed(), u.transient());
}

SignalMatrix Separator::apply(const SignalMatrix& u) const {
    if (u.channels() != whitener.matrix.cols())
        throw Error(ErrorCode::DimensionMismatch, "separator input width != signal channels");
    return SignalMatrix(demixing() * (u.data().colwise() - whitener.mean), u.seed(), u.transient());
}

WhiteningResult whiten(const SignalMatrix& u, double rank_tolerance) {
    if (!(rank_tolerance > 0.0 && rank_tolerance < 1.0))
        throw Error(ErrorCode::InvalidArgument, "rank tolerance must lie in (0, 1)");
    if (u.samples() < u.channels())
        throw Error(ErrorCode::InvalidArgument, "whitening needs at least as many samples as channels");

    const Matrix r = sample_covariance(u, 0).matrix;
    const SymmetricEigen eig = symmetric_eigen(r);
    const double largest = eig.values(0);
    if (!(largest > 1e-300)) throw Error(ErrorCode::DegenerateInput, "all covariance eigenvalues are zero");

    Eigen::Index rank = 0;
    while (rank < eig.values.size() && eig.values(rank) >= rank_tolerance * largest) ++rank;

    Whitener w;
    w.mean = u.data().rowwise().mean();
    w.eigenvalues = eig.values.cwiseMax(0.0);
    w.detected_rank = rank;
    w.matrix = eig.values.head(rank).cwiseSqrt().cwiseInverse().asDiagonal() *
               eig.vectors.leftCols(rank).transpose();
    SignalMatrix sphered = w.apply(u);
    return {std::move(w), std::move(sphered)};
}

Separator amuse(const SignalMatrix& u, Eigen::Index lag, double gap_tolerance, double rank_tolerance) {
    if (lag < 1) throw Error(ErrorCode::InvalidArgument, "AMUSE lag must be >= 1");
    if (!(gap_tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gap tolerance must be >= 0");

    auto [whitener, sphered] = whiten(u, rank_tolerance);
    const Matrix rk = sample_covariance(sphered, lag).matrix;
    const SymmetricEigen eig = symmetric_eigen(0.5 * (rk + rk.transpose()));

    // Sphered lag-0 scale is 1, so gaps are relative to it.
    for (Eigen::Index i = 0; i + 1 < eig.values.size(); ++i) {
        if (eig.values(i) - eig.values(i + 1) <= gap_tolerance)
            throw Error(ErrorCode::DegenerateSpectra,
                        "lag-" + std::to_string(lag) + " eigenvalues " + std::to_string(i) + " and " +
                            std::to_string(i + 1) + " are closer than the gap tolerance");
    }
    return {eig.vectors.transpose(), std::move(whitener)};
}

}  // namespace bsskit
