#pragma once

// Second-order stage: PCA sphering and AMUSE.

#include "bsskit/linalg.hpp"
#include "bsskit/signals.hpp"

namespace bsskit {

/// Sphering transform y = T_w (u - mean), T_w of size N x M.
struct Whitener {
    Matrix matrix;
    Vector mean;
    Eigen::Index detected_rank = 0;
    Vector eigenvalues;  // all M covariance eigenvalues, descending

    static Whitener identity(Eigen::Index channels);

    SignalMatrix apply(const SignalMatrix& u) const;
};

/// Demixing `rotation` (rows are separating vectors in the sphered domain)
/// composed with the whitener it was estimated behind.
struct Separator {
    Matrix rotation;
    Whitener whitener;

    Matrix demixing() const { return rotation * whitener.matrix; }
    SignalMatrix apply(const SignalMatrix& u) const;
};

struct WhiteningResult {
    Whitener whitener;
    SignalMatrix sphered;
};

constexpr double kDefaultRankTolerance = 1e-6;

/// Keeps eigenvalues >= rank_tolerance * largest.
WhiteningResult whiten(const SignalMatrix& u, double rank_tolerance = kDefaultRankTolerance);

constexpr Eigen::Index kDefaultAmuseLag = 1;
constexpr double kDefaultGapTolerance = 0.05;

/// Separator G = Q^T T_w from the EVD of the symmetrized lag-k covariance of
/// the sphered data. Eigenvalues are ordered descending; any gap below
/// gap_tolerance raises DegenerateSpectra.
Separator amuse(const SignalMatrix& u, Eigen::Index lag = kDefaultAmuseLag,
                double gap_tolerance = kDefaultGapTolerance,
                double rank_tolerance = kDefaultRankTolerance);

}  // namespace bsskit
