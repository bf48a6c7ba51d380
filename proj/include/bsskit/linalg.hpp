#pragma once

// Small dense helpers shared by the separation modules.

#include <cstdint>

#include <Eigen/Dense>

namespace bsskit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymmetricEigen {
    Vector values;   // sorted by the requested order
    Matrix vectors;  // column k pairs with values(k)
};

enum class EigenOrder { Descending, DescendingMagnitude };

/// EVD of a symmetric matrix (input is symmetrized first). Each eigenvector
/// is sign-fixed so that its largest-magnitude entry is positive.
SymmetricEigen symmetric_eigen(const Matrix& a, EigenOrder order = EigenOrder::Descending);

/// Flip `v` so its largest-magnitude entry is positive.
void fix_sign(Eigen::Ref<Vector> v);

/// Polar (symmetric) orthonormalization: (A A^T)^{-1/2} A.
Matrix symmetric_orthonormalize(const Matrix& a);

/// Haar-distributed random orthogonal n x n matrix from a seed.
Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed);

/// Givens rotation in plane (p, q): rows p/q of the identity replaced by
/// [c s; -s c].
Matrix givens(Eigen::Index n, Eigen::Index p, Eigen::Index q, double theta);

}  // namespace bsskit
