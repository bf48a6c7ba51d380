#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "bsskit/algebraic.hpp"
#include "bsskit/error.hpp"

namespace bsskit {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kLowConfidence = 0.1;

// Symmetric coordinates of W: W_ii, then W_ij (i < j) with weight 2.
Matrix unvec_symmetric(const Vector& w, Eigen::Index n) {
    Matrix out(n, n);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            out(i, j) = w(pos);
            out(j, i) = w(pos);
            ++pos;
        }
    return out;
}

struct Candidate {
    Vector g;
    double residual = std::numeric_limits<double>::infinity();
};

// Rescale direction r so that y = s r^T u best fits y^2 = 1.
Candidate scaled_candidate(const Vector& r, const Matrix& u) {
    const Vector y = u.transpose() * r;
    const double m2 = y.squaredNorm();
    const double m4 = y.array().square().square().sum();
    Candidate c;
    if (!(m4 > 0.0) || !r.allFinite()) return c;
    c.g = r * std::sqrt(m2 / m4);
    const Vector y2 = (u.transpose() * c.g).array().square();
    c.residual = std::sqrt((y2.array() - 1.0).square().mean());
    return c;
}

Candidate dominant_pair_candidate(const Matrix& w, const Matrix& u) {
    const SymmetricEigen eig = symmetric_eigen(w, EigenOrder::DescendingMagnitude);
    return scaled_candidate(std::sqrt(std::abs(eig.values(0))) * eig.vectors.col(0), u);
}

}  // namespace

CmSolution deterministic_cm(const SignalMatrix& block) {
    const Matrix& u = block.data();
    const Eigen::Index n = u.rows();
    const Eigen::Index t = u.cols();
    if (t <= n * n) throw Error(ErrorCode::InvalidArgument, "deterministic CM needs T > N^2 samples");

    const Eigen::Index dim = n * (n + 1) / 2;
    Matrix p(t, dim);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double weight = i == j ? 1.0 : 2.0;
            p.col(col++) = weight * u.row(i).cwiseProduct(u.row(j)).transpose();
        }

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(p);
    cod.setThreshold(kRankTolerance);
    const Eigen::Index rank = cod.rank();
    // Constant-modulus sources make the squared-source columns collinear, so up
    // to N - 1 missing dimensions are the expected structure.
    if (rank < dim - (n - 1))
        throw Error(ErrorCode::RankDeficient, "P has rank " + std::to_string(rank) + " of " + std::to_string(dim));

    const Vector w_ls = cod.solve(Vector::Ones(t));
    const Matrix w0 = unvec_symmetric(w_ls, n);
    Candidate best = dominant_pair_candidate(w0, u);

    if (rank < dim) {
        // Solutions form w_ls + null(P). Matrices of that family are jointly
        // congruent to diagonals, so the pencil (W_ls, sum of null matrices)
        // exposes the separating rows as the rows of its inverse eigenvector
        // matrix.
        Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullV);
        Matrix null_sum = Matrix::Zero(n, n);
        for (Eigen::Index k = rank; k < dim; ++k) null_sum += unvec_symmetric(svd.matrixV().col(k), n);
        Eigen::GeneralizedEigenSolver<Matrix> ges(w0, null_sum);
        if (ges.info() == Eigen::Success) {
            const Matrix x = ges.eigenvectors().real();
            const Eigen::FullPivLU<Matrix> lu(x);
            if (lu.isInvertible()) {
                const Matrix rows = lu.inverse();
                for (Eigen::Index k = 0; k < n; ++k) {
                    Candidate c = scaled_candidate(rows.row(k).transpose(), u);
                    if (c.residual < best.residual) best = std::move(c);
                }
            }
        }
    }

    if (!std::isfinite(best.residual)) throw Error(ErrorCode::DegenerateInput, "no finite CM candidate");
    fix_sign(best.g);
    return {std::move(best.g), best.residual, rank, best.residual > kLowConfidence};
}

}  // namespace bsskit
