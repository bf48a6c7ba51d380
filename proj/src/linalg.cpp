#include "bsskit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bsskit/random.hpp"

namespace bsskit {

void fix_sign(Eigen::Ref<Vector> v) {
    if (v.size() == 0) return;
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
}

SymmetricEigen symmetric_eigen(const Matrix& a, EigenOrder order) {
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    const Vector& values = solver.eigenvalues();
    const Matrix& vectors = solver.eigenvectors();

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
    std::iota(idx.begin(), idx.end(), 0);
    if (order == EigenOrder::Descending) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](auto x, auto y) { return values(x) > values(y); });
    } else {
        std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) {
            return std::abs(values(x)) > std::abs(values(y));
        });
    }

    SymmetricEigen out{Vector(values.size()), Matrix(vectors.rows(), vectors.cols())};
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const auto src = idx[static_cast<std::size_t>(k)];
        out.values(k) = values(src);
        out.vectors.col(k) = vectors.col(src);
        fix_sign(out.vectors.col(k));
    }
    return out;
}

Matrix symmetric_orthonormalize(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a * a.transpose());
    const Vector inv_sqrt = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().cwiseInverse();
    return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose() * a;
}

Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Matrix givens(Eigen::Index n, Eigen::Index p, Eigen::Index q, double theta) {
    Matrix r = Matrix::Identity(n, n);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    r(p, p) = c;
    r(p, q) = s;
    r(q, p) = -s;
    r(q, q) = c;
    return r;
}

}  // namespace bsskit
