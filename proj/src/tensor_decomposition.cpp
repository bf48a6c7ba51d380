#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "bsskit/algebraic.hpp"
#include "bsskit/error.hpp"
#include "bsskit/random.hpp"

namespace bsskit {

namespace {

// Column j = a(:,j) (x) b(:,j) (x) c(:,j), rows in row-major (x, y, z) order.
Matrix khatri_rao3(const Matrix& a, const Matrix& b, const Matrix& c) {
    const Eigen::Index n = a.rows();
    Matrix out(n * n * n, a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index x = 0; x < n; ++x)
            for (Eigen::Index y = 0; y < n; ++y)
                for (Eigen::Index z = 0; z < n; ++z) out((x * n + y) * n + z, j) = a(x, j) * b(y, j) * c(z, j);
    return out;
}

using Factors4 = std::array<Matrix, 4>;

double reconstruction_error(const Matrix& unfolded, const Factors4& f) {
    return (unfolded - f[0] * khatri_rao3(f[1], f[2], f[3]).transpose()).norm();
}

ParafacFactors fold_in(const Factors4& f) {
    const Eigen::Index r = f[0].cols();
    ParafacFactors out{Matrix(f[0].rows(), r), Vector(r)};
    for (Eigen::Index j = 0; j < r; ++j) {
        const Vector a = f[0].col(j);
        double weight = a.norm();
        for (int k = 1; k < 4; ++k) {
            weight *= f[static_cast<std::size_t>(k)].col(j).norm();
            if (a.dot(f[static_cast<std::size_t>(k)].col(j)) < 0.0) weight = -weight;
        }
        const double an = a.norm();
        if (an > 0.0) {
            out.factor.col(j) = a / an;
        } else {
            out.factor.col(j).setZero();
            out.factor(j % out.factor.rows(), j) = 1.0;
            weight = 0.0;
        }
        out.weights(j) = weight;
    }
    return out;
}

}  // namespace

Hoevd hoevd(const Cumulant4Tensor& c) {
    const Eigen::Index n = c.dim();
    Eigen::JacobiSVD<Matrix> svd(unfold(c, Grouping::OneByThree), Eigen::ComputeThinU);
    Matrix factor = svd.matrixU();
    for (Eigen::Index j = 0; j < n; ++j) fix_sign(factor.col(j));
    Cumulant4Tensor core = tucker_transform(c, factor.transpose());
    return {std::move(factor), std::move(core)};
}

Vector hopm_step(const Cumulant4Tensor& c, const Vector& g) {
    Vector v = c.contract3(g);
    const double norm = v.norm();
    if (!(norm > 1e-300)) throw Error(ErrorCode::ZeroContraction, "C*g*g*g vanished");
    v /= norm;
    if (v.dot(g) < 0.0) v = -v;
    return v;
}

HopmResult hopm(const Cumulant4Tensor& c, const Vector& init, int max_iter, double tol) {
    if (init.size() != c.dim()) throw Error(ErrorCode::DimensionMismatch, "init length != tensor dim");
    const double norm = init.norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "hopm init must be nonzero");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");

    HopmResult r;
    Vector g = init / norm;
    for (int it = 0; it < max_iter; ++it) {
        const Vector next = hopm_step(c, g);
        const double change = (next - g).norm();
        g = next;
        r.iterations = it + 1;
        if (change < tol) {
            fix_sign(g);
            r.g = g;
            r.lambda = c.contract4(g);
            return r;
        }
    }
    throw Error(ErrorCode::NotConverged, "hopm did not converge in " + std::to_string(max_iter) + " iterations");
}

ParafacResult parafac_als(const Cumulant4Tensor& c, Eigen::Index rank, const std::optional<ParafacFactors>& init,
                          int max_iter, double tol) {
    const Eigen::Index n = c.dim();
    if (rank < 1) throw Error(ErrorCode::InvalidArgument, "PARAFAC rank must be >= 1");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");

    Factors4 f;
    if (init) {
        if (init->factor.rows() != n || init->factor.cols() != rank || init->weights.size() != rank)
            throw Error(ErrorCode::DimensionMismatch, "init factors must be N x rank with rank weights");
        f = {init->factor * init->weights.asDiagonal(), init->factor, init->factor, init->factor};
    } else {
        Matrix start(n, rank);
        const Matrix h = hoevd(c).factor;
        const Eigen::Index take = std::min(rank, n);
        start.leftCols(take) = h.leftCols(take);
        // Extra columns beyond N (underdetermined ranks) start from a fixed
        // pseudo-random draw.
        Rng rng(0);
        for (Eigen::Index j = take; j < rank; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) start(i, j) = rng.normal();
            start.col(j).normalize();
        }
        f = {start, start, start, start};
    }

    const Matrix x = unfold(c, Grouping::OneByThree);
    const double scale = std::max(x.norm(), std::numeric_limits<double>::min());
    ParafacResult result;
    double prev = reconstruction_error(x, f);

    for (int it = 0; it < max_iter; ++it) {
        const Factors4 before = f;
        for (std::size_t m = 0; m < 4; ++m) {
            std::array<std::size_t, 3> others{};
            std::size_t k = 0;
            for (std::size_t o = 0; o < 4; ++o)
                if (o != m) others[k++] = o;
            Matrix v = Matrix::Ones(rank, rank);
            for (auto o : others) v = v.cwiseProduct(f[o].transpose() * f[o]);
            const Eigen::FullPivLU<Matrix> lu(v);
            if (!lu.isInvertible() || lu.rank() < rank)
                throw Error(ErrorCode::SingularLS, "ALS normal equations are rank deficient");
            const Matrix rhs = x * khatri_rao3(f[others[0]], f[others[1]], f[others[2]]);
            f[m] = lu.solve(rhs.transpose()).transpose();
        }
        const double err = reconstruction_error(x, f);
        if (!std::isfinite(err) || err > prev) {
            // Round-off at the optimum: keep the previous cycle.
            f = before;
            result.converged = true;
            break;
        }
        result.errors.push_back(err);
        result.iterations = it + 1;
        const bool small = err <= tol * scale || prev - err <= tol * scale;
        prev = err;
        if (small) {
            result.converged = true;
            break;
        }
    }
    result.factors = fold_in(f);
    return result;
}

Cumulant4Tensor parafac_reconstruct(const ParafacFactors& factors) {
    return Cumulant4Tensor::rank_one_sum(factors.weights, factors.factor);
}

bool kruskal_check(int sensors, int sources) {
    if (sensors < 1 || sources < 1) throw Error(ErrorCode::InvalidArgument, "M and N must be >= 1");
    return 4 * sensors >= 2 * sources + 3;
}

Rank1Init rank1_init(const Cumulant4Tensor& c) {
    const Eigen::Index m = c.dim();
    const SymmetricEigen outer = symmetric_eigen(unfold(c, Grouping::TwoByTwo), EigenOrder::DescendingMagnitude);
    if (outer.values.size() > 1 && std::abs(outer.values(0)) - std::abs(outer.values(1)) < 1e-8)
        throw Error(ErrorCode::DegenerateSpectrum, "two leading unfolding eigenvalues are within 1e-8");

    Rank1Init r;
    r.lambda = outer.values(0);
    r.w.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) r.w(i, j) = outer.vectors(i * m + j, 0);
    r.w = (0.5 * (r.w + r.w.transpose())).eval();

    const SymmetricEigen inner = symmetric_eigen(r.w, EigenOrder::DescendingMagnitude);
    r.varsigma = inner.values(0);
    r.g0 = inner.vectors.col(0);
    if (r.varsigma < 0.0) {
        // w and -w are the same eigenvector; pick the sign giving positive varsigma.
        r.varsigma = -r.varsigma;
        r.w = -r.w;
    }
    return r;
}

double donoho_from_tensor(const Cumulant4Tensor& c, const Vector& g) {
    const double n2 = g.squaredNorm();
    if (!(n2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "g must be nonzero");
    return std::abs(c.contract4(g)) / (n2 * n2);
}

}  // namespace bsskit
