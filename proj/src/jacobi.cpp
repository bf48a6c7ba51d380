#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bsskit/algebraic.hpp"
#include "bsskit/error.hpp"

namespace bsskit {

namespace {

constexpr int kMaxSweeps = 100;
constexpr int kAngleGrid = 64;
constexpr double kAngleResolution = 1e-10;

// The 2x2x2x2 sub-tensor over indices {p, q}, indexed by bits.
using PairTensor = std::array<double, 16>;

PairTensor pair_tensor(const Cumulant4Tensor& c, Eigen::Index p, Eigen::Index q) {
    PairTensor out{};
    const std::array<Eigen::Index, 2> ix{p, q};
    for (int b = 0; b < 16; ++b) out[static_cast<std::size_t>(b)] = c(ix[b >> 3 & 1], ix[b >> 2 & 1], ix[b >> 1 & 1], ix[b & 1]);
    return out;
}

double contract_pair(const PairTensor& t, double a, double b) {
    const std::array<double, 2> v{a, b};
    double acc = 0.0;
    for (int k = 0; k < 16; ++k)
        acc += t[static_cast<std::size_t>(k)] * v[k >> 3 & 1] * v[k >> 2 & 1] * v[k >> 1 & 1] * v[k & 1];
    return acc;
}

// Rows p and q of givens(n, p, q, theta) are (c, s) and (-s, c) on {p, q}.
double pair_diag_mass(const PairTensor& t, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double dp = contract_pair(t, c, s);
    const double dq = contract_pair(t, -s, c);
    return dp * dp + dq * dq;
}

double best_pair_angle(const PairTensor& t) {
    constexpr double lo = -std::numbers::pi / 4.0;
    constexpr double step = (std::numbers::pi / 2.0) / kAngleGrid;
    int best = 0;
    double best_val = -1.0;
    for (int k = 0; k < kAngleGrid; ++k) {
        const double v = pair_diag_mass(t, lo + (k + 1) * step);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    // Golden section on the bracket around the best grid point. The mass has
    // period pi/2, so the bracket may spill past the interval ends.
    double a = lo + best * step;
    double b = lo + (best + 2) * step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = pair_diag_mass(t, x1);
    double f2 = pair_diag_mass(t, x2);
    while (b - a > kAngleResolution) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = pair_diag_mass(t, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = pair_diag_mass(t, x1);
        }
    }
    double theta = 0.5 * (a + b);
    if (pair_diag_mass(t, theta) < best_val) theta = lo + (best + 1) * step;
    // Fold back into (-pi/4, pi/4].
    const double period = std::numbers::pi / 2.0;
    while (theta <= lo) theta += period;
    while (theta > -lo) theta -= period;
    return theta;
}

}  // namespace

Matrix jacobi_diagonalize(const Cumulant4Tensor& c, double sweep_tol) {
    const Eigen::Index n = c.dim();
    Matrix q = Matrix::Identity(n, n);
    if (n < 2) return q;
    const double scale = std::max(1.0, tensor_norm(c) * tensor_norm(c));

    Cumulant4Tensor cur = c;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double best_gain = 0.0;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
            for (Eigen::Index r = p + 1; r < n; ++r) {
                const PairTensor t = pair_tensor(cur, p, r);
                const double theta = best_pair_angle(t);
                const double gain = pair_diag_mass(t, theta) - pair_diag_mass(t, 0.0);
                if (!(gain > 0.0)) continue;
                const Matrix g = givens(n, p, r, theta);
                cur = tucker_transform(cur, g);
                q = g * q;
                best_gain = std::max(best_gain, gain);
            }
        if (best_gain < sweep_tol * scale) break;
    }
    return q;
}

double joint_offdiag(std::span<const Matrix> matrices) {
    double acc = 0.0;
    for (const auto& m : matrices) acc += m.squaredNorm() - m.diagonal().squaredNorm();
    return acc;
}

Matrix joint_diagonalize(std::span<const Matrix> matrices, double sweep_tol) {
    if (matrices.empty()) throw Error(ErrorCode::InvalidArgument, "joint diagonalization needs matrices");
    const Eigen::Index n = matrices.front().rows();
    std::vector<Matrix> ms;
    for (const auto& m : matrices) {
        if (m.rows() != n || m.cols() != n) throw Error(ErrorCode::DimensionMismatch, "matrices must share one N x N shape");
        ms.emplace_back(0.5 * (m + m.transpose()));
    }

    // Cardoso-Souloumiac closed-form Givens angles; v collects V with
    // V^T M V diagonal, returned transposed.
    Matrix v = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
            for (Eigen::Index r = p + 1; r < n; ++r) {
                double g11 = 0.0, g12 = 0.0, g22 = 0.0;
                for (const auto& m : ms) {
                    const double h1 = m(p, p) - m(r, r);
                    const double h2 = m(p, r) + m(r, p);
                    g11 += h1 * h1;
                    g12 += h1 * h2;
                    g22 += h2 * h2;
                }
                const double ton = g11 - g22;
                const double toff = 2.0 * g12;
                const double theta = 0.5 * std::atan2(toff, ton + std::hypot(ton, toff));
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                if (!(std::abs(s) > sweep_tol)) continue;
                rotated = true;
                for (auto& m : ms) {
                    const Vector cp = m.col(p), cr = m.col(r);
                    m.col(p) = c * cp + s * cr;
                    m.col(r) = c * cr - s * cp;
                    const Eigen::RowVectorXd rp = m.row(p), rr = m.row(r);
                    m.row(p) = c * rp + s * rr;
                    m.row(r) = c * rr - s * rp;
                }
                const Vector vp = v.col(p), vr = v.col(r);
                v.col(p) = c * vp + s * vr;
                v.col(r) = c * vr - s * vp;
            }
        if (!rotated) break;
    }
    return v.transpose();
}

std::vector<Matrix> significant_eigenmatrices(const Cumulant4Tensor& c) {
    const Eigen::Index n = c.dim();
    const SymmetricEigen eig = symmetric_eigen(unfold(c, Grouping::TwoByTwo), EigenOrder::DescendingMagnitude);
    std::vector<Matrix> out;
    for (Eigen::Index k = 0; k < n; ++k) {
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = eig.vectors(i * n + j, k);
        out.emplace_back(eig.values(k) * 0.5 * (m + m.transpose()));
    }
    return out;
}

Matrix jade_rotation(const Cumulant4Tensor& c, double sweep_tol) {
    if (c.dim() < 2) return Matrix::Identity(c.dim(), c.dim());
    const auto mats = significant_eigenmatrices(c);
    return joint_diagonalize(mats, sweep_tol);
}

Separator jade(const SignalMatrix& u, double rank_tolerance) {
    auto [whitener, sphered] = whiten(u, rank_tolerance);
    Matrix rotation = jade_rotation(estimate_cum4(sphered));
    return {std::move(rotation), std::move(whitener)};
}

}  // namespace bsskit
