#include "bsskit/eval.hpp"

#include <algorithm>
#include <cmath>

#include "bsskit/error.hpp"

namespace bsskit {

GlobalSystem global_system(const Matrix& g, const Matrix& h) {
    if (g.cols() != h.rows()) throw Error(ErrorCode::DimensionMismatch, "G columns != H rows");
    Matrix s = g * h;
    Assignment a = resolve_permutation_scale(s);
    return {std::move(s), std::move(a)};
}

Assignment resolve_permutation_scale(const Matrix& s) {
    const Eigen::Index rows = s.rows();
    const Eigen::Index cols = s.cols();
    if (rows > cols) throw Error(ErrorCode::DimensionMismatch, "S needs at least as many columns as rows");

    Assignment a;
    a.permutation.assign(static_cast<std::size_t>(rows), -1);
    a.scales = Vector::Zero(rows);
    std::vector<bool> row_used(static_cast<std::size_t>(rows), false);
    std::vector<bool> col_used(static_cast<std::size_t>(cols), false);
    for (Eigen::Index step = 0; step < rows; ++step) {
        Eigen::Index bi = -1, bj = -1;
        double best = -1.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (row_used[static_cast<std::size_t>(i)]) continue;
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (col_used[static_cast<std::size_t>(j)]) continue;
                if (std::abs(s(i, j)) > best) {
                    best = std::abs(s(i, j));
                    bi = i;
                    bj = j;
                }
            }
        }
        row_used[static_cast<std::size_t>(bi)] = true;
        col_used[static_cast<std::size_t>(bj)] = true;
        a.permutation[static_cast<std::size_t>(bi)] = bj;
        a.scales(bi) = s(bi, bj);
    }

    const double total = s.squaredNorm();
    const double assigned = a.scales.squaredNorm();
    a.residual = total > 0.0 ? std::sqrt(std::max(0.0, total - assigned) / total) : 0.0;
    return a;
}

namespace {

double ratio_db(double interference, double signal) {
    if (!(signal > 0.0)) throw Error(ErrorCode::InvalidArgument, "no signal on the resolved assignment");
    if (interference <= 0.0) return kIndexFloorDb;
    return std::max(kIndexFloorDb, 10.0 * std::log10(interference / signal));
}

}  // namespace

double separation_index(const Matrix& s) {
    const Assignment a = resolve_permutation_scale(s);
    double signal = 0.0;
    double interference = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            const double v = s(i, j) * s(i, j);
            if (j == a.permutation[static_cast<std::size_t>(i)]) signal += v;
            else interference += v;
        }
    return ratio_db(interference, signal);
}

double extraction_index(const Vector& combined) {
    const double peak = combined.cwiseAbs2().maxCoeff();
    return ratio_db(combined.squaredNorm() - peak, peak);
}

}  // namespace bsskit
