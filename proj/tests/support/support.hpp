#pragma once

// Helpers shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "bsskit/linalg.hpp"
#include "bsskit/random.hpp"
#include "bsskit/signals.hpp"

namespace bsskit::test {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

inline Vector unit_vector(Eigen::Index n, std::uint64_t seed) {
    Vector v = gaussian_matrix(n, 1, seed);
    return v / v.norm();
}

inline SignalMatrix sources(std::initializer_list<SourceKind> kinds, Eigen::Index samples, std::uint64_t seed) {
    std::vector<SourceSpec> specs;
    for (SourceKind k : kinds) specs.push_back({k, std::nullopt, seed});
    return generate_sources(specs, samples);
}

/// Naive triple-loop product, used as an oracle for Eigen products.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            for (Eigen::Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

/// Largest |cosine| between v and any column of m.
inline double best_alignment(const Vector& v, const Matrix& m) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        best = std::max(best, std::abs(v.dot(m.col(j))) / (v.norm() * m.col(j).norm()));
    return best;
}

}  // namespace bsskit::test
