#pragma once

// Separation quality: global system, permutation/scale resolution and the
// interference-to-signal index.

#include <vector>

#include "bsskit/linalg.hpp"

namespace bsskit {

struct Assignment {
    std::vector<Eigen::Index> permutation;  // output i -> source permutation[i]
    Vector scales;                          // scales(i) = S(i, permutation[i])
    double residual = 0.0;
};

struct GlobalSystem {
    Matrix s;
    Assignment assignment;
};

/// S = G H with its resolved assignment.
GlobalSystem global_system(const Matrix& g, const Matrix& h);

/// Greedy: repeatedly take the largest remaining |S(i,j)|.
Assignment resolve_permutation_scale(const Matrix& s);

constexpr double kIndexFloorDb = -120.0;

/// 10 log10(sum_{j != pi(i)} S_ij^2 / sum S_{i,pi(i)}^2), clamped at -120 dB.
double separation_index(const Matrix& s);

/// Same ratio for a single output row: (||c||^2 - max c_j^2) / max c_j^2.
double extraction_index(const Vector& combined);

}  // namespace bsskit
