#pragma once

// One-unit contrast optimization on sphered data.

#include <cstdint>

#include "bsskit/adaptive.hpp"
#include "bsskit/linalg.hpp"
#include "bsskit/signals.hpp"
#include "bsskit/sos.hpp"

namespace bsskit {

struct OneUnitState {
    Vector g;           // unit norm
    double beta = 0.0;  // E[y f(y)] at the last step
    int iteration = 0;
};

enum class FastIcaKind { Newton, FixedPoint, Gradient };

struct FastIcaVariant {
    FastIcaKind kind = FastIcaKind::Newton;
    double step_size = 0.1;  // gradient variant only

    static constexpr FastIcaVariant newton() { return {FastIcaKind::Newton, 0.0}; }
    static constexpr FastIcaVariant fixed_point() { return {FastIcaKind::FixedPoint, 0.0}; }
    static constexpr FastIcaVariant gradient(double mu) { return {FastIcaKind::Gradient, mu}; }
};

/// Batch one-unit step, y = g^T u:
///   newton:      g+ = E[u f(y)] - E[f'(y)] g
///   fixed_point: g+ = E[u f(y)]
///   gradient:    g+ = g + mu (E[u f(y)] - beta g), beta = E[y f(y)]
/// then g = g+/||g+|| with the largest-magnitude entry made positive.
OneUnitState fastica_step(const OneUnitState& state, const SignalMatrix& sphered,
                          const ScoreFunction& f, FastIcaVariant variant);

struct DeflationOptions {
    FastIcaVariant variant = FastIcaVariant::newton();
    int max_iterations = 200;
    double tolerance = 1e-8;  // stop when |g_{k+1}^T g_k| > 1 - tolerance
    std::uint64_t seed = 0;   // random starting vectors
};

/// Sequential extraction of `count` orthonormal rows; each step re-projects g
/// orthogonally to the accepted rows. The separator's whitener is the
/// identity over the sphered channels.
Separator deflate_extract(const SignalMatrix& sphered, const ScoreFunction& f, Eigen::Index count,
                          const DeflationOptions& options = {});

/// g -= mu (y^2 - 1) y u, y = g^T u. No normalization.
Vector cma_step(const Vector& g, const Vector& u, double step_size);

/// |c4(y)| / c2(y)^2 from sample moments of y = g^T u.
double donoho_contrast(const Vector& g, const SignalMatrix& u);

}  // namespace bsskit
