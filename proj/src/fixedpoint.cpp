#include "bsskit/fixedpoint.hpp"

#include <cmath>
#include <string>

#include "bsskit/error.hpp"
#include "bsskit/random.hpp"

namespace bsskit {

OneUnitState fastica_step(const OneUnitState& state, const SignalMatrix& sphered, const ScoreFunction& f,
                          FastIcaVariant variant) {
    const Matrix& u = sphered.data();
    if (state.g.size() != u.rows()) throw Error(ErrorCode::DimensionMismatch, "g length != channels");
    const auto t = static_cast<double>(u.cols());

    const Vector y = u.transpose() * state.g;
    Vector fy(y.size());
    double mean_deriv = 0.0;
    double beta = 0.0;
    for (Eigen::Index n = 0; n < y.size(); ++n) {
        fy(n) = f.f(y(n));
        mean_deriv += f.derivative(y(n));
        beta += y(n) * fy(n);
    }
    mean_deriv /= t;
    beta /= t;
    const Vector ufy = u * fy / t;

    Vector next;
    switch (variant.kind) {
        case FastIcaKind::Newton: next = ufy - mean_deriv * state.g; break;
        case FastIcaKind::FixedPoint: next = ufy; break;
        case FastIcaKind::Gradient: next = state.g + variant.step_size * (ufy - beta * state.g); break;
    }
    const double norm = next.norm();
    if (!(norm >= 1e-12)) throw Error(ErrorCode::ZeroUpdate, "one-unit update has norm below 1e-12");
    next /= norm;
    fix_sign(next);
    return {std::move(next), beta, state.iteration + 1};
}

Separator deflate_extract(const SignalMatrix& sphered, const ScoreFunction& f, Eigen::Index count,
                          const DeflationOptions& options) {
    const Eigen::Index n = sphered.channels();
    if (count < 1 || count > n) throw Error(ErrorCode::InvalidArgument, "extraction count must be in [1, N]");
    if (options.max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");

    Matrix rows(count, n);
    for (Eigen::Index p = 0; p < count; ++p) {
        Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(p));
        Vector g(n);
        for (Eigen::Index i = 0; i < n; ++i) g(i) = rng.normal();

        auto project = [&](Vector v) {
            if (p > 0) v -= rows.topRows(p).transpose() * (rows.topRows(p) * v);
            const double norm = v.norm();
            if (!(norm >= 1e-12)) throw Error(ErrorCode::ZeroUpdate, "deflated vector vanished");
            v /= norm;
            fix_sign(v);
            return v;
        };

        OneUnitState state{project(g), 0.0, 0};
        bool converged = false;
        for (int it = 0; it < options.max_iterations; ++it) {
            OneUnitState next = fastica_step(state, sphered, f, options.variant);
            next.g = project(next.g);
            const double overlap = std::abs(next.g.dot(state.g));
            state = std::move(next);
            if (overlap > 1.0 - options.tolerance) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw Error(ErrorCode::NotConverged, "deflation row " + std::to_string(p) + " did not converge");
        rows.row(p) = state.g.transpose();
    }
    return {std::move(rows), Whitener::identity(n)};
}

Vector cma_step(const Vector& g, const Vector& u, double step_size) {
    if (g.size() != u.size()) throw Error(ErrorCode::DimensionMismatch, "g length != sample length");
    const double y = g.dot(u);
    return g - step_size * (y * y - 1.0) * y * u;
}

double donoho_contrast(const Vector& g, const SignalMatrix& u) {
    if (g.size() != u.channels()) throw Error(ErrorCode::DimensionMismatch, "g length != channels");
    Vector y = u.data().transpose() * g;
    y.array() -= y.mean();
    const double c2 = y.squaredNorm() / static_cast<double>(y.size());
    if (c2 < 1e-12) throw Error(ErrorCode::DegenerateChannel, "output variance below 1e-12");
    const double m4 = y.array().square().square().mean();
    return std::abs(m4 - 3.0 * c2 * c2) / (c2 * c2);
}

}  // namespace bsskit
