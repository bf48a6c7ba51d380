#include <cmath>

#include "bsskit/algebraic.hpp"
#include "bsskit/error.hpp"

namespace bsskit {

EqualizerResult unimodal_equalizer_sphered(const SignalMatrix& regressors, const EqualizerOptions& options) {
    if (!(options.mu1 > 0.0) || !(options.mu2 >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "need mu1 > 0 and mu2 >= 0");
    if (options.epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
    const Eigen::Index d = regressors.channels();

    Vector g = Vector::Zero(d);
    if (options.init) {
        if (options.init->size() != d) throw Error(ErrorCode::DimensionMismatch, "init length != regressor dim");
        g = *options.init;
        const double norm = g.norm();
        if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "init must be nonzero");
        g /= norm;
    } else {
        g(0) = 1.0;
    }

    EqualizerResult out;
    out.w = g * g.transpose();
    out.trajectory.push_back(g);
    const Matrix& z = regressors.data();
    Matrix& w = out.w;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        for (Eigen::Index n = 0; n < z.cols(); ++n) {
            const auto u = z.col(n);
            const double norm2 = u.squaredNorm();
            const double gain = options.mu1 / (1.0 + options.mu1 * norm2 * norm2);  // ||u (x) u||^2 = ||u||^4
            const double a = gain * (1.0 - u.dot(w * u));
            // Entry-wise a * (u_i u_j) keeps W exactly symmetric.
            for (Eigen::Index j = 0; j < d; ++j)
                for (Eigen::Index i = 0; i < d; ++i) w(i, j) += a * (u(i) * u(j));
            g += options.mu2 * (w * g);
            g /= g.norm();
            if (options.observer) options.observer(EqualizerStep{epoch, n, w, g});
        }
        out.trajectory.push_back(g);
    }
    out.g = std::move(g);
    out.whitener = Whitener::identity(d);
    return out;
}

EqualizerResult unimodal_equalizer(const SignalMatrix& sensors, Eigen::Index length, const EqualizerOptions& options,
                                   double rank_tolerance) {
    if (length < 1) throw Error(ErrorCode::InvalidArgument, "equalizer length must be >= 1");
    const Eigen::Index start = sensors.transient();
    if (sensors.samples() - start < length)
        throw Error(ErrorCode::InvalidArgument, "not enough samples for the equalizer length");
    const Matrix regress = stack_windows(sensors.data().rightCols(sensors.samples() - start), length);
    auto [whitener, sphered] = whiten(SignalMatrix(regress), rank_tolerance);
    EqualizerResult out = unimodal_equalizer_sphered(sphered, options);
    out.whitener = std::move(whitener);
    out.length = length;
    return out;
}

}  // namespace bsskit
