#include "bsskit/adaptive.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bsskit/error.hpp"

namespace bsskit {

namespace {

constexpr double kSingularDet = 1e-12;
constexpr double kDivergenceNorm = 1e6;

double log_cosh(double y) {
    const double a = std::abs(y);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void check_scores(std::span<const ScoreFunction> scores, Eigen::Index outputs) {
    if (static_cast<Eigen::Index>(scores.size()) != outputs)
        throw Error(ErrorCode::DimensionMismatch, "need one score function per output channel");
}

Vector apply_f(std::span<const ScoreFunction> scores, const Vector& y) {
    Vector out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = scores[static_cast<std::size_t>(i)].f(y(i));
    return out;
}

double checked_log_abs_det(const Matrix& g) {
    if (g.rows() != g.cols()) throw Error(ErrorCode::DimensionMismatch, "G must be square");
    const double det = g.fullPivLu().determinant();
    if (!(std::abs(det) >= kSingularDet)) throw Error(ErrorCode::SingularG, "|det G| below 1e-12");
    return std::log(std::abs(det));
}

}  // namespace

std::string_view to_string(ScoreKind kind) noexcept {
    switch (kind) {
        case ScoreKind::Cubic: return "cubic";
        case ScoreKind::Tanh: return "tanh";
        case ScoreKind::SignSwitching: return "sign_switching";
    }
    return "unknown";
}

std::optional<ScoreKind> parse_score_kind(std::string_view name) noexcept {
    if (name == "cubic") return ScoreKind::Cubic;
    if (name == "tanh") return ScoreKind::Tanh;
    if (name == "sign_switching") return ScoreKind::SignSwitching;
    return std::nullopt;
}

double ScoreFunction::f(double y) const {
    switch (kind_) {
        case ScoreKind::Cubic: return y * y * y;
        case ScoreKind::Tanh: return std::tanh(y);
        case ScoreKind::SignSwitching: return y + sign_ * std::tanh(y);
    }
    return 0.0;
}

double ScoreFunction::derivative(double y) const {
    switch (kind_) {
        case ScoreKind::Cubic: return 3.0 * y * y;
        case ScoreKind::Tanh: {
            const double t = std::tanh(y);
            return 1.0 - t * t;
        }
        case ScoreKind::SignSwitching: {
            const double t = std::tanh(y);
            return 1.0 + sign_ * (1.0 - t * t);
        }
    }
    return 0.0;
}

std::optional<double> ScoreFunction::log_phi(double y) const {
    switch (kind_) {
        case ScoreKind::Cubic: return -0.25 * y * y * y * y;
        case ScoreKind::Tanh: return -log_cosh(y);
        case ScoreKind::SignSwitching: return -0.5 * y * y - sign_ * log_cosh(y);
    }
    return std::nullopt;
}

KurtosisTracker::KurtosisTracker(Eigen::Index channels, double forgetting)
    : forgetting_(forgetting), m2_(Vector::Ones(channels)), m4_(Vector::Constant(channels, 3.0)) {}

void KurtosisTracker::observe(const Vector& y) {
    const Vector y2 = y.cwiseProduct(y);
    m2_ = forgetting_ * m2_ + (1.0 - forgetting_) * y2;
    m4_ = forgetting_ * m4_ + (1.0 - forgetting_) * y2.cwiseProduct(y2);
}

double KurtosisTracker::kurtosis(Eigen::Index channel) const {
    const double m2 = m2_(channel);
    return m2 > 0.0 ? m4_(channel) / (m2 * m2) - 3.0 : 0.0;
}

void KurtosisTracker::apply(std::span<ScoreFunction> scores) const {
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i].kind() == ScoreKind::SignSwitching)
            scores[i].set_sign(kurtosis(static_cast<Eigen::Index>(i)) >= 0.0 ? 1.0 : -1.0);
}

void AdaptConfig::validate() const {
    if (!(step_size >= 0.0)) throw Error(ErrorCode::InvalidArgument, "step size must be >= 0");
    if (!(convergence_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
    if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
}

double universal_criterion(const Matrix& g, const SignalMatrix& u, std::span<const ScoreFunction> scores) {
    if (g.cols() != u.channels()) throw Error(ErrorCode::DimensionMismatch, "G columns != channels");
    check_scores(scores, g.rows());
    const double log_det = checked_log_abs_det(g);
    const Matrix y = g * u.data();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const auto& score = scores[static_cast<std::size_t>(i)];
        for (Eigen::Index t = 0; t < y.cols(); ++t) {
            const auto lp = score.log_phi(y(i, t));
            if (!lp) throw Error(ErrorCode::InvalidArgument, "score has no closed-form log density");
            acc += *lp;
        }
    }
    return log_det + acc / static_cast<double>(y.cols());
}

Matrix adaptive_update(const Matrix& g, const Vector& u, std::span<const ScoreFunction> scores,
                       const AdaptConfig& cfg) {
    if (g.cols() != u.size()) throw Error(ErrorCode::DimensionMismatch, "G columns != sample length");
    check_scores(scores, g.rows());
    const double mu = cfg.step_size;
    const Vector y = g * u;
    const Vector fy = apply_f(scores, y);

    switch (cfg.mode) {
        case UpdateMode::Plain: {
            checked_log_abs_det(g);
            const Matrix g_inv_t = g.inverse().transpose();
            return g + mu * (g_inv_t - fy * u.transpose());
        }
        case UpdateMode::Relative: {
            const Matrix i = Matrix::Identity(g.rows(), g.rows());
            return g + mu * (i - fy * y.transpose()) * g;
        }
        case UpdateMode::AntiHebbian: {
            Vector gy(y.size());
            for (Eigen::Index k = 0; k < y.size(); ++k) gy(k) = cfg.hebbian.f(y(k));
            const Matrix i = Matrix::Identity(g.rows(), g.rows());
            return g + mu * (i - fy * gy.transpose()) * g;
        }
        case UpdateMode::NonlinearPca:
            return nonlinear_pca_update(g, u, scores, mu);
    }
    return g;
}

Matrix nonlinear_pca_update(const Matrix& g, const Vector& u, std::span<const ScoreFunction> scores,
                            double step_size) {
    if (g.cols() != u.size()) throw Error(ErrorCode::DimensionMismatch, "G columns != sample length");
    check_scores(scores, g.rows());
    if (step_size == 0.0) return g;
    const Vector fy = apply_f(scores, g * u);
    Matrix gt = g.transpose();
    gt += step_size * (u - gt * fy) * fy.transpose();
    return symmetric_orthonormalize(gt.transpose());
}

Matrix nonlinear_pca_direction(const Matrix& g, const SignalMatrix& u, std::span<const ScoreFunction> scores) {
    if (g.cols() != u.channels()) throw Error(ErrorCode::DimensionMismatch, "G columns != channels");
    check_scores(scores, g.rows());
    const Matrix y = g * u.data();
    Matrix fy(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index t = 0; t < y.cols(); ++t) fy(i, t) = scores[static_cast<std::size_t>(i)].f(y(i, t));
    const auto t = static_cast<double>(y.cols());
    // mean of f (u - G^T f)^T
    return (fy * u.data().transpose() - fy * fy.transpose() * g) / t;
}

SeparationRun run_separation(const SignalMatrix& u, std::vector<ScoreFunction> scores, const AdaptConfig& cfg) {
    cfg.validate();

    Whitener whitener = Whitener::identity(u.channels());
    SignalMatrix z = u;
    if (cfg.prewhiten) {
        auto w = whiten(u);
        whitener = std::move(w.whitener);
        z = std::move(w.sphered);
    }
    const Eigen::Index n = z.channels();
    if (scores.size() == 1 && n > 1) scores.assign(static_cast<std::size_t>(n), scores.front());
    check_scores(scores, n);

    Matrix g = cfg.init == InitKind::Identity ? Matrix::Identity(n, n) : random_orthogonal(n, cfg.init_seed);

    bool switching = false;
    for (const auto& s : scores) switching = switching || s.kind() == ScoreKind::SignSwitching;
    KurtosisTracker tracker(n);

    SeparationRun run;
    for (int epoch = 0; epoch < cfg.max_iterations; ++epoch) {
        const Matrix before = g;
        for (Eigen::Index t = 0; t < z.samples(); ++t) {
            const Vector sample = z.sample(t);
            if (switching) {
                tracker.observe(g * sample);
                tracker.apply(scores);
            }
            g = adaptive_update(g, sample, scores, cfg);
            if (!g.allFinite() || g.norm() > kDivergenceNorm)
                throw Error(ErrorCode::Diverged, "||G||_F exceeded 1e6 at epoch " + std::to_string(epoch) +
                                                     ", sample " + std::to_string(t));
        }
        run.iterations = epoch + 1;
        try {
            run.trajectory.push_back(universal_criterion(g, z, scores));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularG) throw;
            run.trajectory.push_back(-std::numeric_limits<double>::infinity());
        }
        if ((g - before).norm() < cfg.convergence_tolerance) {
            run.converged = true;
            break;
        }
    }
    run.separator = Separator{std::move(g), std::move(whitener)};
    return run;
}

StabilityReport stability_check(const SignalMatrix& y, std::span<const ScoreFunction> scores,
                                double z_margin) {
    const Eigen::Index n = y.channels();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "stability check needs at least two channels");
    check_scores(scores, n);
    const auto t = static_cast<double>(y.samples());

    StabilityReport r;
    r.sigma2.resize(n);
    r.k.resize(n);
    r.m.resize(n);
    r.kappa.resize(n);
    r.kappa_stderr.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = scores[static_cast<std::size_t>(i)];
        double s2 = 0.0, k = 0.0, m = 0.0, fy = 0.0;
        for (Eigen::Index n_ = 0; n_ < y.samples(); ++n_) {
            const double v = y.data()(i, n_);
            const double d = s.derivative(v);
            s2 += v * v;
            k += d;
            m += v * v * d;
            fy += s.f(v) * v;
        }
        r.sigma2(i) = s2 / t;
        r.k(i) = k / t;
        r.m(i) = m / t;
        r.kappa(i) = r.k(i) * r.sigma2(i) - fy / t;

        // Per-sample terms of kappa with the variance held at its estimate.
        double var = 0.0;
        for (Eigen::Index n_ = 0; n_ < y.samples(); ++n_) {
            const double v = y.data()(i, n_);
            const double term = s.derivative(v) * r.sigma2(i) - s.f(v) * v - r.kappa(i);
            var += term * term;
        }
        r.kappa_stderr(i) = std::sqrt(var / t / t);
    }

    r.pair_variance_product = Matrix::Zero(n, n);
    r.pair_kappa_product = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(r.m(i) + 1.0 > 0.0)) r.violations.push_back("m_" + std::to_string(i) + " + 1 > 0");
        if (!(r.k(i) > 0.0)) r.violations.push_back("k_" + std::to_string(i) + " > 0");
        if (!(1.0 + r.kappa(i) > z_margin * r.kappa_stderr(i)))
            r.violations.push_back("1 + kappa_" + std::to_string(i) + " > 0");
    }
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            r.pair_variance_product(i, j) = r.sigma2(i) * r.sigma2(j) * r.k(i) * r.k(j);
            r.pair_kappa_product(i, j) = (1.0 + r.kappa(i)) * (1.0 + r.kappa(j));
            if (j < i) continue;
            const std::string pair = std::to_string(i) + "," + std::to_string(j);
            if (!(r.pair_variance_product(i, j) > 1.0))
                r.violations.push_back("sigma2 sigma2 k k > 1 for pair " + pair);
            const double se = std::abs(1.0 + r.kappa(j)) * r.kappa_stderr(i) +
                              std::abs(1.0 + r.kappa(i)) * r.kappa_stderr(j);
            if (!(r.pair_kappa_product(i, j) - 1.0 > z_margin * se))
                r.violations.push_back("(1 + kappa_i)(1 + kappa_j) > 1 for pair " + pair);
        }
    r.stable = r.violations.empty();
    return r;
}

double bussgang_residual(const SignalMatrix& y, std::span<const ScoreFunction> scores) {
    check_scores(scores, y.channels());
    const Matrix& d = y.data();
    Matrix fy(d.rows(), d.cols());
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index t = 0; t < d.cols(); ++t) fy(i, t) = scores[static_cast<std::size_t>(i)].f(d(i, t));
    const auto t = static_cast<double>(d.cols());
    return ((fy * d.transpose() - d * d.transpose()) / t).norm();
}

std::vector<ScoreFunction> uniform_scores(Eigen::Index channels, ScoreKind kind) {
    return std::vector<ScoreFunction>(static_cast<std::size_t>(channels), ScoreFunction(kind));
}

}  // namespace bsskit
