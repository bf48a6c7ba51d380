#pragma once

// Adaptive separation driven by the log-likelihood style criterion
// ln|det G| + sum_i E[log phi_i(y_i)]: plain, relative (natural) gradient,
// nonlinear PCA and anti-Hebbian updates, plus stability diagnostics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsskit/linalg.hpp"
#include "bsskit/signals.hpp"
#include "bsskit/sos.hpp"

namespace bsskit {

enum class ScoreKind { Cubic, Tanh, SignSwitching };

std::string_view to_string(ScoreKind kind) noexcept;
std::optional<ScoreKind> parse_score_kind(std::string_view name) noexcept;

/// Score nonlinearity f = -phi'/phi with its derivative and log-density.
///
///   cubic:          f = y^3,               log phi = -y^4/4
///   tanh:           f = tanh y,            log phi = -log cosh y
///   sign_switching: f = y + s tanh y,      log phi = -y^2/2 - s log cosh y
///
/// where s = +1/-1 is the sign of the channel's running kurtosis estimate
/// (see KurtosisTracker). Additive constants of log phi are dropped, so
/// criterion values compare across G only.
class ScoreFunction {
public:
    constexpr explicit ScoreFunction(ScoreKind kind = ScoreKind::Cubic, double sign = 1.0)
        : kind_(kind), sign_(sign < 0.0 ? -1.0 : 1.0) {}

    ScoreKind kind() const noexcept { return kind_; }
    double sign() const noexcept { return sign_; }
    void set_sign(double s) noexcept { sign_ = s < 0.0 ? -1.0 : 1.0; }

    double f(double y) const;
    double derivative(double y) const;
    std::optional<double> log_phi(double y) const;

private:
    ScoreKind kind_;
    double sign_;
};

/// Per-channel exponentially forgotten m2/m4 estimates; flips the sign of
/// sign_switching scores to sign(m4/m2^2 - 3).
class KurtosisTracker {
public:
    explicit KurtosisTracker(Eigen::Index channels, double forgetting = 0.99);

    void observe(const Vector& y);
    double kurtosis(Eigen::Index channel) const;
    void apply(std::span<ScoreFunction> scores) const;

private:
    double forgetting_;
    Vector m2_;
    Vector m4_;
};

enum class UpdateMode { Plain, Relative, NonlinearPca, AntiHebbian };

enum class InitKind { Identity, RandomOrthogonal };

struct AdaptConfig {
    double step_size = 0.005;
    UpdateMode mode = UpdateMode::Relative;
    ScoreFunction hebbian{ScoreKind::Cubic};  // g(y) of the anti-Hebbian rule
    int max_iterations = 5;                   // epochs over the data
    double convergence_tolerance = 1e-6;      // on ||G_epoch - G_prev||_F
    InitKind init = InitKind::Identity;
    std::uint64_t init_seed = 0;
    bool prewhiten = true;

    void validate() const;
};

/// ln|det G| + (1/T) sum_t sum_i log phi_i(y_i(t)), y = G u.
double universal_criterion(const Matrix& g, const SignalMatrix& u,
                           std::span<const ScoreFunction> scores);

/// One stochastic step on sample u:
///   plain:        G += mu (G^-T - f(y) u^T)
///   relative:     G += mu (I - f(y) y^T) G
///   anti_hebbian: G += mu (I - f(y) g(y)^T) G
///   nonlinear_pca: see nonlinear_pca_update
Matrix adaptive_update(const Matrix& g, const Vector& u, std::span<const ScoreFunction> scores,
                       const AdaptConfig& cfg);

/// G^T += mu [u - G^T f(y)] f(y)^T followed by polar re-orthonormalization.
Matrix nonlinear_pca_update(const Matrix& g, const Vector& u,
                            std::span<const ScoreFunction> scores, double step_size);

/// Raw nonlinear PCA increment of G (before re-orthonormalization), averaged
/// over a batch.
Matrix nonlinear_pca_direction(const Matrix& g, const SignalMatrix& u,
                               std::span<const ScoreFunction> scores);

struct SeparationRun {
    Separator separator;
    std::vector<double> trajectory;  // universal_criterion after each epoch
    int iterations = 0;              // epochs performed
    bool converged = false;
};

/// Loops adaptive_update over the samples for up to max_iterations epochs.
/// Throws Diverged if ||G||_F exceeds 1e6.
SeparationRun run_separation(const SignalMatrix& u, std::vector<ScoreFunction> scores,
                             const AdaptConfig& cfg);

struct StabilityReport {
    Vector sigma2;  // E[y_i^2]
    Vector k;       // E[f_i'(y_i)]
    Vector m;       // E[y_i^2 f_i'(y_i)]
    Vector kappa;   // k_i sigma2_i - E[f_i(y_i) y_i]
    Vector kappa_stderr;
    Matrix pair_variance_product;  // sigma2_i sigma2_j k_i k_j
    Matrix pair_kappa_product;     // (1 + kappa_i)(1 + kappa_j)
    bool stable = false;
    std::vector<std::string> violations;
};

/// Conditions m_i + 1 > 0, k_i > 0, sigma2_i sigma2_j k_i k_j > 1,
/// (1 + kappa_i)(1 + kappa_j) > 1 and 1 + kappa_i > 0. The kappa conditions
/// only count as met when they clear the threshold by z_margin standard
/// errors of the sample estimate.
StabilityReport stability_check(const SignalMatrix& y, std::span<const ScoreFunction> scores,
                                double z_margin = 3.0);

/// ||E[f(y) y^T] - E[y y^T]||_F over the sample.
double bussgang_residual(const SignalMatrix& y, std::span<const ScoreFunction> scores);

/// Convenience: the same score for every channel.
std::vector<ScoreFunction> uniform_scores(Eigen::Index channels, ScoreKind kind);

}  // namespace bsskit
