#pragma once

// Cumulant-tensor algebra for separation: Jacobi diagonalization, JADE,
// HO-EVD, the higher-order power method, PARAFAC-ALS, the rank-1
// initializer, the unimodal equalizer and the deterministic CM solver.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bsskit/linalg.hpp"
#include "bsskit/moments.hpp"
#include "bsskit/signals.hpp"
#include "bsskit/sos.hpp"

namespace bsskit {

// --- Jacobi / joint diagonalization -------------------------------------

/// Orthogonal G such that tucker_transform(C, G) has (locally) minimal
/// off-diagonal mass. Each Givens angle maximizes the pair's diag mass on
/// (-pi/4, pi/4]; sweeps stop once the best single-rotation gain is below
/// sweep_tol.
Matrix jacobi_diagonalize(const Cumulant4Tensor& c, double sweep_tol = 1e-14);

/// Orthogonal V minimizing sum_k off(V M_k V^T) over symmetric M_k.
Matrix joint_diagonalize(std::span<const Matrix> matrices, double sweep_tol = 1e-14);

/// Sum of squared off-diagonal entries over the set.
double joint_offdiag(std::span<const Matrix> matrices);

/// The N eigenmatrices of the N^2 x N^2 unfolding with largest |eigenvalue|,
/// each scaled by its eigenvalue.
std::vector<Matrix> significant_eigenmatrices(const Cumulant4Tensor& c);

/// Rotation from joint diagonalization of the significant eigenmatrices.
Matrix jade_rotation(const Cumulant4Tensor& c, double sweep_tol = 1e-14);

/// Whiten, estimate C4 of the sphered data and compose the JADE rotation.
Separator jade(const SignalMatrix& u, double rank_tolerance = kDefaultRankTolerance);

// --- Decompositions --------------------------------------------------------

struct Hoevd {
    Matrix factor;  // left singular vectors of the 1x3 unfolding
    Cumulant4Tensor core;
};

Hoevd hoevd(const Cumulant4Tensor& c);

struct HopmResult {
    double lambda = 0.0;
    Vector g;
    int iterations = 0;
};

/// One power step: C*g*g*g normalized, sign aligned with g.
Vector hopm_step(const Cumulant4Tensor& c, const Vector& g);

/// Symmetric higher-order power method: g <- C*g*g*g / ||.||.
HopmResult hopm(const Cumulant4Tensor& c, const Vector& init, int max_iter = 500,
                double tol = 1e-12);

struct ParafacFactors {
    Matrix factor;   // M x r, unit-norm columns
    Vector weights;  // r
};

struct ParafacResult {
    ParafacFactors factors;
    std::vector<double> errors;  // reconstruction error after each ALS cycle
    int iterations = 0;
    bool converged = false;
};

/// Alternating least squares over the four mode factors (no symmetry
/// constraint). With no init the HO-EVD factor truncated to r columns is used.
ParafacResult parafac_als(const Cumulant4Tensor& c, Eigen::Index rank,
                          const std::optional<ParafacFactors>& init = std::nullopt,
                          int max_iter = 500, double tol = 1e-12);

/// sum_j w_j h_j (x) h_j (x) h_j (x) h_j.
Cumulant4Tensor parafac_reconstruct(const ParafacFactors& factors);

/// 4M >= 2N + 3.
bool kruskal_check(int sensors, int sources);

struct Rank1Init {
    Vector g0;
    double lambda = 0.0;    // dominant eigenvalue of the M^2 x M^2 unfolding
    double varsigma = 0.0;  // dominant eigenvalue of W
    Matrix w;               // unvec of the dominant eigenvector, symmetric
};

/// Two successive rank-1 approximations (unfolding, then W).
Rank1Init rank1_init(const Cumulant4Tensor& c);

/// |C(g,g,g,g)| / ||g||^4: Donoho's contrast for sphered data, from the
/// tensor rather than samples.
double donoho_from_tensor(const Cumulant4Tensor& c, const Vector& g);

// --- Unimodal equalizer ----------------------------------------------------

struct EqualizerStep {
    Eigen::Index epoch = 0;
    Eigen::Index sample = 0;
    const Matrix& w;
    const Vector& g;
};

struct EqualizerOptions {
    double mu1 = 0.5;
    double mu2 = 0.05;
    int epochs = 5;
    std::optional<Vector> init;  // defaults to the first sphered axis
    std::function<void(const EqualizerStep&)> observer;
};

struct EqualizerResult {
    std::vector<Vector> trajectory;  // g after each epoch (index 0 = start)
    Matrix w;
    Vector g;                   // final equalizer in the sphered regressor domain
    Whitener whitener;          // regressor sphering (identity when pre-sphered)
    Eigen::Index length = 0;    // L
    Matrix equalizer() const { return g.transpose() * whitener.matrix; }
};

/// Recursions on sphered regressors z(n):
///   W += mu1/(1 + mu1 ||z (x) z||^2) (1 - z^T W z) z z^T
///   g  = normalize(g + mu2 W g)
/// W starts at g0 g0^T.
EqualizerResult unimodal_equalizer_sphered(const SignalMatrix& regressors,
                                           const EqualizerOptions& options);

/// Builds the M*L regressor of the sensor stream, spheres it (rank-detecting)
/// and runs the recursions.
EqualizerResult unimodal_equalizer(const SignalMatrix& sensors, Eigen::Index length,
                                   const EqualizerOptions& options,
                                   double rank_tolerance = 1e-9);

// --- Deterministic constant modulus ---------------------------------------

struct CmSolution {
    Vector g;
    double residual = 0.0;       // RMS of (g^T u)^2 - 1 over the block
    Eigen::Index rank = 0;       // rank of P in symmetric coordinates
    bool low_confidence = false; // residual above 0.1
};

/// Solves P w = 1 (rows (u (x) u)^T) in the LS sense and extracts a
/// Kronecker-square g (x) g from the solution set.
CmSolution deterministic_cm(const SignalMatrix& u);

}  // namespace bsskit
