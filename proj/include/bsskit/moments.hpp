#pragma once

// Second- and fourth-order statistics and the super-symmetric cumulant
// tensor algebra built on them.

#include <array>
#include <vector>

#include "bsskit/linalg.hpp"
#include "bsskit/signals.hpp"

namespace bsskit {

/// Dense N^4 super-symmetric tensor of fourth-order cumulants.
///
/// Every constructor symmetrizes: the stored value at (i,j,k,l) is the mean of
/// the input over all orderings of the index multiset, written back to every
/// ordering, so permuted lookups compare exactly equal.
class Cumulant4Tensor {
public:
    Cumulant4Tensor() = default;
    /// Zero tensor.
    explicit Cumulant4Tensor(Eigen::Index dim);
    /// Row-major values, index ((i*N + j)*N + k)*N + l.
    Cumulant4Tensor(Eigen::Index dim, std::vector<double> values);

    /// Tensor with c(i,i,i,i) = diag(i) and zeros elsewhere.
    static Cumulant4Tensor diagonal(const Vector& diag);
    /// sum_j weights(j) * f_j (x) f_j (x) f_j (x) f_j for the columns f_j.
    static Cumulant4Tensor rank_one_sum(const Vector& weights, const Matrix& factors);

    Eigen::Index dim() const noexcept { return dim_; }
    double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
        return values_[index(i, j, k, l)];
    }
    const std::vector<double>& values() const noexcept { return values_; }

    std::size_t index(Eigen::Index i, Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
        const auto n = static_cast<std::size_t>(dim_);
        return ((static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
                static_cast<std::size_t>(k)) * n + static_cast<std::size_t>(l);
    }

    /// C * g * g * g: contraction over the last three modes.
    Vector contract3(const Vector& g) const;
    /// C(g, g, g, g).
    double contract4(const Vector& g) const;

private:
    void symmetrize();

    Eigen::Index dim_ = 0;
    std::vector<double> values_;
};

struct LaggedCovariance {
    Eigen::Index lag = 0;
    Matrix matrix;
};

/// (1/(T-lag)) sum_n u(n) u(n-lag)^T after removing each channel's mean.
LaggedCovariance sample_covariance(const SignalMatrix& u, Eigen::Index lag);

/// Sample cumulants m4 - m2 m2 - m2 m2 - m2 m2 of the mean-removed data (1/T
/// moments).
Cumulant4Tensor estimate_cum4(const SignalMatrix& u);

/// E[y^4] - 3 of the standardized channel.
double kurtosis(const SignalMatrix& y);

/// result(i,j,k,l) = sum C(a,b,c,d) G(i,a) G(j,b) G(k,c) G(l,d).
Cumulant4Tensor tucker_transform(const Cumulant4Tensor& c, const Matrix& g);

double tensor_norm(const Cumulant4Tensor& c);

enum class Grouping {
    OneByThree,  // N x N^3, column = (j*N + k)*N + l
    TwoByTwo,    // N^2 x N^2, row = i*N + j, column = k*N + l
};

Matrix unfold(const Cumulant4Tensor& c, Grouping grouping);
/// Inverse of unfold (the result is symmetrized like any other tensor).
Cumulant4Tensor fold(const Matrix& m, Grouping grouping);

struct ContrastMass {
    double diag = 0.0;     // sum_i C(i,i,i,i)^2
    double offdiag = 0.0;  // tensor_norm^2 - diag
};

ContrastMass psi4_contrast(const Cumulant4Tensor& c);

/// Hermite polynomial h_k built from h0 = 1, h1 = y, h_{k+1} = y h_k - h_k'.
double hermite(int order, double y);

/// Edgeworth density around N(0,1) truncated after the c3^2 h6 term.
double edgeworth_pdf(double y, double c3, double c4);

}  // namespace bsskit
