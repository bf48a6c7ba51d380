#include "bsskit/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bsskit/error.hpp"

namespace bsskit {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Vector kron3(const Vector& g) {
    const Eigen::Index n = g.size();
    Vector out(n * n * n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index l = 0; l < n; ++l) out((j * n + k) * n + l) = g(j) * g(k) * g(l);
    return out;
}

Matrix centered(const SignalMatrix& u) {
    const Matrix& d = u.data();
    return d.colwise() - d.rowwise().mean();
}

}  // namespace

Cumulant4Tensor::Cumulant4Tensor(Eigen::Index dim)
    : dim_(dim), values_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {
    if (dim < 0) throw Error(ErrorCode::InvalidArgument, "tensor dimension must be >= 0");
}

Cumulant4Tensor::Cumulant4Tensor(Eigen::Index dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
    if (dim < 0 || values_.size() != static_cast<std::size_t>(dim * dim * dim * dim))
        throw Error(ErrorCode::DimensionMismatch, "tensor value count must be dim^4");
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "tensor entries must be finite");
    symmetrize();
}

void Cumulant4Tensor::symmetrize() {
    const Eigen::Index n = dim_;
    std::array<Eigen::Index, 4> idx{};
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            for (Eigen::Index k = j; k < n; ++k)
                for (Eigen::Index l = k; l < n; ++l) {
                    idx = {i, j, k, l};
                    double sum = 0.0;
                    int count = 0;
                    do {
                        sum += values_[index(idx[0], idx[1], idx[2], idx[3])];
                        ++count;
                    } while (std::next_permutation(idx.begin(), idx.end()));
                    const double mean = sum / count;
                    idx = {i, j, k, l};
                    do {
                        values_[index(idx[0], idx[1], idx[2], idx[3])] = mean;
                    } while (std::next_permutation(idx.begin(), idx.end()));
                }
}

Cumulant4Tensor Cumulant4Tensor::diagonal(const Vector& diag) {
    const Eigen::Index n = diag.size();
    std::vector<double> v(static_cast<std::size_t>(n * n * n * n), 0.0);
    Cumulant4Tensor out(n);
    for (Eigen::Index i = 0; i < n; ++i) v[out.index(i, i, i, i)] = diag(i);
    return Cumulant4Tensor(n, std::move(v));
}

Cumulant4Tensor Cumulant4Tensor::rank_one_sum(const Vector& weights, const Matrix& factors) {
    if (weights.size() != factors.cols())
        throw Error(ErrorCode::DimensionMismatch, "one weight per factor column");
    const Eigen::Index n = factors.rows();
    std::vector<double> v(static_cast<std::size_t>(n * n * n * n), 0.0);
    for (Eigen::Index r = 0; r < factors.cols(); ++r) {
        const Vector f = factors.col(r);
        std::size_t pos = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = 0; k < n; ++k)
                    for (Eigen::Index l = 0; l < n; ++l) v[pos++] += weights(r) * f(i) * f(j) * f(k) * f(l);
    }
    return Cumulant4Tensor(n, std::move(v));
}

Vector Cumulant4Tensor::contract3(const Vector& g) const {
    if (g.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "vector length != tensor dim");
    const Eigen::Map<const RowMajor> m(values_.data(), dim_, dim_ * dim_ * dim_);
    return m * kron3(g);
}

double Cumulant4Tensor::contract4(const Vector& g) const { return g.dot(contract3(g)); }

LaggedCovariance sample_covariance(const SignalMatrix& u, Eigen::Index lag) {
    if (lag < 0 || lag >= u.samples())
        throw Error(ErrorCode::LagTooLarge, "lag must be in [0, samples)");
    const Matrix x = centered(u);
    const Eigen::Index t = u.samples();
    Matrix r = x.rightCols(t - lag) * x.leftCols(t - lag).transpose() / static_cast<double>(t - lag);
    if (lag == 0) r = 0.5 * (r + r.transpose()).eval();
    return {lag, std::move(r)};
}

Cumulant4Tensor estimate_cum4(const SignalMatrix& u) {
    if (u.samples() < 4) throw Error(ErrorCode::InvalidArgument, "cumulant estimation needs T >= 4");
    const Matrix x = centered(u);
    const Eigen::Index n = x.rows();
    const auto t = static_cast<double>(x.cols());

    // Products of channel pairs i <= j, one row per pair.
    std::vector<Eigen::Index> pair_of(static_cast<std::size_t>(n * n));
    Eigen::Index pairs = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            pair_of[static_cast<std::size_t>(i * n + j)] = pairs;
            pair_of[static_cast<std::size_t>(j * n + i)] = pairs;
            ++pairs;
        }
    Matrix p(pairs, x.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            p.row(pair_of[static_cast<std::size_t>(i * n + j)]) = x.row(i).cwiseProduct(x.row(j));

    const Matrix m4 = p * p.transpose() / t;
    const Matrix m2 = x * x.transpose() / t;

    auto pr = [&](Eigen::Index a, Eigen::Index b) { return pair_of[static_cast<std::size_t>(a * n + b)]; };
    std::vector<double> v(static_cast<std::size_t>(n * n * n * n));
    std::size_t pos = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index l = 0; l < n; ++l)
                    v[pos++] = m4(pr(i, j), pr(k, l)) - m2(i, j) * m2(k, l) - m2(i, k) * m2(j, l) -
                               m2(i, l) * m2(j, k);
    return Cumulant4Tensor(n, std::move(v));
}

double kurtosis(const SignalMatrix& y) {
    if (y.channels() != 1) throw Error(ErrorCode::DimensionMismatch, "kurtosis expects one channel");
    const Vector x = centered(y).row(0).transpose();
    const double var = x.squaredNorm() / static_cast<double>(x.size());
    if (var < 1e-12) throw Error(ErrorCode::DegenerateChannel, "channel variance below 1e-12");
    const double m4 = x.array().square().square().mean();
    return m4 / (var * var) - 3.0;
}

Cumulant4Tensor tucker_transform(const Cumulant4Tensor& c, const Matrix& g) {
    const Eigen::Index n = c.dim();
    if (g.cols() != n) throw Error(ErrorCode::DimensionMismatch, "G columns != tensor dim");
    const Eigen::Index out_dim = g.rows();

    // Each pass contracts the leading index and moves the new index last, so
    // four passes restore the original index order.
    std::vector<double> cur = c.values();
    Eigen::Index rest = n * n * n;
    for (int pass = 0; pass < 4; ++pass) {
        const Eigen::Map<const RowMajor> x(cur.data(), n, rest);
        const Matrix y = g * x;  // column-major storage = row-major (rest..., new)
        cur.assign(y.data(), y.data() + y.size());
        rest = rest / n * out_dim;
    }
    return Cumulant4Tensor(out_dim, std::move(cur));
}

double tensor_norm(const Cumulant4Tensor& c) {
    double s = 0.0;
    for (double v : c.values()) s += v * v;
    return std::sqrt(s);
}

Matrix unfold(const Cumulant4Tensor& c, Grouping grouping) {
    const Eigen::Index n = c.dim();
    if (grouping == Grouping::OneByThree) return Eigen::Map<const RowMajor>(c.values().data(), n, n * n * n);
    return Eigen::Map<const RowMajor>(c.values().data(), n * n, n * n);
}

Cumulant4Tensor fold(const Matrix& m, Grouping grouping) {
    Eigen::Index n = 0;
    if (grouping == Grouping::OneByThree) {
        n = m.rows();
        if (m.cols() != n * n * n) throw Error(ErrorCode::DimensionMismatch, "1x3 unfolding must be N x N^3");
    } else {
        n = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
        if (n * n != m.rows() || m.cols() != m.rows())
            throw Error(ErrorCode::DimensionMismatch, "2x2 unfolding must be N^2 x N^2");
    }
    const RowMajor rm = m;
    return Cumulant4Tensor(n, std::vector<double>(rm.data(), rm.data() + rm.size()));
}

ContrastMass psi4_contrast(const Cumulant4Tensor& c) {
    ContrastMass out;
    for (Eigen::Index i = 0; i < c.dim(); ++i) out.diag += c(i, i, i, i) * c(i, i, i, i);
    const double norm = tensor_norm(c);
    out.offdiag = std::max(0.0, norm * norm - out.diag);
    return out;
}

double hermite(int order, double y) {
    if (order < 0) throw Error(ErrorCode::InvalidArgument, "Hermite order must be >= 0");
    // Coefficients in increasing powers; h_{k+1} = y h_k - h_k'.
    std::vector<double> h{1.0};
    for (int k = 0; k < order; ++k) {
        std::vector<double> next(h.size() + 1, 0.0);
        for (std::size_t p = 0; p < h.size(); ++p) next[p + 1] += h[p];
        for (std::size_t p = 1; p < h.size(); ++p) next[p - 1] -= static_cast<double>(p) * h[p];
        h = std::move(next);
    }
    double acc = 0.0;
    for (auto it = h.rbegin(); it != h.rend(); ++it) acc = acc * y + *it;
    return acc;
}

double edgeworth_pdf(double y, double c3, double c4) {
    const double gauss = std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi);
    return gauss * (1.0 + c3 * hermite(3, y) / 6.0 + c4 * hermite(4, y) / 24.0 +
                    10.0 * c3 * c3 * hermite(6, y) / 720.0);
}

}  // namespace bsskit
