#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <array>
#include <numbers>

#include "bsskit/error.hpp"
#include "bsskit/linalg.hpp"
#include "bsskit/moments.hpp"
#include "support.hpp"

using namespace bsskit;

namespace {

Cumulant4Tensor random_symmetric(Eigen::Index n, std::uint64_t seed) {
    const Matrix raw = test::gaussian_matrix(n * n * n * n, 1, seed);
    return Cumulant4Tensor(n, std::vector<double>(raw.data(), raw.data() + raw.size()));
}

// Brute-force cumulant of four mean-removed rows, straight from the moment
// formula.
double cumulant_oracle(const Matrix& x, int i, int j, int k, int l) {
    const Eigen::Index t = x.cols();
    Matrix c = x.colwise() - x.rowwise().mean();
    auto m2 = [&](int a, int b) {
        double s = 0;
        for (Eigen::Index n = 0; n < t; ++n) s += c(a, n) * c(b, n);
        return s / t;
    };
    double m4 = 0;
    for (Eigen::Index n = 0; n < t; ++n) m4 += c(i, n) * c(j, n) * c(k, n) * c(l, n);
    m4 /= t;
    return m4 - m2(i, j) * m2(k, l) - m2(i, k) * m2(j, l) - m2(i, l) * m2(j, k);
}

}  // namespace

TEST_CASE("sample covariance") {
    SUBCASE("zero channel gives zero row and column") {
        Matrix x = test::gaussian_matrix(3, 200, 1);
        x.row(1).setZero();
        const Matrix r = sample_covariance(SignalMatrix(x), 0).matrix;
        CHECK(r.row(1).isZero(0.0));
        CHECK(r.col(1).isZero(0.0));
    }
    SUBCASE("bpsk variance") {
        const SignalMatrix s = test::sources({SourceKind::Bpsk}, 100000, 2);
        CHECK(sample_covariance(s, 0).matrix(0, 0) == doctest::Approx(1.0).epsilon(0.03));
    }
    SUBCASE("ar1 lag one") {
        const SourceSpec spec{SourceKind::Ar1, 0.9, 3};
        const SignalMatrix s = generate_sources(std::span(&spec, 1), 100000);
        CHECK(std::abs(sample_covariance(s, 1).matrix(0, 0) - 0.9) < 0.02);
    }
    SUBCASE("matches the direct lagged sum") {
        const Matrix x = test::gaussian_matrix(2, 30, 4);
        const Matrix c = x.colwise() - x.rowwise().mean();
        const LaggedCovariance r = sample_covariance(SignalMatrix(x), 3);
        CHECK(r.lag == 3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0;
                for (int n = 3; n < 30; ++n) s += c(i, n) * c(j, n - 3);
                CHECK(r.matrix(i, j) == doctest::Approx(s / 27).epsilon(1e-12));
            }
    }
    SUBCASE("lag too large") {
        CHECK_THROWS_AS(sample_covariance(SignalMatrix(test::gaussian_matrix(1, 5, 5)), 5), Error);
    }
}

TEST_CASE("estimate_cum4") {
    SUBCASE("gaussian cumulant vanishes") {
        const SignalMatrix s = test::sources({SourceKind::Gaussian}, 100000, 6);
        CHECK(std::abs(estimate_cum4(s)(0, 0, 0, 0)) < 0.1);
    }
    SUBCASE("bpsk auto-cumulant") {
        const SignalMatrix s = test::sources({SourceKind::Bpsk}, 100000, 7);
        CHECK(std::abs(estimate_cum4(s)(0, 0, 0, 0) + 2.0) < 0.05);
    }
    SUBCASE("independent channels have no cross-cumulants") {
        const SignalMatrix s = test::sources({SourceKind::Bpsk, SourceKind::Uniform}, 100000, 8);
        CHECK(std::abs(estimate_cum4(s)(0, 0, 0, 1)) < 0.1);
    }
    SUBCASE("matches the brute-force formula and is super-symmetric") {
        const Matrix x = test::gaussian_matrix(3, 40, 9);
        const Cumulant4Tensor c = estimate_cum4(SignalMatrix(x));
        CHECK(c(0, 1, 2, 2) == doctest::Approx(cumulant_oracle(x, 0, 1, 2, 2)).epsilon(1e-12));
        CHECK(c(1, 1, 1, 1) == doctest::Approx(cumulant_oracle(x, 1, 1, 1, 1)).epsilon(1e-12));
        CHECK(c(2, 0, 1, 0) == doctest::Approx(cumulant_oracle(x, 0, 0, 1, 2)).epsilon(1e-12));
        CHECK(c(0, 1, 2, 2) == c(2, 2, 1, 0));
        CHECK(c(0, 1, 2, 2) == c(2, 0, 2, 1));
    }
}

TEST_CASE("kurtosis") {
    CHECK(kurtosis(test::sources({SourceKind::Uniform}, 100000, 10)) == doctest::Approx(-1.2).epsilon(0.05));
    CHECK(kurtosis(test::sources({SourceKind::Bpsk}, 100000, 11)) == doctest::Approx(-2.0).epsilon(0.01));
    CHECK(std::abs(kurtosis(test::sources({SourceKind::Laplace}, 100000, 12)) - 3.0) < 0.5);
    CHECK_THROWS_AS(kurtosis(test::sources({SourceKind::Bpsk, SourceKind::Bpsk}, 10, 1)), Error);
    CHECK_THROWS_AS(kurtosis(SignalMatrix(Matrix::Zero(1, 10))), Error);
}

TEST_CASE("tucker_transform") {
    const Cumulant4Tensor c = random_symmetric(3, 20);
    SUBCASE("identity") {
        const Cumulant4Tensor r = tucker_transform(c, Matrix::Identity(3, 3));
        for (std::size_t i = 0; i < c.values().size(); ++i) CHECK(r.values()[i] == doctest::Approx(c.values()[i]).epsilon(1e-14));
    }
    SUBCASE("permutation relabels indices") {
        Matrix p = Matrix::Zero(3, 3);  // y0 = u2, y1 = u0, y2 = u1
        p(0, 2) = 1;
        p(1, 0) = 1;
        p(2, 1) = 1;
        const Cumulant4Tensor r = tucker_transform(c, p);
        const int map[3] = {2, 0, 1};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) CHECK(r(i, j, k, l) == doctest::Approx(c(map[i], map[j], map[k], map[l])));
    }
    SUBCASE("matches the quadruple sum") {
        const Matrix g = test::gaussian_matrix(2, 3, 21);
        const Cumulant4Tensor r = tucker_transform(c, g);
        double s = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int cc = 0; cc < 3; ++cc)
                    for (int d = 0; d < 3; ++d) s += c(a, b, cc, d) * g(0, a) * g(1, b) * g(1, cc) * g(0, d);
        CHECK(r(0, 1, 1, 0) == doctest::Approx(s).epsilon(1e-12));
        CHECK(r.dim() == 2);
    }
    SUBCASE("orthogonal transform preserves the norm") {
        CHECK(std::abs(tensor_norm(tucker_transform(c, random_orthogonal(3, 22))) - tensor_norm(c)) < 1e-10);
    }
    SUBCASE("multilinearity of the cumulant of mixed data") {
        const Matrix x = test::gaussian_matrix(3, 100, 23).array().cube().matrix();
        const Matrix h = test::gaussian_matrix(2, 3, 24);
        const Cumulant4Tensor lhs = estimate_cum4(SignalMatrix(h * x));
        const Cumulant4Tensor rhs = tucker_transform(estimate_cum4(SignalMatrix(x)), h);
        for (std::size_t i = 0; i < lhs.values().size(); ++i)
            CHECK(lhs.values()[i] == doctest::Approx(rhs.values()[i]).epsilon(1e-9));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(tucker_transform(c, Matrix::Identity(2, 2)), Error);
    }
}

TEST_CASE("tensor_norm") {
    CHECK(tensor_norm(Cumulant4Tensor(3)) == 0.0);
    CHECK(tensor_norm(Cumulant4Tensor::diagonal(Vector::Constant(2, -2.0))) == doctest::Approx(std::sqrt(8.0)));
    const Cumulant4Tensor c = random_symmetric(3, 30);
    CHECK(tensor_norm(c) == doctest::Approx(unfold(c, Grouping::OneByThree).norm()));
    CHECK(tensor_norm(c) == doctest::Approx(unfold(c, Grouping::TwoByTwo).norm()));
}

TEST_CASE("unfold and fold") {
    SUBCASE("one-dimensional tensor") {
        const Cumulant4Tensor c(1, std::vector<double>{4.5});
        const Matrix m = unfold(c, Grouping::TwoByTwo);
        CHECK(m.rows() == 1);
        CHECK(m(0, 0) == 4.5);
    }
    const Cumulant4Tensor c = random_symmetric(3, 31);
    SUBCASE("index maps") {
        const Matrix a = unfold(c, Grouping::OneByThree);
        const Matrix b = unfold(c, Grouping::TwoByTwo);
        CHECK(a.rows() == 3);
        CHECK(a.cols() == 27);
        CHECK(b.rows() == 9);
        CHECK(a(1, (2 * 3 + 0) * 3 + 1) == c(1, 2, 0, 1));
        CHECK(b(1 * 3 + 2, 0 * 3 + 1) == c(1, 2, 0, 1));
        CHECK((b - b.transpose()).norm() == 0.0);
    }
    SUBCASE("round trip") {
        CHECK(fold(unfold(c, Grouping::TwoByTwo), Grouping::TwoByTwo).values() == c.values());
        CHECK(fold(unfold(c, Grouping::OneByThree), Grouping::OneByThree).values() == c.values());
    }
}

TEST_CASE("rank_one_sum and contractions") {
    const Matrix f = test::gaussian_matrix(3, 2, 40);
    Vector w(2);
    w << -2.0, 0.5;
    const Cumulant4Tensor c = Cumulant4Tensor::rank_one_sum(w, f);
    CHECK(c(0, 1, 2, 1) == doctest::Approx(w(0) * f(0, 0) * f(1, 0) * f(2, 0) * f(1, 0) +
                                           w(1) * f(0, 1) * f(1, 1) * f(2, 1) * f(1, 1)));
    const Vector g = test::unit_vector(3, 41);
    Vector expected = Vector::Zero(3);
    for (int j = 0; j < 2; ++j) expected += w(j) * std::pow(f.col(j).dot(g), 3) * f.col(j);
    CHECK((c.contract3(g) - expected).norm() < 1e-12);
    CHECK(c.contract4(g) == doctest::Approx(expected.dot(g)));
}

TEST_CASE("psi4 contrast masses") {
    Vector d(2);
    d << -2.0, -2.0;
    const Cumulant4Tensor c = Cumulant4Tensor::diagonal(d);
    const ContrastMass m = psi4_contrast(c);
    CHECK(m.diag == doctest::Approx(8.0));
    CHECK(m.offdiag == doctest::Approx(0.0));
    const ContrastMass r = psi4_contrast(tucker_transform(c, givens(2, 0, 1, std::numbers::pi / 4)));
    CHECK(r.diag + r.offdiag == doctest::Approx(8.0));
    CHECK(r.offdiag > 1.0);
}

TEST_CASE("hermite and edgeworth") {
    CHECK(hermite(0, 0.7) == 1.0);
    CHECK(hermite(1, 0.7) == 0.7);
    CHECK(hermite(2, 2.0) == doctest::Approx(3.0));
    CHECK(hermite(3, 1.0) == doctest::Approx(-2.0));
    CHECK(hermite(4, 0.0) == doctest::Approx(3.0));
    CHECK(hermite(6, 1.5) == doctest::Approx(std::pow(1.5, 6) - 15 * std::pow(1.5, 4) + 45 * 1.5 * 1.5 - 15));

    const double pg0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    CHECK(edgeworth_pdf(0.0, 0.0, 1.0) == doctest::Approx(pg0 * (1.0 + 3.0 / 24.0)));
    CHECK(edgeworth_pdf(1.3, 0.0, 0.0) == doctest::Approx(pg0 * std::exp(-1.3 * 1.3 / 2)));

    // Trapezoid quadrature over [-8, 8].
    const int n = 16000;
    double area = 0;
    for (int i = 0; i <= n; ++i) {
        const double y = -8.0 + 16.0 * i / n;
        area += (i == 0 || i == n ? 0.5 : 1.0) * edgeworth_pdf(y, 0.2, 0.3);
    }
    area *= 16.0 / n;
    CHECK(std::abs(area - 1.0) < 1e-3);
}

TEST_CASE("super-symmetry after transforms") {
    const Cumulant4Tensor c = tucker_transform(random_symmetric(3, 50), test::gaussian_matrix(4, 3, 51));
    Rng rng(52);
    for (int trial = 0; trial < 100; ++trial) {
        std::array<Eigen::Index, 4> idx{};
        for (auto& v : idx) v = static_cast<Eigen::Index>(rng.next() % 4);
        std::array<Eigen::Index, 4> p = idx;
        std::sort(p.begin(), p.end());
        do {
            CHECK(c(p[0], p[1], p[2], p[3]) == c(idx[0], idx[1], idx[2], idx[3]));
        } while (std::next_permutation(p.begin(), p.end()));
    }
}
