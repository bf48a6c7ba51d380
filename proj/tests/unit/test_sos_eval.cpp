#include <doctest.h>

#include <cmath>

#include "bsskit/error.hpp"
#include "bsskit/eval.hpp"
#include "bsskit/linalg.hpp"
#include "bsskit/moments.hpp"
#include "bsskit/sos.hpp"
#include "support.hpp"

using namespace bsskit;

namespace {

Matrix covariance(const SignalMatrix& s) { return sample_covariance(s, 0).matrix; }

}  // namespace

TEST_CASE("linalg helpers") {
    const Matrix q = random_orthogonal(4, 1);
    CHECK((q * q.transpose() - Matrix::Identity(4, 4)).norm() < 1e-12);
    CHECK(random_orthogonal(4, 1) == q);

    const Matrix g = givens(3, 0, 2, 0.3);
    CHECK(g(0, 0) == doctest::Approx(std::cos(0.3)));
    CHECK(g(0, 2) == doctest::Approx(std::sin(0.3)));
    CHECK(g(2, 0) == doctest::Approx(-std::sin(0.3)));
    CHECK(g(1, 1) == 1.0);

    const Matrix a = test::gaussian_matrix(3, 3, 2);
    const Matrix o = symmetric_orthonormalize(a);
    CHECK((o * o.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
    // Polar factor: a = P o with P symmetric positive definite.
    const Matrix p = a * o.transpose();
    CHECK((p - p.transpose()).norm() < 1e-10);

    Vector v(3);
    v << 0.5, -2.0, 1.0;
    fix_sign(v);
    CHECK(v(1) == 2.0);

    Matrix s(2, 2);
    s << 2, 1, 1, 2;
    const SymmetricEigen e = symmetric_eigen(s);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK((s * e.vectors.col(0) - 3.0 * e.vectors.col(0)).norm() < 1e-12);
}

TEST_CASE("whitening") {
    SUBCASE("output covariance is the identity") {
        const SignalMatrix a = test::sources({SourceKind::Uniform, SourceKind::Laplace, SourceKind::Bpsk}, 5000, 3);
        const SignalMatrix u = mix(StaticMixing{test::gaussian_matrix(3, 3, 4)}, a);
        const WhiteningResult w = whiten(u);
        CHECK((covariance(w.sphered) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(w.whitener.detected_rank == 3);
        CHECK((w.whitener.apply(u).data() - w.sphered.data()).norm() < 1e-10);
    }
    SUBCASE("already white input gives an orthogonal transform") {
        const SignalMatrix a = test::sources({SourceKind::Gaussian, SourceKind::Gaussian}, 2000, 5);
        const SignalMatrix z = whiten(a).sphered;
        const Matrix t = whiten(z).whitener.matrix;
        CHECK((t * t.transpose() - Matrix::Identity(2, 2)).norm() < 1e-8);
    }
    SUBCASE("rank detection with more sensors than sources") {
        const SignalMatrix a = test::sources({SourceKind::Bpsk, SourceKind::Uniform}, 3000, 6);
        const WhiteningResult w = whiten(mix(StaticMixing{test::gaussian_matrix(3, 2, 7)}, a));
        CHECK(w.whitener.detected_rank == 2);
        CHECK(w.sphered.channels() == 2);
        CHECK(w.whitener.eigenvalues.size() == 3);
    }
    SUBCASE("all-zero input") {
        CHECK_THROWS_AS(whiten(SignalMatrix(Matrix::Zero(2, 50))), Error);
    }
}

TEST_CASE("amuse") {
    SUBCASE("random mixing of two ar1 sources") {
        const std::vector<SourceSpec> specs = {{SourceKind::Ar1, 0.9, 8}, {SourceKind::Ar1, 0.1, 8}};
        const SignalMatrix a = generate_sources(specs, 50000);
        const Matrix h = test::gaussian_matrix(2, 2, 9);
        const Separator sep = amuse(mix(StaticMixing{h}, a));
        CHECK(separation_index(sep.demixing() * h) < -20.0);
    }
    SUBCASE("identity mixing") {
        const std::vector<SourceSpec> specs = {{SourceKind::Ar1, 0.8, 10}, {SourceKind::Ar1, -0.3, 10}};
        const SignalMatrix a = generate_sources(specs, 50000);
        const Matrix s = amuse(a).demixing();
        const Assignment as = resolve_permutation_scale(s);
        Matrix normalized = s;
        for (int i = 0; i < 2; ++i) normalized.row(i) /= as.scales(i);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (j != as.permutation[i]) CHECK(std::abs(normalized(i, j)) < 1e-2);
    }
    SUBCASE("white sources have no usable eigen-gap") {
        const SignalMatrix a = test::sources({SourceKind::Bpsk, SourceKind::Bpsk}, 20000, 11);
        try {
            amuse(mix(StaticMixing{test::gaussian_matrix(2, 2, 12)}, a));
            FAIL("expected DegenerateSpectra");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegenerateSpectra);
        }
    }
    SUBCASE("bad lag") {
        const SignalMatrix a = test::sources({SourceKind::Gaussian, SourceKind::Gaussian}, 100, 13);
        CHECK_THROWS_AS(amuse(a, 0), Error);
        CHECK_THROWS_AS(amuse(a, 100), Error);
    }
}

TEST_CASE("global system") {
    const Matrix h = test::gaussian_matrix(3, 3, 20);
    CHECK((global_system(h.inverse(), h).s - Matrix::Identity(3, 3)).norm() < 1e-10);
    CHECK(global_system(Matrix::Identity(3, 3), h).s == h);
    const Matrix g = test::gaussian_matrix(2, 3, 21);
    CHECK((global_system(g, h).s - test::naive_product(g, h)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(global_system(g, Matrix::Identity(2, 2)), Error);
}

TEST_CASE("permutation and scale resolution") {
    Matrix d(2, 2);
    d << 2, 0, 0, -0.5;
    Assignment a = resolve_permutation_scale(d);
    CHECK(a.permutation == std::vector<Eigen::Index>{0, 1});
    CHECK(a.scales(0) == 2.0);
    CHECK(a.scales(1) == -0.5);
    CHECK(a.residual == 0.0);

    Matrix anti(2, 2);
    anti << 0, 1, 1, 0;
    a = resolve_permutation_scale(anti);
    CHECK(a.permutation == std::vector<Eigen::Index>{1, 0});
    CHECK(a.residual == 0.0);

    Matrix leak(2, 2);
    leak << 1, 0.1, 0.1, 1;
    a = resolve_permutation_scale(leak);
    CHECK(a.permutation == std::vector<Eigen::Index>{0, 1});
    CHECK(a.residual == doctest::Approx(std::sqrt(0.02 / 2.02)));
}

TEST_CASE("separation index") {
    Matrix p(2, 2);
    p << 0, 3, -2, 0;
    CHECK(separation_index(p) == kIndexFloorDb);

    Matrix leak(2, 2);
    leak << 1, 0.01, 0.01, 1;
    CHECK(separation_index(leak) == doctest::Approx(10 * std::log10(2e-4 / 2)));
    CHECK(separation_index(leak) == doctest::Approx(-40.0));

    // Invariant to output reordering and to a global scale.
    const Matrix s = test::gaussian_matrix(3, 3, 30);
    Matrix t(3, 3);
    t.row(0) = -2.0 * s.row(2);
    t.row(1) = -2.0 * s.row(0);
    t.row(2) = -2.0 * s.row(1);
    CHECK(separation_index(t) == doctest::Approx(separation_index(s)));
    CHECK_THROWS_AS(separation_index(Matrix::Zero(2, 2)), Error);
}

TEST_CASE("extraction index") {
    Vector c(3);
    c << 0.1, -1.0, 0.0;
    CHECK(extraction_index(c) == doctest::Approx(10 * std::log10(0.01)));
    Vector e = Vector::Zero(4);
    e(2) = -3.0;
    CHECK(extraction_index(e) == kIndexFloorDb);
}

TEST_CASE("amuse structure") {
    const std::vector<SourceSpec> specs = {{SourceKind::Ar1, 0.9, 40}, {SourceKind::Ar1, 0.2, 40}, {SourceKind::Ar1, -0.5, 40}};
    const SignalMatrix a = generate_sources(specs, 20000);
    const Matrix h = test::gaussian_matrix(3, 3, 41);
    const SignalMatrix u = mix(StaticMixing{h}, a);
    const Separator sep = amuse(u);
    CHECK((sep.rotation * sep.rotation.transpose() - Matrix::Identity(3, 3)).norm() < 1e-10);

    // Scaling the data keeps the same assignment pattern.
    const SignalMatrix scaled(7.5 * u.data());
    const Assignment p1 = resolve_permutation_scale(sep.demixing() * h);
    const Assignment p2 = resolve_permutation_scale(amuse(scaled).demixing() * h);
    CHECK(p1.permutation == p2.permutation);
}

TEST_CASE("residual vanishes only for generalized permutations") {
    Matrix p = Matrix::Zero(3, 3);
    p(0, 1) = -4.0;
    p(1, 2) = 0.3;
    p(2, 0) = 2.0;
    CHECK(resolve_permutation_scale(p).residual < 1e-12);
    CHECK(resolve_permutation_scale(test::gaussian_matrix(3, 3, 42)).residual > 1e-3);
    CHECK(resolve_permutation_scale(Matrix::Identity(2, 3)).residual == 0.0);
    CHECK_THROWS_AS(resolve_permutation_scale(Matrix::Identity(3, 2)), Error);
}
