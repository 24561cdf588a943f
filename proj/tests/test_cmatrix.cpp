#include <doctest.h>

#include <cmath>
#include <limits>

#include "mimome/cmatrix.hpp"
#include "mimome/errors.hpp"
#include "mimome/oracle.hpp"
#include "mimome/rng.hpp"

using namespace mimome;

namespace {

ComplexMatrix random_matrix(std::size_t r, std::size_t c, rng::Stream& st) {
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double re = st.normal();
            const double im = st.normal();
            m(i, j) = Complex(re, im);
        }
    return m;
}

}  // namespace

TEST_CASE("HermitianMatrix construction is exactly Hermitian") {
    rng::Stream st(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMatrix h(random_matrix(4, 4, st));
        const ComplexMatrix d = h.matrix() - h.matrix().adjoint();
        CHECK(d.cwiseAbs().maxCoeff() == 0.0);
        for (std::size_t i = 0; i < 4; ++i) CHECK(h(i, i).imag() == 0.0);
    }
    CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix::Zero(2, 3)), InputError);
    ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
    bad(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(HermitianMatrix{bad}, InputError);
}

TEST_CASE("PSD predicate uses a scale-relative tolerance") {
    RealVector d(2);
    d << 1e6, -1e-6;
    CHECK(HermitianMatrix::diagonal(d).is_psd());
    d << 1.0, -1e-6;
    CHECK_FALSE(HermitianMatrix::diagonal(d).is_psd());
    CHECK(psd_tolerance(0.5) == 1e-10);
    CHECK(psd_tolerance(1e4) == doctest::Approx(1e-6));
}

TEST_CASE("logdet_ipa examples") {
    for (std::size_t n : {1u, 2u, 3u, 5u}) CHECK(logdet_ipa(HermitianMatrix::zero(n)) == 0.0);

    RealVector d(2);
    d << 1.0, 3.0;
    CHECK(logdet_ipa(HermitianMatrix::diagonal(d)) == doctest::Approx(std::log(2.0) + std::log(4.0)).epsilon(1e-14));

    rng::Stream st(12, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianMatrix a = HermitianMatrix::gram(random_matrix(3, 3, st));
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
        double ref = 0.0;
        for (Eigen::Index i = 0; i < 3; ++i) ref += std::log1p(es.eigenvalues()(i));
        CHECK(std::abs(logdet_ipa(a) - ref) < 1e-10 * std::abs(ref));
    }
}

TEST_CASE("logdet_ipa errors and nonnegativity") {
    RealVector d(2);
    d << -1.0, 2.0;  // I + A singular
    CHECK_THROWS_AS(logdet_ipa(HermitianMatrix::diagonal(d)), DomainError);
    ComplexMatrix b = ComplexMatrix::Ones(2, 2);
    b(1, 1) = Complex(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(logdet_ipa(b, HermitianMatrix::identity(2)), InputError);

    rng::Stream st(13, 0);
    for (int trial = 0; trial < 50; ++trial) {
        // rank-deficient PSD
        const ComplexMatrix v = random_matrix(4, 2, st);
        const HermitianMatrix a(v * v.adjoint());
        CHECK(logdet_ipa(a) >= 0.0);
    }
    CHECK(std::abs(logdet_ipa(HermitianMatrix::zero(3))) <= 1e-12);
}

TEST_CASE("logdet_ipa Gram form equals the explicit congruence") {
    rng::Stream st(14, 0);
    const ComplexMatrix b = random_matrix(3, 2, st);
    const HermitianMatrix s = random_psd(2, 5.0, st);
    CHECK(logdet_ipa(b, s) == doctest::Approx(logdet_ipa(HermitianMatrix::congruence(b, s))).epsilon(1e-14));
}

TEST_CASE("kron examples and bilinearity") {
    rng::Stream st(15, 0);
    const ComplexMatrix b = random_matrix(2, 3, st);
    ComplexMatrix one(1, 1);
    one(0, 0) = 1.0;
    CHECK((kron(one, b) - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) - ComplexMatrix::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    const ComplexMatrix a = random_matrix(2, 2, st);
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.rows() == 4);
    REQUIRE(k.cols() == 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int r = 0; r < 2; ++r)
                for (int l = 0; l < 3; ++l) CHECK(k(i * 2 + r, j * 3 + l) == a(i, j) * b(r, l));

    const ComplexMatrix a2 = random_matrix(2, 2, st);
    const ComplexMatrix c = random_matrix(3, 2, st);
    CHECK((kron(a + a2, c) - kron(a, c) - kron(a2, c)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("vec and unvec") {
    ComplexMatrix a(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    const ComplexVector v = vec(a);
    CHECK(v(0) == Complex(1.0));
    CHECK(v(1) == Complex(3.0));
    CHECK(v(2) == Complex(2.0));
    CHECK(v(3) == Complex(4.0));

    rng::Stream st(16, 0);
    const ComplexMatrix col = random_matrix(5, 1, st);
    CHECK((vec(col) - col).cwiseAbs().maxCoeff() == 0.0);
    const ComplexMatrix m = random_matrix(3, 4, st);
    CHECK((unvec(vec(m), 3, 4) - m).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(unvec(vec(m), 2, 4), InputError);
}

TEST_CASE("vec(AXB) = (B^T kron A) vec(X)") {
    rng::Stream st(17, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = random_matrix(3, 2, st);
        const ComplexMatrix x = random_matrix(2, 4, st);
        const ComplexMatrix b = random_matrix(4, 3, st);
        const ComplexVector lhs = vec(a * x * b);
        const ComplexVector rhs = kron(b.transpose(), a) * vec(x);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("commutation matrix") {
    const ComplexMatrix k1 = commutation_matrix(1, 1);
    CHECK(k1.rows() == 1);
    CHECK(k1(0, 0) == Complex(1.0));

    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(0, 0) = expect(1, 2) = expect(2, 1) = expect(3, 3) = 1.0;
    CHECK((commutation_matrix(2, 2) - expect).cwiseAbs().maxCoeff() == 0.0);

    rng::Stream st(18, 0);
    const ComplexMatrix a = random_matrix(3, 4, st);
    CHECK((vec(a.transpose()) - commutation_matrix(3, 4) * vec(a)).cwiseAbs().maxCoeff() == 0.0);

    for (auto [p, q] : {std::pair{2, 3}, std::pair{3, 4}, std::pair{1, 5}}) {
        const ComplexMatrix prod = commutation_matrix(p, q) * commutation_matrix(q, p);
        CHECK((prod - ComplexMatrix::Identity(p * q, p * q)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("solve_kkt") {
    SUBCASE("zero residual gives zero step") {
        const RealMatrix h = -RealMatrix::Identity(2, 2);
        const RealMatrix a = RealMatrix::Identity(2, 2);
        const RealVector r = RealVector::Zero(4);
        CHECK(solve_kkt(h, a, r).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("hand-solved 3x3 system") {
        // [-2 0 1; 0 -4 1; 1 1 0] d = -(1, 2, 3)  =>  d = (-13/6, -5/6, -16/3)
        RealMatrix h(2, 2);
        h << -2.0, 0.0, 0.0, -4.0;
        RealMatrix a(1, 2);
        a << 1.0, 1.0;
        RealVector r(3);
        r << 1.0, 2.0, 3.0;
        const RealVector d = solve_kkt(h, a, r);
        CHECK(d(0) == doctest::Approx(-13.0 / 6.0).epsilon(1e-14));
        CHECK(d(1) == doctest::Approx(-5.0 / 6.0).epsilon(1e-14));
        CHECK(d(2) == doctest::Approx(-16.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("random well-conditioned system") {
        rng::Stream st(19, 0);
        RealMatrix m(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) m(i, j) = st.normal();
        const RealMatrix h = -(m * m.transpose() + RealMatrix::Identity(5, 5));
        RealMatrix a = RealMatrix::Zero(2, 5);
        a(0, 0) = a(1, 1) = 1.0;
        RealVector r(7);
        for (int i = 0; i < 7; ++i) r(i) = st.normal();
        const RealVector d = solve_kkt(h, a, r);
        RealMatrix kkt = RealMatrix::Zero(7, 7);
        kkt.topLeftCorner(5, 5) = h;
        kkt.topRightCorner(5, 2) = a.transpose();
        kkt.bottomLeftCorner(2, 5) = a;
        CHECK((kkt * d + r).norm() < 1e-8 * r.norm());
    }
    SUBCASE("singular system reports a condition estimate") {
        const RealMatrix h = RealMatrix::Zero(2, 2);
        RealMatrix a(1, 2);
        a << 1.0, 1.0;
        const RealVector r = RealVector::Ones(3);
        try {
            (void)solve_kkt(h, a, r);
            FAIL("expected SolverError");
        } catch (const SolverError& e) {
            CHECK(e.condition_estimate() > 1e10);
        }
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(solve_kkt(RealMatrix::Identity(2, 2), RealMatrix::Identity(1, 3), RealVector::Zero(3)),
                        InputError);
    }
}
