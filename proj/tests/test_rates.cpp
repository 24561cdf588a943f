#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "mimome/errors.hpp"
#include "mimome/oracle.hpp"
#include "mimome/rates.hpp"

using namespace mimome;

namespace {

HermitianMatrix diag2(double a, double b) {
    RealVector d(2);
    d << a, b;
    return HermitianMatrix::diagonal(d);
}

}  // namespace

TEST_CASE("estimate_from") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = estimate_from(v);
    CHECK(e.mean == doctest::Approx(2.5));
    CHECK(e.std_err == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.n_samples == 4);
    const std::vector<double> one{7.0};
    CHECK(estimate_from(one).std_err == 0.0);
}

TEST_CASE("PowerBudget") {
    const auto t = PowerBudget::total(12.0);
    CHECK(t.is_total());
    CHECK(t.p_max(3) == 4.0);
    CHECK(t.p_min(3) == 4.0);
    const auto p = PowerBudget::per_antenna({1.0, 5.0, 2.0});
    CHECK_FALSE(p.is_total());
    CHECK(p.total_power() == 8.0);
    CHECK(p.p_max(3) == 5.0);
    CHECK(p.p_min(3) == 1.0);
    CHECK_THROWS_AS(PowerBudget::total(-1.0), InputError);
    CHECK_THROWS_AS(PowerBudget::per_antenna({1.0, -2.0}), InputError);
    CHECK_THROWS_AS(PowerBudget::per_antenna({}), InputError);
}

TEST_CASE("secrecy_rate examples") {
    SUBCASE("zero input") {
        const auto s = sample({3, 2, 2, 4.0, 1.0}, 100, 1);
        const auto e = secrecy_rate(HermitianMatrix::zero(3), s);
        CHECK(e.mean == 0.0);
        CHECK(e.std_err == 0.0);
        CHECK(e.n_samples == 100);
    }
    SUBCASE("(1,1,1) against the exponential-integral oracle") {
        const ChannelSpec spec{1, 1, 1, 4.0, 1.0};
        const auto s = sample(spec, 100000, 31);
        const auto e = secrecy_rate(HermitianMatrix::identity(1) * 10.0, s);
        const double ref = scalar_closed_form_rate(40.0, 10.0);
        CHECK(std::abs(e.mean - ref) < 3.0 * e.std_err);
    }
    SUBCASE("symmetric ensemble has zero mean") {
        const ChannelSpec spec{3, 2, 2, 1.0, 1.0};
        const auto s = sample(spec, 50000, 32);
        rng::Stream st(3, 2);
        for (int trial = 0; trial < 3; ++trial) {
            const auto e = secrecy_rate(random_psd(3, 30.0, st), s);
            CHECK(std::abs(e.mean) < 3.0 * e.std_err);
        }
    }
    SUBCASE("input errors") {
        const auto s = sample({2, 2, 1, 4.0, 1.0}, 10, 1);
        CHECK_THROWS_AS(secrecy_rate(HermitianMatrix::identity(3), s), InputError);
        CHECK_THROWS_AS(secrecy_rate(diag2(1.0, -1.0), s), InputError);
    }
}

TEST_CASE("transformed_rate examples") {
    SUBCASE("n_r = n_e, unit ratio: exactly zero per draw") {
        const ChannelSpec spec{2, 2, 2, 1.0, 1.0};
        const auto s = sample(spec, 200, 40);
        const auto sig = diag2(3.0, 5.0);
        for (const auto& d : s.draws()) CHECK(transformed_rate_per_draw(sig, d, spec) == 0.0);
        const auto e = transformed_rate(sig, s);
        CHECK(e.mean == 0.0);
        CHECK(e.std_err == 0.0);
    }
    SUBCASE("(2,3,1) agrees with secrecy_rate on an independent set") {
        const ChannelSpec spec{2, 3, 1, 4.0, 1.0};
        const auto a = sample(spec, 50000, 41);
        const auto b = sample(spec, 50000, 42);
        rng::Stream st(4, 1);
        for (int trial = 0; trial < 3; ++trial) {
            const auto sig = random_psd(2, 50.0, st);
            const auto ea = secrecy_rate(sig, a);
            const auto eb = transformed_rate(sig, b);
            CHECK(std::abs(ea.mean - eb.mean) < 3.0 * combined_std_err(ea, eb));
        }
    }
    SUBCASE("zero input") {
        const auto s = sample({2, 3, 1, 4.0, 1.0}, 50, 43);
        CHECK(transformed_rate(HermitianMatrix::zero(2), s).mean == 0.0);
    }
    SUBCASE("regime errors") {
        const auto s1 = sample({2, 1, 2, 4.0, 1.0}, 5, 1);
        CHECK_THROWS_AS(transformed_rate(HermitianMatrix::identity(2), s1), ConstraintError);
        const auto s2 = sample({2, 2, 1, 0.5, 1.0}, 5, 1);
        CHECK_THROWS_AS(transformed_rate(HermitianMatrix::identity(2), s2), ConstraintError);
    }
}

TEST_CASE("per_sample_transformed") {
    SUBCASE("unit ratio, n_r = n_e gives 0") {
        const ChannelSpec spec{2, 1, 1, 2.0, 2.0};
        const auto s = sample(spec, 20, 50);
        for (const auto& d : s.draws()) CHECK(per_sample_transformed(diag2(1.0, 2.0), d, spec) == 0.0);
    }
    SUBCASE("closed form equals the transformed difference for PD inputs") {
        const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
        const auto s = sample(spec, 200, 51);
        rng::Stream st(5, 1);
        for (const auto& d : s.draws()) {
            const auto sig = random_pd(2, 100.0, st);
            CHECK(std::abs(per_sample_transformed(sig, d, spec) - transformed_rate_per_draw(sig, d, spec)) < 1e-9);
        }
    }
    SUBCASE("scalar reduction at S = I") {
        const ChannelSpec spec{1, 1, 1, 4.0, 1.0};
        const auto s = sample(spec, 20, 52);
        for (const auto& d : s.draws()) {
            const double g2 = std::norm(d.g(0, 0));
            const double ref = std::log(1.0 + (4.0 - 1.0) * g2 / (1.0 + g2));
            CHECK(per_sample_transformed(HermitianMatrix::identity(1), d, spec) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
    SUBCASE("singular input is a domain error") {
        const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
        const auto s = sample(spec, 1, 53);
        CHECK_THROWS_AS(per_sample_transformed(diag2(1.0, 0.0), s[0], spec), DomainError);
    }
}

TEST_CASE("capacity_total") {
    SUBCASE("P = 0") {
        const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
        CHECK(capacity_total(spec, 0.0, sample(spec, 50, 1)).mean == 0.0);
    }
    SUBCASE("(4,1,1) saturates: C(40 dB) - C(30 dB) < 0.1 nats") {
        const ChannelSpec spec{4, 1, 1, 4.0, 1.0};
        const auto s = sample(spec, 100000, 60);
        const auto c40 = capacity_total(spec, 1e4, s);
        const auto c30 = capacity_total(spec, 1e3, s);
        CHECK(c40.mean - c30.mean < 0.1);
    }
    SUBCASE("(1,1,1) matches the scalar oracle") {
        const ChannelSpec spec{1, 1, 1, 4.0, 1.0};
        const auto s = sample(spec, 100000, 61);
        const auto c = capacity_total(spec, 10.0, s);
        CHECK(std::abs(c.mean - scalar_quadrature_rate(40.0, 10.0)) < 3.0 * c.std_err);
    }
    SUBCASE("errors") {
        const ChannelSpec bad{2, 1, 2, 4.0, 1.0};
        CHECK_THROWS_AS(capacity_total(bad, 1.0, sample(bad, 5, 1)), ConstraintError);
        const ChannelSpec weak{2, 2, 1, 0.5, 1.0};
        CHECK_THROWS_AS(capacity_total(weak, 1.0, sample(weak, 5, 1)), ConstraintError);
        const ChannelSpec ok{2, 2, 1, 4.0, 1.0};
        CHECK_THROWS_AS(capacity_total(ok, 1.0, sample(weak, 5, 1)), InputError);
        CHECK_THROWS_AS(capacity_total(ok, -1.0, sample(ok, 5, 1)), InputError);
    }
}

TEST_CASE("capacity_misose_per_antenna") {
    const ChannelSpec spec{2, 1, 1, 4.0, 1.0};
    const auto s = sample(spec, 100000, 70);
    const std::vector<double> zero{0.0, 0.0};
    CHECK(capacity_misose_per_antenna(spec, zero, s).mean == 0.0);

    const std::vector<double> ten{10.0, 10.0};
    const auto a = capacity_misose_per_antenna(spec, ten, s);
    const auto b = capacity_total(spec, 20.0, sample(spec, 100000, 71));
    CHECK(std::abs(a.mean - b.mean) < 3.0 * combined_std_err(a, b));

    const ChannelSpec one{1, 1, 1, 4.0, 1.0};
    const auto s1 = sample(one, 1000, 72);
    const std::vector<double> p1{7.0};
    CHECK(capacity_misose_per_antenna(one, p1, s1).mean == capacity_total(one, 7.0, s1).mean);

    const ChannelSpec wide{2, 2, 1, 4.0, 1.0};
    CHECK_THROWS_AS(capacity_misose_per_antenna(wide, ten, sample(wide, 5, 1)), ConstraintError);
    const std::vector<double> three{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(capacity_misose_per_antenna(spec, three, s), InputError);
}

TEST_CASE("misose_scalar_objective") {
    const ChannelSpec spec{3, 1, 1, 4.0, 1.0};
    const auto s = sample(spec, 50000, 80);
    rng::Stream st(8, 0);
    const auto sig = random_psd(3, 30.0, st);
    SUBCASE("beta = 0 gives 0 exactly") {
        const auto e = misose_scalar_objective(sig, 0.0, 1.0, s);
        CHECK(e.mean == 0.0);
        CHECK(e.std_err == 0.0);
    }
    SUBCASE("unitary invariance") {
        const ComplexMatrix u = random_unitary(3, st);
        const auto rotated = HermitianMatrix::congruence(u, sig);
        const auto a = misose_scalar_objective(sig, -0.75, 1.0, s);
        const auto b = misose_scalar_objective(rotated, -0.75, 1.0, s);
        CHECK(std::abs(a.mean - b.mean) < 3.0 * combined_std_err(a, b));
    }
    SUBCASE("n_t = 1 against quadrature over Exp(1)") {
        const ChannelSpec one{1, 1, 1, 4.0, 2.0};
        const auto s1 = sample(one, 100000, 81);
        const double p = 5.0, beta = -0.75, sigma = 1.0;
        const auto e = misose_scalar_objective(HermitianMatrix::identity(1) * p, beta, sigma, s1);
        // g^H S g = p sigma_g2 x with x ~ Exp(1)
        boost::math::quadrature::exp_sinh<double> q;
        const double ref = q.integrate(
            [&](double x) { return std::log(1.0 + beta / (sigma + p * 2.0 * x)) * std::exp(-x); }, 0.0,
            std::numeric_limits<double>::infinity());
        CHECK(std::abs(e.mean - ref) < 3.0 * e.std_err);
    }
    SUBCASE("transformed identity: objective = R~_s - log ratio for n_r = n_e = 1") {
        const double ratio = spec.variance_ratio();
        const auto lhs = misose_scalar_objective(sig, 1.0 / ratio - 1.0, 1.0, s);
        const auto rhs = transformed_rate(sig, s);
        CHECK(lhs.mean == doctest::Approx(rhs.mean - std::log(ratio)).epsilon(1e-12));
    }
    SUBCASE("parameter domain") {
        CHECK_THROWS_AS(misose_scalar_objective(sig, 0.5, 1.0, s), InputError);
        CHECK_THROWS_AS(misose_scalar_objective(sig, -0.5, 0.0, s), InputError);
        CHECK_THROWS_AS(misose_scalar_objective(sig, -2.5, 1.0, s), InputError);
        const auto wide = sample({3, 2, 2, 4.0, 1.0}, 5, 1);
        CHECK_THROWS_AS(misose_scalar_objective(sig, -0.5, 1.0, wide), InputError);
    }
}

TEST_CASE("capacity_wishart_form") {
    const ChannelSpec spec{4, 2, 2, 4.0, 1.0};
    const std::size_t n = 100000;
    const auto eh = wishart_eigen_samples(4, 2, n, 90);
    const auto eg = wishart_eigen_samples(4, 2, n, 91);
    CHECK(capacity_wishart_form(spec, 0.0, eh, eg).mean == 0.0);

    const auto a = capacity_wishart_form(spec, 100.0, eh, eg);
    const auto b = capacity_total(spec, 100.0, sample(spec, n, 92));
    CHECK(std::abs(a.mean - b.mean) < 3.0 * combined_std_err(a, b));

    const ChannelSpec sym{4, 2, 2, 1.0, 1.0};
    CHECK(std::abs(capacity_wishart_form(sym, 50.0, eh, eh).mean) < 1e-15);

    const auto wrong = wishart_eigen_samples(4, 3, 10, 1);
    CHECK_THROWS_AS(capacity_wishart_form(spec, 1.0, wrong, wrong), InputError);
    CHECK_THROWS_AS(capacity_wishart_form({4, 1, 2, 4.0, 1.0}, 1.0, eh, eg), ConstraintError);
}

TEST_CASE("zero_capacity") {
    CHECK(zero_capacity({2, 1, 2, 1.0, 4.0}));
    CHECK_FALSE(zero_capacity({2, 2, 1, 4.0, 1.0}));
    CHECK(zero_capacity({1, 1, 1, 2.0, 2.0}));
    CHECK_FALSE(zero_capacity({1, 1, 1, 2.0, 1.0}));
    CHECK_FALSE(zero_capacity({1, 2, 1, 1.0, 1.0}));
}

TEST_CASE("snr_slope") {
    std::vector<CapacityPoint> line;
    for (double pg : {10.0, 100.0, 1000.0, 1e4}) line.push_back({pg, 2.0 * std::log(pg) + 1.0});
    const auto fit = fit_snr_line(line);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(snr_slope(line) == doctest::Approx(2.0).epsilon(1e-12));

    const std::vector<CapacityPoint> one{{10.0, 1.0}};
    CHECK_THROWS_AS(snr_slope(one), InputError);
    const std::vector<CapacityPoint> same{{10.0, 1.0}, {10.0, 2.0}};
    CHECK_THROWS_AS(snr_slope(same), InputError);
    const std::vector<CapacityPoint> bad{{0.0, 1.0}, {10.0, 2.0}};
    CHECK_THROWS_AS(snr_slope(bad), InputError);
}

TEST_CASE("rate properties on one SampleSet") {
    const ChannelSpec spec{3, 2, 1, 4.0, 1.0};
    const auto s = sample(spec, 20000, 100);
    const auto budget = PowerBudget::total(30.0);
    CHECK(check_monotonicity(s, budget, {40, 1}).pass);
    CHECK(check_positivity(s, budget, {5, 2}).pass);
    CHECK(check_schur_optimality(s, 30.0, {40, 3}).pass);
    CHECK(check_alpha_monotonicity(s, 30.0, 11).pass);
    CHECK(check_per_sample_concavity(s, budget, {200, 4}).pass);
}
