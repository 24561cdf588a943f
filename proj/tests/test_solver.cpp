#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "mimome/errors.hpp"
#include "mimome/oracle.hpp"
#include "mimome/solver.hpp"

using namespace mimome;

namespace {

double max_rel_err(const RealVector& a, const RealVector& ref, double floor) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k)
        worst = std::max(worst, std::abs(a(k) - ref(k)) / std::max(std::abs(ref(k)), floor));
    return worst;
}

// E_k = dS / d theta_k, built directly from the parameter ordering.
std::vector<ComplexMatrix> basis(std::size_t n) {
    std::vector<ComplexMatrix> out;
    for (std::size_t i = 0; i < n; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(i, i) = 1.0;
        out.push_back(e);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            ComplexMatrix re = ComplexMatrix::Zero(n, n), im = ComplexMatrix::Zero(n, n);
            re(i, j) = re(j, i) = 1.0;
            im(i, j) = Complex(0.0, 1.0);
            im(j, i) = Complex(0.0, -1.0);
            out.push_back(re);
            out.push_back(im);
        }
    return out;
}

// Trace-form derivatives of log|I + B S B^H|: g_k = tr(W E_k), H_kl = -tr(W E_k W E_l),
// W = B^H (I + B S B^H)^-1 B. Independent of the Kronecker route.
void trace_terms(const ComplexMatrix& b, const HermitianMatrix& s, double sign, RealVector& g, RealMatrix& h) {
    const auto e = basis(s.dim());
    const ComplexMatrix x = ComplexMatrix::Identity(b.rows(), b.rows()) + b * s.matrix() * b.adjoint();
    const ComplexMatrix w = b.adjoint() * x.inverse() * b;
    for (std::size_t k = 0; k < e.size(); ++k) {
        g(k) += sign * (w * e[k]).trace().real();
        for (std::size_t l = 0; l < e.size(); ++l) h(k, l) -= sign * (w * e[k] * w * e[l]).trace().real();
    }
}

void trace_route(const HermitianMatrix& s, double t, const SampleSet& samples, RealVector& g, RealMatrix& h) {
    const auto& spec = samples.spec();
    const std::size_t d = s.dim() * s.dim();
    g = RealVector::Zero(d);
    h = RealMatrix::Zero(d, d);
    for (const auto& draw : samples.draws()) {
        trace_terms(same_marginal_h(draw, spec), s, 1.0, g, h);
        trace_terms(draw.g, s, -1.0, g, h);
    }
    g /= static_cast<double>(samples.size());
    h /= static_cast<double>(samples.size());
    // barrier (1/t) log|S| = log|I + S^{1/2}...| handled directly
    const auto e = basis(s.dim());
    const ComplexMatrix si = s.inverse().matrix();
    for (std::size_t k = 0; k < e.size(); ++k) {
        g(k) += (si * e[k]).trace().real() / t;
        for (std::size_t l = 0; l < e.size(); ++l) h(k, l) -= (si * e[k] * si * e[l]).trace().real() / t;
    }
}

}  // namespace

TEST_CASE("Hermitian parametrization") {
    rng::Stream st(1, 1);
    for (std::size_t n : {1u, 2u, 3u, 4u}) {
        const auto s = random_pd(n, 10.0, st);
        const RealVector theta = to_params(s);
        CHECK(static_cast<std::size_t>(theta.size()) == hermitian_param_count(n));
        CHECK((from_params(theta, n).matrix() - s.matrix()).cwiseAbs().maxCoeff() == 0.0);
        const ComplexMatrix tmap = param_to_vec_map(n);
        CHECK((tmap * theta.cast<Complex>() - vec(s.matrix())).cwiseAbs().maxCoeff() == 0.0);
        const RealVector diag = param_diagonal_selector(n) * theta;
        const ComplexVector diag_vec = vec_diagonal_selector(n).cast<Complex>() * vec(s.matrix());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(diag(i) == s(i, i).real());
            CHECK(diag_vec(i) == s(i, i));
        }
    }
    CHECK_THROWS_AS(from_params(RealVector::Zero(3), 2), InputError);
}

TEST_CASE("barrier_objective") {
    const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
    const auto samples = sample(spec, 500, 3);
    rng::Stream st(2, 1);
    SUBCASE("large t recovers the transformed rate") {
        const auto s = random_pd(2, 20.0, st);
        const double ft = barrier_objective(s, 1e9, samples);
        const double r = saa_transformed_rate(s, samples);
        CHECK(std::abs(ft - r) < 1e-8 * std::abs(logdet(s)) + 1e-9);
    }
    SUBCASE("S = I has zero barrier term") {
        const auto i2 = HermitianMatrix::identity(2);
        CHECK(barrier_objective(i2, 1.0, samples) == saa_transformed_rate(i2, samples));
    }
    SUBCASE("n_t = 1 against the scalar oracle") {
        const ChannelSpec one{1, 1, 1, 4.0, 1.0};
        const auto s1 = sample(one, 100000, 4);
        const double p = 10.0, t = 2.0;
        const auto est = transformed_rate(HermitianMatrix::identity(1) * p, s1);
        const double f = barrier_objective(HermitianMatrix::identity(1) * p, t, s1);
        CHECK(std::abs(f - (scalar_quadrature_rate(40.0, 10.0) + std::log(p) / t)) < 3.0 * est.std_err);
    }
    SUBCASE("PD required") {
        RealVector d(2);
        d << 1.0, 0.0;
        CHECK_THROWS_AS(barrier_objective(HermitianMatrix::diagonal(d), 1.0, samples), DomainError);
        CHECK_THROWS_AS(gradient(HermitianMatrix::diagonal(d), 1.0, samples), DomainError);
        CHECK_THROWS_AS(hessian(HermitianMatrix::diagonal(d), 1.0, samples), DomainError);
    }
}

TEST_CASE("gradient and Hessian, n_t = 1 scalar calculus") {
    const ChannelSpec spec{1, 1, 1, 4.0, 1.0};
    const auto samples = sample(spec, 2000, 5);
    const double p = 3.0, t = 7.0;
    double g_ref = 1.0 / (t * p), h_ref = -1.0 / (t * p * p);
    double g_acc = 0.0, h_acc = 0.0;
    for (const auto& d : samples.draws()) {
        const double a = spec.variance_ratio() * std::norm(d.g(0, 0));
        const double b = std::norm(d.g(0, 0));
        g_acc += a / (1.0 + p * a) - b / (1.0 + p * b);
        h_acc += -a * a / ((1.0 + p * a) * (1.0 + p * a)) + b * b / ((1.0 + p * b) * (1.0 + p * b));
    }
    g_ref += g_acc / static_cast<double>(samples.size());
    h_ref += h_acc / static_cast<double>(samples.size());
    const auto s = HermitianMatrix::identity(1) * p;
    CHECK(std::abs(gradient(s, t, samples)(0) - g_ref) < 1e-10 * std::abs(g_ref));
    CHECK(std::abs(hessian(s, t, samples)(0, 0) - h_ref) < 1e-8 * std::abs(h_ref));
}

TEST_CASE("gradient and Hessian against the trace-form derivatives") {
    for (auto spec : {ChannelSpec{2, 2, 1, 4.0, 1.0}, ChannelSpec{3, 3, 2, 2.0, 0.5}, ChannelSpec{3, 1, 1, 4.0, 1.0}}) {
        const auto samples = sample(spec, 50, 6);
        rng::Stream st(6, spec.n_t);
        const auto s = random_pd(spec.n_t, 30.0, st);
        RealVector g;
        RealMatrix h;
        trace_route(s, 3.0, samples, g, h);
        const RealVector gk = gradient(s, 3.0, samples);
        const RealMatrix hk = hessian(s, 3.0, samples);
        CHECK((gk - g).cwiseAbs().maxCoeff() < 1e-11 * std::max(1.0, g.cwiseAbs().maxCoeff()));
        CHECK((hk - h).cwiseAbs().maxCoeff() < 1e-11 * std::max(1.0, h.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("gradient and Hessian against finite differences") {
    const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
    const auto samples = sample(spec, 200, 7);
    rng::Stream st(7, 1);
    const double t = 2.0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_pd(2, 20.0, st);
        const RealVector fd = finite_diff_gradient([&](const HermitianMatrix& x) { return barrier_objective(x, t, samples); },
                                                   s, 1e-5);
        CHECK(max_rel_err(gradient(s, t, samples), fd, 1e-6) < 1e-5);
        const RealMatrix fdh = finite_diff_jacobian([&](const HermitianMatrix& x) { return gradient(x, t, samples); },
                                                    s, 1e-4);
        const RealMatrix h = hessian(s, t, samples);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j)
                worst = std::max(worst, std::abs(h(i, j) - fdh(i, j)) / std::max(std::abs(fdh(i, j)), 1e-6));
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("Hessian is negative definite") {
    for (std::size_t n : {2u, 3u}) {
        const ChannelSpec spec{n, n, 1, 4.0, 1.0};
        const auto samples = sample(spec, 100, 8);
        rng::Stream st(8, n);
        for (int trial = 0; trial < 50; ++trial) {
            const auto s = random_pd(n, 50.0, st);
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(hessian(s, 1.0, samples));
            CHECK(es.eigenvalues().maxCoeff() < 0.0);
        }
    }
}

TEST_CASE("stationarity at the zoomed grid maximizer") {
    // With the diagonal fixed, the maximizer over the off-diagonal entry is
    // interior, so the off-diagonal gradient entries must vanish there.
    const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
    const auto samples = sample(spec, 500, 9);
    const double t = 10.0;
    auto f = [&](const HermitianMatrix& s) { return barrier_objective(s, t, samples); };
    GridSpec grid = GridSpec::fixed_diagonal(5.0, 5.0, 41);
    grid.half_width = 0.9 * 5.0;  // stay away from the singular boundary
    const auto best = zoom_search(f, grid, 12);
    const RealVector g = gradient(best.sigma, t, samples);
    CHECK(g.tail(2).norm() < 1e-4);
}

TEST_CASE("optimize: trivial single antenna") {
    const ChannelSpec spec{1, 1, 1, 4.0, 1.0};
    const auto samples = sample(spec, 1000, 10);
    const std::vector<double> p{7.0};
    const auto res = optimize(spec, p, samples);
    CHECK(res.state.sigma(0, 0).real() == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(res.state.gap < 1e-4);
    CHECK(res.rate.mean == secrecy_rate(HermitianMatrix::identity(1) * 7.0, samples).mean);
}

TEST_CASE("optimize: invariants on (2,2,1)") {
    const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
    const auto samples = sample(spec, 2000, 11);
    const std::vector<double> p{30.0, 70.0};
    const SolverConfig cfg{};
    const auto res = optimize(spec, p, samples, cfg);

    CHECK(res.state.gap == doctest::Approx(2.0 / res.state.t).epsilon(1e-15));
    CHECK(res.state.gap < cfg.epsilon);
    CHECK(res.state.residual_norm < cfg.inner_residual_tol);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(res.state.sigma(i, i).real() - p[i]) < 1e-8);
    CHECK(res.state.sigma.is_psd());
    CHECK((res.state.sigma.matrix() - res.state.sigma.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(res.objective == saa_transformed_rate(res.state.sigma, samples));

    for (std::size_t k = 1; k < res.stage_objectives.size(); ++k)
        CHECK(res.stage_objectives[k] >= res.stage_objectives[k - 1] - 1e-9);

    // residual strictly decreases within one barrier stage
    for (std::size_t k = 1; k < res.trace.size(); ++k)
        if (res.trace[k].t == res.trace[k - 1].t) CHECK(res.trace[k].residual < res.trace[k - 1].residual);

    // deterministic re-run
    const auto again = optimize(spec, p, samples, cfg);
    REQUIRE(again.trace.size() == res.trace.size());
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
        CHECK(again.trace[k].residual == res.trace[k].residual);
        CHECK(again.trace[k].objective == res.trace[k].objective);
    }
    CHECK((again.state.sigma.matrix() - res.state.sigma.matrix()).cwiseAbs().maxCoeff() == 0.0);

    std::ostringstream csv;
    write_trace_csv(csv, res.trace);
    CHECK(csv.str().rfind("iter,t,residual,objective,step\n", 0) == 0);
}

TEST_CASE("optimize: diagonal optimum for (2,1,1)") {
    const ChannelSpec spec{2, 1, 1, 4.0, 1.0};
    const auto samples = sample(spec, 10000, 12);
    const std::vector<double> p{5.0, 5.0};
    const auto res = optimize(spec, p, samples);
    CHECK(std::abs(res.state.sigma(0, 1)) <= 0.05 * 5.0);
}

TEST_CASE("optimize: errors") {
    const ChannelSpec spec{2, 2, 1, 4.0, 1.0};
    const auto samples = sample(spec, 200, 13);
    const std::vector<double> p{10.0, 10.0};
    CHECK_THROWS_AS(optimize(spec, std::vector<double>{10.0}, samples), InputError);
    CHECK_THROWS_AS(optimize(spec, std::vector<double>{10.0, 0.0}, samples), InputError);
    const ChannelSpec bad{2, 1, 2, 4.0, 1.0};
    CHECK_THROWS_AS(optimize(bad, p, sample(bad, 10, 1)), ConstraintError);
    const ChannelSpec weak{2, 2, 1, 0.5, 1.0};
    CHECK_THROWS_AS(optimize(weak, p, sample(weak, 10, 1)), ConstraintError);

    SolverConfig cfg;
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(optimize(spec, p, samples, cfg), InputError);
    cfg = {};
    cfg.ls_alpha = 0.5;
    CHECK_THROWS_AS(optimize(spec, p, samples, cfg), InputError);

    cfg = {};
    cfg.max_newton_iters = 1;
    try {
        (void)optimize(spec, p, samples, cfg);
        FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK(e.last_state().sigma.dim() == 2);
        CHECK(e.last_state().gap == doctest::Approx(2.0 / e.last_state().t));
    }
}
