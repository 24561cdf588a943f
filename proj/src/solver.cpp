#include "mimome/solver.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "mimome/csv.hpp"

namespace mimome {

void SolverConfig::validate() const {
    if (!(epsilon > 0.0)) throw InputError("SolverConfig: epsilon must be > 0");
    if (!(t0 > 0.0)) throw InputError("SolverConfig: t0 must be > 0");
    if (!(gamma > 1.0)) throw InputError("SolverConfig: gamma must be > 1");
    if (!(ls_alpha > 0.0 && ls_alpha < 0.5)) throw InputError("SolverConfig: ls_alpha must be in (0, 0.5)");
    if (!(ls_beta > 0.0 && ls_beta < 1.0)) throw InputError("SolverConfig: ls_beta must be in (0, 1)");
    if (max_newton_iters < 1) throw InputError("SolverConfig: max_newton_iters must be >= 1");
    if (!(inner_residual_tol > 0.0)) throw InputError("SolverConfig: inner_residual_tol must be > 0");
    if (!(pd_margin >= 0.0)) throw InputError("SolverConfig: pd_margin must be >= 0");
}

std::size_t hermitian_param_count(std::size_t n) noexcept { return n * n; }

RealVector to_params(const HermitianMatrix& s) {
    const std::size_t n = s.dim();
    RealVector theta(hermitian_param_count(n));
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) theta(r++) = s(i, i).real();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            theta(r++) = s(i, j).real();
            theta(r++) = s(i, j).imag();
        }
    return theta;
}

HermitianMatrix from_params(const RealVector& theta, std::size_t n) {
    if (static_cast<std::size_t>(theta.size()) != hermitian_param_count(n))
        throw InputError("from_params: parameter count does not match dimension");
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) m(i, i) = theta(r++);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex z(theta(r), theta(r + 1));
            r += 2;
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    return HermitianMatrix(m);
}

ComplexMatrix param_to_vec_map(std::size_t n) {
    const std::size_t d = hermitian_param_count(n);
    ComplexMatrix t = ComplexMatrix::Zero(d, d);
    const Complex i_unit(0.0, 1.0);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) t(i + i * n, r++) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            t(i + j * n, r) = 1.0;
            t(j + i * n, r) = 1.0;
            t(i + j * n, r + 1) = i_unit;
            t(j + i * n, r + 1) = -i_unit;
            r += 2;
        }
    return t;
}

RealMatrix vec_diagonal_selector(std::size_t n) {
    RealMatrix a = RealMatrix::Zero(n, n * n);
    for (std::size_t i = 0; i < n; ++i) a(i, i + i * n) = 1.0;
    return a;
}

RealMatrix param_diagonal_selector(std::size_t n) {
    RealMatrix a = RealMatrix::Zero(n, hermitian_param_count(n));
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
}

namespace {

void check_barrier_inputs(const HermitianMatrix& sigma, double t, const SampleSet& samples,
                          const char* what) {
    const auto& spec = samples.spec();
    require_degraded_regime(spec, what);
    if (sigma.dim() != spec.n_t) throw InputError(std::string(what) + ": covariance dimension mismatch");
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError(std::string(what) + ": t must be finite and > 0");
    if (!sigma.is_pd()) throw DomainError(std::string(what) + ": covariance is not positive definite");
    if (samples.size() == 0) throw InputError(std::string(what) + ": empty SampleSet");
}

ComplexMatrix inverse_ipa(const ComplexMatrix& b, const HermitianMatrix& s) {
    // (I + B S B^H)^-1
    return HermitianMatrix::congruence(b, s).operator+(HermitianMatrix::identity(b.rows())).inverse().matrix();
}

// (B^H (x) B^T) vec(((I + B S B^H)^-1)^T)
ComplexVector term_gradient(const ComplexMatrix& b, const HermitianMatrix& s) {
    const ComplexMatrix x_inv = inverse_ipa(b, s);
    return kron(b.adjoint(), b.transpose()) * vec(x_inv.transpose());
}

// -(B^H (x) B^T) ((I + B S B^H) (x) (I + B S B^H)^T)^-1 K (conj(B) (x) B)
ComplexMatrix term_hessian(const ComplexMatrix& b, const HermitianMatrix& s, const ComplexMatrix& k) {
    const ComplexMatrix x_inv = inverse_ipa(b, s);
    return -(kron(b.adjoint(), b.transpose()) * kron(x_inv, x_inv.transpose()) * k *
             kron(b.conjugate(), b));
}

}  // namespace

double saa_transformed_rate(const HermitianMatrix& sigma, const SampleSet& samples) {
    const auto& spec = samples.spec();
    double acc = 0.0;
    for (const auto& d : samples.draws()) acc += transformed_rate_per_draw(sigma, d, spec);
    return acc / static_cast<double>(samples.size());
}

double barrier_objective(const HermitianMatrix& sigma, double t, const SampleSet& samples) {
    check_barrier_inputs(sigma, t, samples, "barrier_objective");
    return saa_transformed_rate(sigma, samples) + logdet(sigma) / t;
}

ComplexVector vec_gradient(const HermitianMatrix& sigma, double t, const SampleSet& samples) {
    check_barrier_inputs(sigma, t, samples, "gradient");
    const auto& spec = samples.spec();
    const std::size_t n = spec.n_t;
    ComplexVector acc = ComplexVector::Zero(n * n);
    for (const auto& d : samples.draws())
        acc += term_gradient(same_marginal_h(d, spec), sigma) - term_gradient(d.g, sigma);
    acc /= static_cast<double>(samples.size());
    acc += vec(sigma.inverse().matrix().transpose()) / t;
    return acc;
}

ComplexMatrix vec_hessian(const HermitianMatrix& sigma, double t, const SampleSet& samples) {
    check_barrier_inputs(sigma, t, samples, "hessian");
    const auto& spec = samples.spec();
    const std::size_t n = spec.n_t;
    const ComplexMatrix k_r = commutation_matrix(spec.n_r, spec.n_r);
    const ComplexMatrix k_e = commutation_matrix(spec.n_e, spec.n_e);
    ComplexMatrix acc = ComplexMatrix::Zero(n * n, n * n);
    for (const auto& d : samples.draws())
        acc += term_hessian(same_marginal_h(d, spec), sigma, k_r) - term_hessian(d.g, sigma, k_e);
    acc /= static_cast<double>(samples.size());
    const ComplexMatrix s_inv = sigma.inverse().matrix();
    acc -= kron(s_inv, s_inv.transpose()) * commutation_matrix(n, n) / t;
    return acc;
}

RealVector gradient(const HermitianMatrix& sigma, double t, const SampleSet& samples) {
    const ComplexMatrix tmap = param_to_vec_map(sigma.dim());
    return (tmap.transpose() * vec_gradient(sigma, t, samples)).real();
}

RealMatrix hessian(const HermitianMatrix& sigma, double t, const SampleSet& samples) {
    const ComplexMatrix tmap = param_to_vec_map(sigma.dim());
    const RealMatrix h = (tmap.transpose() * vec_hessian(sigma, t, samples) * tmap).real();
    return 0.5 * (h + h.transpose());
}

namespace {

struct Residual {
    RealVector r;
    double norm = 0.0;
};

Residual residual_at(const RealVector& theta, const RealVector& nu, double t, std::span<const double> p,
                     const RealMatrix& a, const SampleSet& samples) {
    const std::size_t n = samples.spec().n_t;
    const HermitianMatrix s = from_params(theta, n);
    const RealVector g = gradient(s, t, samples);
    Residual out;
    out.r.resize(g.size() + static_cast<Eigen::Index>(n));
    out.r.head(g.size()) = g + a.transpose() * nu;
    for (std::size_t i = 0; i < n; ++i)
        out.r(g.size() + static_cast<Eigen::Index>(i)) = theta(static_cast<Eigen::Index>(i)) - p[i];
    out.norm = out.r.norm();
    return out;
}

NewtonState make_state(const RealVector& theta, const RealVector& nu, double t, double rnorm, std::size_t n) {
    NewtonState st;
    st.sigma = from_params(theta, n);
    st.nu = nu;
    st.t = t;
    st.residual_norm = rnorm;
    st.gap = static_cast<double>(n) / t;
    return st;
}

}  // namespace

OptimizeResult optimize(const ChannelSpec& spec, std::span<const double> p, const SampleSet& samples,
                        const SolverConfig& config) {
    config.validate();
    if (!(samples.spec() == spec)) throw InputError("optimize: spec does not match SampleSet");
    require_degraded_regime(spec, "optimize");
    const std::size_t n = spec.n_t;
    if (p.size() != n) throw InputError("optimize: need one power limit per transmit antenna");
    for (double v : p)
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError("optimize: per-antenna powers must be > 0");

    const RealMatrix a = param_diagonal_selector(n);
    RealVector d(n);
    for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i)) = p[i];
    RealVector theta = to_params(HermitianMatrix::diagonal(d));
    RealVector nu = RealVector::Zero(static_cast<Eigen::Index>(n));
    double t = config.t0;
    const Eigen::Index np = theta.size();

    OptimizeResult result;
    Residual res = residual_at(theta, nu, t, p, a, samples);
    constexpr double kMinStep = 1e-14;

    while (true) {
        if (res.norm < config.inner_residual_tol) {
            result.stage_objectives.push_back(saa_transformed_rate(from_params(theta, n), samples));
            if (static_cast<double>(n) / t < config.epsilon) break;
            t *= config.gamma;
            res = residual_at(theta, nu, t, p, a, samples);
            continue;
        }
        if (result.newton_steps >= config.max_newton_iters) {
            throw NonConvergenceError("optimize: Newton iteration cap of " +
                                          std::to_string(config.max_newton_iters) + " exceeded",
                                      make_state(theta, nu, t, res.norm, n));
        }

        const HermitianMatrix s = from_params(theta, n);
        const RealVector step = solve_kkt(hessian(s, t, samples), a, res.r);
        const RealVector dtheta = step.head(np);
        const RealVector dnu = step.tail(static_cast<Eigen::Index>(n));

        double sz = 1.0;
        while (!from_params(theta + sz * dtheta, n).is_pd(config.pd_margin)) {
            sz *= config.ls_beta;
            if (sz < kMinStep) {
                std::ostringstream msg;
                msg << "optimize: no positive definite step along the Newton direction (t = " << t
                    << ", ||r|| = " << res.norm << ", ||dtheta|| = " << dtheta.norm() << ")";
                throw SolverError(msg.str());
            }
        }
        Residual trial = residual_at(theta + sz * dtheta, nu + sz * dnu, t, p, a, samples);
        while (!(trial.norm <= (1.0 - config.ls_alpha * sz) * res.norm)) {
            sz *= config.ls_beta;
            if (sz < kMinStep) {
                std::ostringstream msg;
                msg << "optimize: backtracking failed to reduce the residual (t = " << t
                    << ", ||r|| = " << res.norm << ", last trial ||r|| = " << trial.norm << ")";
                throw SolverError(msg.str());
            }
            trial = residual_at(theta + sz * dtheta, nu + sz * dnu, t, p, a, samples);
        }

        theta += sz * dtheta;
        nu += sz * dnu;
        res = std::move(trial);
        ++result.newton_steps;
        result.trace.push_back({result.newton_steps, t, res.norm,
                                saa_transformed_rate(from_params(theta, n), samples), sz});
    }

    result.state = make_state(theta, nu, t, res.norm, n);
    result.objective = result.stage_objectives.back();
    result.rate = secrecy_rate(result.state.sigma, samples);
    return result;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRecord> trace) {
    os << "iter,t,residual,objective,step\n";
    write_trace_rows(os, trace);
}

void write_trace_rows(std::ostream& os, std::span<const TraceRecord> trace) {
    for (const auto& r : trace) {
        os << r.iter << ',' << format_double(r.t) << ',' << format_double(r.residual) << ','
           << format_double(r.objective) << ',' << format_double(r.step) << '\n';
    }
}

}  // namespace mimome
