#include "mimome/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "mimome/csv.hpp"
#include "mimome/errors.hpp"
#include "mimome/solver.hpp"

namespace mimome {

// --- Grid search ---------------------------------------------------------

GridSpec GridSpec::trace_simplex(std::size_t n_t, double p, std::size_t resolution) {
    GridSpec g;
    g.parametrization = GridParametrization::diag_trace_simplex;
    g.n_t = n_t;
    g.resolution = resolution;
    g.power = {p};
    return g;
}

GridSpec GridSpec::fixed_diagonal(double p1, double p2, std::size_t resolution) {
    GridSpec g;
    g.parametrization = GridParametrization::fixed_diag_offdiag;
    g.n_t = 2;
    g.resolution = resolution;
    g.power = {p1, p2};
    return g;
}

void GridSpec::validate() const {
    if (resolution < 1) throw InputError("GridSpec: resolution must be >= 1");
    for (double v : power)
        if (!std::isfinite(v) || v < 0.0) throw InputError("GridSpec: powers must be finite and >= 0");
    if (parametrization == GridParametrization::diag_trace_simplex) {
        if (n_t < 1) throw InputError("GridSpec: n_t must be >= 1");
        if (power.size() != 1) throw InputError("GridSpec: trace simplex takes one total power");
    } else {
        if (n_t != 2) throw InputError("GridSpec: fixed_diag_offdiag is defined for n_t = 2 only");
        if (power.size() != 2) throw InputError("GridSpec: fixed_diag_offdiag takes (P_1, P_2)");
        if (!std::isfinite(center.real()) || !std::isfinite(center.imag()) || !std::isfinite(half_width))
            throw InputError("GridSpec: window must be finite");
    }
}

namespace {

double disk_radius(const GridSpec& g) { return std::sqrt(g.power[0] * g.power[1]); }

double window_half_width(const GridSpec& g) { return g.half_width > 0.0 ? g.half_width : disk_radius(g); }

// Offset of lattice point i of m + 1 along [-1, 1]. Written as a ratio of
// integers so that nested grids (m -> 2m) reproduce the same doubles.
double lattice(std::size_t i, std::size_t m) {
    if (m == 0) return 0.0;
    return (2.0 * static_cast<double>(i) - static_cast<double>(m)) / static_cast<double>(m);
}

void simplex_points(std::size_t n_t, std::size_t m, double p, std::vector<std::size_t>& k, std::size_t pos,
                    std::size_t used, std::vector<HermitianMatrix>& out) {
    if (pos + 1 == n_t) {
        RealVector d(static_cast<Eigen::Index>(n_t));
        for (std::size_t i = 0; i + 1 < n_t; ++i)
            d(static_cast<Eigen::Index>(i)) = p * static_cast<double>(k[i]) / static_cast<double>(m);
        d(static_cast<Eigen::Index>(n_t - 1)) = p * static_cast<double>(m - used) / static_cast<double>(m);
        out.push_back(HermitianMatrix::diagonal(d));
        return;
    }
    for (std::size_t v = 0; v + used <= m; ++v) {
        k[pos] = v;
        simplex_points(n_t, m, p, k, pos + 1, used + v, out);
    }
}

}  // namespace

double GridSpec::cell_size() const {
    validate();
    const std::size_t m = resolution - 1;
    if (m == 0) return 0.0;
    if (parametrization == GridParametrization::diag_trace_simplex)
        return power[0] / static_cast<double>(m);
    return 2.0 * window_half_width(*this) / static_cast<double>(m);
}

std::vector<HermitianMatrix> GridSpec::points() const {
    validate();
    std::vector<HermitianMatrix> out;
    const std::size_t m = resolution - 1;
    if (parametrization == GridParametrization::diag_trace_simplex) {
        if (m == 0) {
            out.push_back(HermitianMatrix::identity(n_t) * (power[0] / static_cast<double>(n_t)));
            return out;
        }
        std::vector<std::size_t> k(n_t, 0);
        simplex_points(n_t, m, power[0], k, 0, 0, out);
        return out;
    }
    const double r_clip = disk_radius(*this) * (1.0 - 1e-9);
    const double w = window_half_width(*this);
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= m; ++j) {
            const Complex rho(center.real() + w * lattice(i, m), center.imag() + w * lattice(j, m));
            if (std::abs(rho) > r_clip) continue;
            ComplexMatrix s(2, 2);
            s << power[0], rho, std::conj(rho), power[1];
            out.emplace_back(s);
        }
    }
    return out;
}

GridResult grid_search(const CovarianceFunctional& objective, const GridSpec& grid) {
    const auto pts = grid.points();
    if (pts.empty()) throw InputError("grid_search: grid has no feasible points");
    GridResult best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = objective(pts[i]);
        if (v > best.value || i == 0) {
            best.value = v;
            best.index = i;
        }
    }
    best.sigma = pts[best.index];
    best.evaluated = pts.size();
    return best;
}

GridResult grid_search(const GridSpec& grid, const SampleSet& samples) {
    return grid_search([&](const HermitianMatrix& s) { return transformed_rate(s, samples).mean; }, grid);
}

GridResult zoom_search(const CovarianceFunctional& objective, GridSpec grid, std::size_t levels) {
    if (grid.parametrization != GridParametrization::fixed_diag_offdiag)
        throw InputError("zoom_search: requires the fixed_diag_offdiag parametrization");
    if (grid.resolution < 3) throw InputError("zoom_search: resolution must be >= 3");
    GridResult best = grid_search(objective, grid);
    std::size_t evaluated = best.evaluated;
    for (std::size_t level = 1; level < levels; ++level) {
        grid.center = best.sigma(0, 1);
        grid.half_width = 2.0 * grid.cell_size();
        GridResult next = grid_search(objective, grid);
        evaluated += next.evaluated;
        if (next.value > best.value) best = next;
    }
    best.evaluated = evaluated;
    return best;
}

// --- Scalar quadrature ---------------------------------------------------

namespace {

constexpr double kEulerGamma = std::numbers::egamma;

// e^x E1(x) by the modified Lentz continued fraction, for x >= 1.
double scaled_e1_cf(double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    return h;
}

// E1(x) by its power series, for 0 < x < 1.
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;  // (-x)^k / k!
    for (int k = 1; k < 200; ++k) {
        term *= -x / static_cast<double>(k);
        const double add = term / static_cast<double>(k);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
}

void check_gain(double a, const char* what) {
    if (!std::isfinite(a) || a < 0.0) throw InputError(std::string(what) + ": gain must be finite and >= 0");
}

}  // namespace

double expint_e1(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InputError("expint_e1: argument must be finite and > 0");
    if (x < 1.0) return e1_series(x);
    return scaled_e1_cf(x) * std::exp(-x);
}

double expected_log1p_exp_closed(double a) {
    check_gain(a, "expected_log1p_exp_closed");
    if (a == 0.0) return 0.0;
    const double x = 1.0 / a;
    if (x < 1.0) return std::exp(x) * e1_series(x);
    return scaled_e1_cf(x);
}

double expected_log1p_exp_quadrature(double a, double tolerance) {
    check_gain(a, "expected_log1p_exp_quadrature");
    return scalar_quadrature_rate(a, 0.0, tolerance);
}

double scalar_quadrature_rate(double a_h, double a_g, double tolerance) {
    check_gain(a_h, "scalar_quadrature_rate");
    check_gain(a_g, "scalar_quadrature_rate");
    if (!(tolerance > 0.0)) throw InputError("scalar_quadrature_rate: tolerance must be > 0");
    if (a_h == a_g) return 0.0;
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double x) { return (std::log1p(a_h * x) - std::log1p(a_g * x)) * std::exp(-x); };
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), tolerance);
}

double scalar_closed_form_rate(double a_h, double a_g) {
    return expected_log1p_exp_closed(a_h) - expected_log1p_exp_closed(a_g);
}

// --- Finite differences --------------------------------------------------

namespace {

void check_fd_margin(const HermitianMatrix& sigma, double step, const char* what) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InputError(std::string(what) + ": step must be > 0");
    if (!(sigma.min_eigenvalue() > step))
        throw DomainError(std::string(what) + ": covariance PD margin does not exceed the step");
}

}  // namespace

RealVector finite_diff_gradient(const CovarianceFunctional& f, const HermitianMatrix& sigma, double step) {
    check_fd_margin(sigma, step, "finite_diff_gradient");
    const std::size_t n = sigma.dim();
    const RealVector theta = to_params(sigma);
    RealVector g(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        RealVector up = theta, dn = theta;
        up(k) += step;
        dn(k) -= step;
        g(k) = (f(from_params(up, n)) - f(from_params(dn, n))) / (2.0 * step);
    }
    return g;
}

RealMatrix finite_diff_jacobian(const GradientFunctional& grad, const HermitianMatrix& sigma, double step) {
    check_fd_margin(sigma, step, "finite_diff_jacobian");
    const std::size_t n = sigma.dim();
    const RealVector theta = to_params(sigma);
    RealMatrix j(theta.size(), theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        RealVector up = theta, dn = theta;
        up(k) += step;
        dn(k) -= step;
        j.col(k) = (grad(from_params(up, n)) - grad(from_params(dn, n))) / (2.0 * step);
    }
    return j;
}

// --- Random covariances --------------------------------------------------

ComplexMatrix random_unitary(std::size_t n, rng::Stream& stream) {
    ComplexMatrix z(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double re = stream.normal();
            const double im = stream.normal();
            z(i, j) = Complex(re, im) * std::sqrt(0.5);
        }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (std::size_t j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

HermitianMatrix random_psd(std::size_t n, double trace, rng::Stream& stream) {
    if (n < 1 || !std::isfinite(trace) || trace < 0.0) throw InputError("random_psd: bad dimension or trace");
    const ComplexMatrix u = random_unitary(n, stream);
    RealVector lam(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lam(i) = -std::log(stream.uniform());
        sum += lam(i);
    }
    const double scale = stream.uniform() * trace / sum;
    lam *= scale;
    return HermitianMatrix::congruence(u, HermitianMatrix::diagonal(lam));
}

HermitianMatrix random_pd(std::size_t n, double trace, rng::Stream& stream) {
    if (!(trace > 0.0)) throw InputError("random_pd: trace must be > 0");
    return random_psd(n, 0.9 * trace, stream) + HermitianMatrix::identity(n) * (0.1 * trace / static_cast<double>(n));
}

HermitianMatrix random_fixed_diagonal(const std::vector<double>& diag, rng::Stream& stream) {
    const std::size_t n = diag.size();
    if (n < 1) throw InputError("random_fixed_diagonal: empty diagonal");
    for (double v : diag)
        if (!std::isfinite(v) || v < 0.0) throw InputError("random_fixed_diagonal: diagonal must be >= 0");
    ComplexMatrix w(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double re = stream.normal();
            const double im = stream.normal();
            w(i, j) = Complex(re, im);
        }
    ComplexMatrix c = w * w.adjoint();
    RealVector inv_sd(n);
    for (std::size_t i = 0; i < n; ++i) inv_sd(i) = 1.0 / std::sqrt(c(i, i).real());
    const double mix = stream.uniform();
    ComplexMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                s(i, i) = diag[i];
            } else {
                s(i, j) = mix * c(i, j) * inv_sd(i) * inv_sd(j) * std::sqrt(diag[i] * diag[j]);
            }
        }
    return HermitianMatrix(s);
}

// --- Property harness ----------------------------------------------------

namespace {

constexpr double kSeBound = -3.0;
constexpr double kDeterministicTol = 1e-9;

double se_margin(double value, double se) {
    if (se > 0.0) return value / se;
    if (value >= 0.0) return std::numeric_limits<double>::infinity();
    return -std::numeric_limits<double>::infinity();
}

PropertyResult statistical(std::string name, std::size_t trials, double worst, std::string detail = {}) {
    PropertyResult r;
    r.property = std::move(name);
    r.trials = trials;
    r.worst_margin = worst;
    r.statistical = true;
    r.pass = worst >= kSeBound;
    r.detail = std::move(detail);
    return r;
}

PropertyResult deterministic(std::string name, std::size_t trials, double worst, double tol,
                             std::string detail = {}) {
    PropertyResult r;
    r.property = std::move(name);
    r.trials = trials;
    r.worst_margin = worst;
    r.statistical = false;
    r.pass = worst >= -tol;
    r.detail = std::move(detail);
    return r;
}

std::vector<double> per_draw_rates(const HermitianMatrix& s, const SampleSet& samples) {
    std::vector<double> v(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) v[k] = secrecy_rate_per_draw(s, samples[k]);
    return v;
}

RateEstimate paired(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return estimate_from(d);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t purpose) {
    return rng::hash_key(seed, 0x0facadeULL, purpose, 0);
}

PropertyResult schur_check(const SampleSet& samples, double p, TrialOptions opt, bool combined) {
    const auto& spec = samples.spec();
    require_degraded_regime(spec, "schur optimality");
    if (!(p > 0.0)) throw InputError("schur optimality: power must be > 0");
    const std::size_t n = spec.n_t;
    const HermitianMatrix iso = HermitianMatrix::identity(n) * (p / static_cast<double>(n));
    const auto base = per_draw_rates(iso, samples);
    const RateEstimate base_est = estimate_from(base);
    rng::Stream st(opt.seed, 3);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const auto other = per_draw_rates(random_psd(n, p, st), samples);
        double m;
        if (combined) {
            const RateEstimate e = estimate_from(other);
            m = se_margin(base_est.mean - e.mean, combined_std_err(base_est, e));
        } else {
            const RateEstimate d = paired(base, other);
            m = se_margin(d.mean, d.std_err);
        }
        worst = std::min(worst, m);
    }
    return statistical(combined ? "schur_optimality_combined_se" : "schur_optimality", opt.trials, worst,
                       "R_s((P/n_t) I) - R_s(S), tr S <= P");
}

}  // namespace

bool PropertyReport::all_pass() const noexcept {
    return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.pass; });
}

void PropertyReport::write_text(std::ostream& os) const {
    for (const auto& r : results) {
        os << (r.pass ? "PASS " : "FAIL ") << r.property << ": trials=" << r.trials
           << " worst_margin=" << format_double(r.worst_margin) << (r.statistical ? " SE" : " abs");
        if (!r.detail.empty()) os << " (" << r.detail << ")";
        os << '\n';
    }
    os << (all_pass() ? "all properties pass" : "property failures present") << '\n';
}

void PropertyReport::write_csv(std::ostream& os) const {
    os << "property,trials,worst_margin_SE,pass\n";
    for (const auto& r : results)
        os << r.property << ',' << r.trials << ',' << format_double(r.worst_margin) << ','
           << (r.pass ? "true" : "false") << '\n';
}

PropertyResult check_monotonicity(const SampleSet& samples, const PowerBudget& budget, TrialOptions opt) {
    const auto& spec = samples.spec();
    require_degraded_regime(spec, "monotonicity");
    const std::size_t n = spec.n_t;
    const double p = budget.total_power();
    rng::Stream st(opt.seed, 1);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const HermitianMatrix s = random_psd(n, p, st);
        const HermitianMatrix d = random_psd(n, p, st);
        const RateEstimate diff = secrecy_rate_difference(s + d, s, samples);
        worst = std::min(worst, se_margin(diff.mean, diff.std_err));
    }
    return statistical("monotonicity", opt.trials, worst, "R_s(S + D) - R_s(S), D PSD");
}

PropertyResult check_positivity(const SampleSet& samples, const PowerBudget& budget, TrialOptions opt) {
    const auto& spec = samples.spec();
    const std::size_t n = spec.n_t;
    const double p = budget.total_power();
    if (!(p > 0.0)) throw InputError("positivity: power must be > 0");
    rng::Stream st(opt.seed, 2);
    double worst = std::numeric_limits<double>::infinity();
    double worst_se = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const HermitianMatrix s = random_pd(n, p, st);
        for (const auto& d : samples.draws()) worst = std::min(worst, per_sample_transformed(s, d, spec));
        const RateEstimate r = secrecy_rate(s, samples);
        worst_se = std::min(worst_se, se_margin(r.mean, r.std_err));
    }
    std::ostringstream detail;
    detail << "min per-draw closed transformed value; worst R_s margin " << format_double(worst_se) << " SE";
    PropertyResult r = deterministic("positivity", opt.trials, worst, 1e-12, detail.str());
    r.pass = r.pass && worst_se >= kSeBound;
    return r;
}

PropertyResult check_schur_optimality(const SampleSet& samples, double p, TrialOptions opt) {
    return schur_check(samples, p, opt, false);
}

PropertyResult check_schur_optimality_combined(const SampleSet& samples, double p, TrialOptions opt) {
    return schur_check(samples, p, opt, true);
}

PropertyResult check_alpha_monotonicity(const SampleSet& samples, double p, std::size_t points) {
    const auto& spec = samples.spec();
    if (points < 2) throw InputError("alpha monotonicity: need at least 2 points");
    if (!(p > 0.0)) throw InputError("alpha monotonicity: power must be > 0");
    const std::size_t n = spec.n_t;
    const double a_max = p / static_cast<double>(n);
    std::vector<double> prev = per_draw_rates(HermitianMatrix::zero(n), samples);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < points; ++k) {
        const double a = a_max * static_cast<double>(k) / static_cast<double>(points - 1);
        auto cur = per_draw_rates(HermitianMatrix::identity(n) * a, samples);
        const RateEstimate d = paired(cur, prev);
        worst = std::min(worst, se_margin(d.mean, d.std_err));
        prev = std::move(cur);
    }
    return statistical("alpha_monotonicity", points - 1, worst, "R_s(a_{k+1} I) - R_s(a_k I)");
}

PropertyResult check_per_sample_concavity(const SampleSet& samples, const PowerBudget& budget,
                                          TrialOptions opt) {
    const auto& spec = samples.spec();
    const std::size_t n = spec.n_t;
    const double p = budget.total_power();
    if (!(p > 0.0)) throw InputError("per-sample concavity: power must be > 0");
    rng::Stream st(opt.seed, 4);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const auto& d = samples[t % samples.size()];
        const HermitianMatrix a = random_pd(n, p, st);
        const HermitianMatrix b = random_pd(n, p, st);
        const HermitianMatrix mid = (a + b) * 0.5;
        const double slack = per_sample_transformed(mid, d, spec) -
                             0.5 * (per_sample_transformed(a, d, spec) + per_sample_transformed(b, d, spec));
        worst = std::min(worst, slack);
    }
    return deterministic("per_sample_concavity", opt.trials, worst, kDeterministicTol,
                         "f((A+B)/2) - (f(A)+f(B))/2 per draw");
}

PropertyResult check_same_marginal(const SampleSet& samples, const SampleSet& other, double p,
                                   TrialOptions opt) {
    const auto& spec = samples.spec();
    if (!(other.spec() == spec)) throw InputError("same marginal: SampleSets must share a spec");
    if (!(p > 0.0)) throw InputError("same marginal: power must be > 0");
    rng::Stream st(opt.seed, 5);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const HermitianMatrix s = random_psd(spec.n_t, p, st);
        const RateEstimate a = secrecy_rate(s, samples);
        const RateEstimate b = transformed_rate(s, other);
        worst = std::min(worst, se_margin(-std::abs(a.mean - b.mean), combined_std_err(a, b)));
    }
    return statistical("same_marginal", opt.trials, worst, "-|R_s - R~_s| on independent ensembles");
}

PropertyResult check_wishart_form(const SampleSet& samples, const std::vector<double>& powers,
                                  std::uint64_t eigen_seed) {
    const auto& spec = samples.spec();
    if (powers.empty()) throw InputError("wishart form: empty power list");
    const auto eig_h = wishart_eigen_samples(spec.n_t, spec.n_r, samples.size(), derived_seed(eigen_seed, 1));
    const auto eig_g = wishart_eigen_samples(spec.n_t, spec.n_e, samples.size(), derived_seed(eigen_seed, 2));
    double worst = std::numeric_limits<double>::infinity();
    for (double p : powers) {
        const RateEstimate a = capacity_total(spec, p, samples);
        const RateEstimate b = capacity_wishart_form(spec, p, eig_h, eig_g);
        worst = std::min(worst, se_margin(-std::abs(a.mean - b.mean), combined_std_err(a, b)));
    }
    return statistical("wishart_form", powers.size(), worst, "-|C_total - C_wishart| per power");
}

PropertyResult check_misose_diagonal(const SampleSet& samples, const std::vector<double>& diag, double beta,
                                     double sigma, TrialOptions opt) {
    const auto& spec = samples.spec();
    if (spec.n_e != 1) throw ConstraintError("misose diagonal: requires n_e = 1");
    if (diag.size() != spec.n_t) throw InputError("misose diagonal: diagonal length must be n_t");
    RealVector dv(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) dv(static_cast<Eigen::Index>(i)) = diag[i];
    const HermitianMatrix d = HermitianMatrix::diagonal(dv);
    // validates beta and sigma
    (void)misose_scalar_objective(d, beta, sigma, samples);
    std::vector<double> base(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) base[k] = misose_scalar_per_draw(d, beta, sigma, samples[k]);
    rng::Stream st(opt.seed, 6);
    double worst = std::numeric_limits<double>::infinity();
    std::vector<double> other(samples.size());
    for (std::size_t t = 0; t < opt.trials; ++t) {
        const HermitianMatrix s = random_fixed_diagonal(diag, st);
        for (std::size_t k = 0; k < samples.size(); ++k)
            other[k] = misose_scalar_per_draw(s, beta, sigma, samples[k]);
        const RateEstimate diff = paired(base, other);
        worst = std::min(worst, se_margin(diff.mean, diff.std_err));
    }
    return statistical("misose_diagonal", opt.trials, worst, "phi(diag) - phi(S), same diagonal");
}

PropertyResult check_zero_capacity_boundary(const SampleSet& samples, double p) {
    const auto& spec = samples.spec();
    if (spec.n_r != spec.n_e || spec.sigma_h2 != spec.sigma_g2)
        throw ConstraintError("zero capacity boundary: requires n_r = n_e and sigma_h2 = sigma_g2");
    const RateEstimate r =
        secrecy_rate(HermitianMatrix::identity(spec.n_t) * (p / static_cast<double>(spec.n_t)), samples);
    return statistical("zero_capacity_boundary", 1, se_margin(-std::abs(r.mean), r.std_err),
                       "-|R_s((P/n_t) I)|, symmetric ensemble");
}

PropertyReport property_suite(const ChannelSpec& spec, const PowerBudget& budget, const SampleSet& samples,
                              std::size_t trial_count) {
    if (!(samples.spec() == spec)) throw InputError("property_suite: spec does not match SampleSet");
    require_degraded_regime(spec, "property_suite");
    const double p = budget.total_power();
    if (!(p > 0.0)) throw InputError("property_suite: total power must be > 0");
    if (trial_count < 1) throw InputError("property_suite: trial count must be >= 1");
    const std::uint64_t seed = samples.seed();
    const std::size_t n = samples.size();
    auto opt = [&](std::uint64_t purpose, std::size_t trials) {
        return TrialOptions{trials, derived_seed(seed, purpose)};
    };

    PropertyReport report;
    report.results.push_back(check_monotonicity(samples, budget, opt(1, trial_count)));
    report.results.push_back(check_positivity(samples, budget, opt(2, trial_count)));
    report.results.push_back(check_schur_optimality(samples, p, opt(3, trial_count)));
    report.results.push_back(check_alpha_monotonicity(samples, p, 11));
    report.results.push_back(check_per_sample_concavity(samples, budget, opt(4, trial_count)));

    // Two-sided null comparisons hold exactly in law, so trial count is kept small.
    const SampleSet independent = sample(spec, n, derived_seed(seed, 5));
    report.results.push_back(check_same_marginal(samples, independent, p, opt(5, std::min<std::size_t>(trial_count, 5))));
    report.results.push_back(check_wishart_form(samples, {p / 100.0, p / 10.0, p}, derived_seed(seed, 6)));

    ChannelSpec miso = spec;
    miso.n_r = 1;
    miso.n_e = 1;
    const SampleSet miso_samples = sample(miso, n, derived_seed(seed, 7));
    std::vector<double> diag;
    if (const auto* per = std::get_if<PerAntennaPower>(&budget.kind()); per && per->p.size() == spec.n_t) {
        diag = per->p;
    } else {
        diag.assign(spec.n_t, p / static_cast<double>(spec.n_t));
    }
    const double beta = 1.0 / spec.variance_ratio() - 1.0;
    report.results.push_back(check_misose_diagonal(miso_samples, diag, beta, 1.0, opt(7, trial_count)));

    ChannelSpec sym = spec;
    sym.n_r = spec.n_e;
    sym.sigma_h2 = spec.sigma_g2;
    const SampleSet sym_samples = sample(sym, n, derived_seed(seed, 8));
    report.results.push_back(check_zero_capacity_boundary(sym_samples, p));
    return report;
}

}  // namespace mimome
