#pragma once

// Independent checks for the rate functionals and the solver: exhaustive
// grid search over small covariance families, 1-D quadrature for the
// single-antenna case, central finite differences over the Hermitian
// parametrization, and randomized property trials on fixed SampleSets.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mimome/channel.hpp"
#include "mimome/cmatrix.hpp"
#include "mimome/rates.hpp"
#include "mimome/rng.hpp"

namespace mimome {

using CovarianceFunctional = std::function<double(const HermitianMatrix&)>;

// --- Grid search ---------------------------------------------------------

enum class GridParametrization {
    // diag(s_1 .. s_{n_t}) with s on the lattice simplex sum s_i = P
    diag_trace_simplex,
    // n_t = 2: diag fixed to (P_1, P_2), off-diagonal rho on the square
    // [c - w, c + w]^2 (complex plane), clipped to |rho| <= sqrt(P_1 P_2)(1 - 1e-9)
    fixed_diag_offdiag,
};

struct GridSpec {
    GridParametrization parametrization = GridParametrization::diag_trace_simplex;
    std::size_t n_t = 2;
    std::size_t resolution = 41;  // points per axis
    std::vector<double> power;    // {P} for the simplex, {P_1, P_2} for fixed_diag_offdiag
    // fixed_diag_offdiag only: window center and half width; half_width <= 0
    // means the full disk radius.
    Complex center{0.0, 0.0};
    double half_width = 0.0;

    static GridSpec trace_simplex(std::size_t n_t, double p, std::size_t resolution = 41);
    static GridSpec fixed_diagonal(double p1, double p2, std::size_t resolution = 41);

    /// Throws InputError on an empty or malformed grid.
    void validate() const;
    /// Distance between adjacent points along one axis.
    double cell_size() const;
    /// Grid points in index order; every point is PSD and feasible.
    std::vector<HermitianMatrix> points() const;
};

struct GridResult {
    HermitianMatrix sigma;
    double value = 0.0;
    std::size_t index = 0;  // position in GridSpec::points()
    std::size_t evaluated = 0;
};

/// Exhaustive maximization; ties go to the lowest index.
GridResult grid_search(const CovarianceFunctional& objective, const GridSpec& grid);

/// grid_search of the SAA transformed rate.
GridResult grid_search(const GridSpec& grid, const SampleSet& samples);

/// Repeated fixed_diag_offdiag grid search, each level recentred on the
/// previous maximizer with a window of two cells.
GridResult zoom_search(const CovarianceFunctional& objective, GridSpec grid, std::size_t levels);

// --- Scalar quadrature ---------------------------------------------------

/// E1(x) for x > 0: power series below 1, continued fraction above.
double expint_e1(double x);

/// E[log(1 + a e)], e ~ Exp(1), in closed form e^{1/a} E1(1/a).
double expected_log1p_exp_closed(double a);

/// Same expectation by adaptive quadrature over [0, inf).
double expected_log1p_exp_quadrature(double a, double tolerance = 1e-12);

/// E[log(1 + a_h e)] - E[log(1 + a_g e)] by quadrature (abs. error < 1e-9).
double scalar_quadrature_rate(double a_h, double a_g, double tolerance = 1e-12);

/// The same difference through the series / continued-fraction E1.
double scalar_closed_form_rate(double a_h, double a_g);

// --- Finite differences --------------------------------------------------

/// Central differences of f with respect to each real Hermitian parameter.
/// Requires min eigenvalue of sigma > step (DomainError otherwise).
RealVector finite_diff_gradient(const CovarianceFunctional& f, const HermitianMatrix& sigma, double step);

using GradientFunctional = std::function<RealVector(const HermitianMatrix&)>;

/// Central differences of a gradient map; column k is d grad / d theta_k.
RealMatrix finite_diff_jacobian(const GradientFunctional& grad, const HermitianMatrix& sigma, double step);

// --- Random covariances --------------------------------------------------

/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
ComplexMatrix random_unitary(std::size_t n, rng::Stream& stream);

/// U diag(lambda) U^H with lambda = u * (uniform point on the simplex) * trace,
/// u ~ U(0, 1). Always PSD with trace <= `trace`.
HermitianMatrix random_psd(std::size_t n, double trace, rng::Stream& stream);

/// Strictly PD with trace in (0, trace]: random_psd plus a small ridge.
HermitianMatrix random_pd(std::size_t n, double trace, rng::Stream& stream);

/// Hermitian PSD with exactly the given diagonal and random correlations.
HermitianMatrix random_fixed_diagonal(const std::vector<double>& diag, rng::Stream& stream);

// --- Property harness ----------------------------------------------------

struct PropertyResult {
    std::string property;
    std::size_t trials = 0;
    // Statistical properties: smallest (value - bound) / SE over trials, pass
    // iff >= -3. Deterministic properties: smallest absolute slack, pass iff
    // >= -tolerance.
    double worst_margin = 0.0;
    bool statistical = true;
    bool pass = false;
    std::string detail;
};

struct PropertyReport {
    std::vector<PropertyResult> results;

    bool all_pass() const noexcept;
    void write_text(std::ostream& os) const;
    /// Header: property,trials,worst_margin_SE,pass
    void write_csv(std::ostream& os) const;
};

/// Trial seed for auxiliary randomness; independent of the channel draws.
struct TrialOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 1;
};

// Statistical properties use the given SampleSet (CRN) unless noted.

/// R_s(S + D) >= R_s(S) for PSD S, D (paired).
PropertyResult check_monotonicity(const SampleSet& samples, const PowerBudget& budget, TrialOptions opt);
/// Per-draw positivity of the closed transformed form for PD S, plus R_s >= -3 SE.
PropertyResult check_positivity(const SampleSet& samples, const PowerBudget& budget, TrialOptions opt);
/// R_s((P/n_t) I) >= R_s(S) for random S with tr S <= P (paired).
PropertyResult check_schur_optimality(const SampleSet& samples, double p, TrialOptions opt);
/// Same comparison with the bound widened to 3 combined SE.
PropertyResult check_schur_optimality_combined(const SampleSet& samples, double p, TrialOptions opt);
/// R_s(alpha I) nondecreasing over alpha in [0, P/n_t] (paired, adjacent points).
PropertyResult check_alpha_monotonicity(const SampleSet& samples, double p, std::size_t points);
/// Midpoint concavity of the closed transformed form per draw; worst violation < 1e-9.
PropertyResult check_per_sample_concavity(const SampleSet& samples, const PowerBudget& budget,
                                          TrialOptions opt);
/// secrecy_rate on `samples` vs transformed_rate on the independent `other`.
PropertyResult check_same_marginal(const SampleSet& samples, const SampleSet& other, double p,
                                   TrialOptions opt);
/// capacity_total vs capacity_wishart_form on independent eigen samples.
PropertyResult check_wishart_form(const SampleSet& samples, const std::vector<double>& powers,
                                  std::uint64_t eigen_seed);
/// MISOSE scalar objective: diag(d) is not beaten by any S with the same diagonal (paired).
/// Requires n_e = 1.
PropertyResult check_misose_diagonal(const SampleSet& samples, const std::vector<double>& diag,
                                     double beta, double sigma, TrialOptions opt);
/// n_r = n_e, sigma_h = sigma_g: |R_s((P/n_t) I)| < 3 SE.
PropertyResult check_zero_capacity_boundary(const SampleSet& samples, double p);

/// Runs every property that applies to `spec`. Properties needing a
/// different regime (MISOSE, zero-capacity boundary, independent ensembles)
/// draw their own SampleSets of the same size from seeds derived from
/// samples.seed(). Requires the degraded regime n_r >= n_e, sigma_h >= sigma_g.
PropertyReport property_suite(const ChannelSpec& spec, const PowerBudget& budget, const SampleSet& samples,
                              std::size_t trial_count);

}  // namespace mimome
