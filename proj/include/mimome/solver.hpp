#pragma once

// Per-antenna-power secrecy capacity solver.
//
// The objective is frozen over a SampleSet first (sample-average
// approximation), which makes it deterministic and exactly concave:
//
//   f_t(S) = mean_k [log|I + H'_k S H'_k^H| - log|I + G_k S G_k^H|] + (1/t) log|S|
//
// maximized subject to diag(S) = (P_1 ... P_{n_t}) with an infeasible-start
// Newton method inside a barrier loop (t <- gamma t until n_t / t < eps).
//
// Newton steps live in a real Hermitian parametrization theta in R^{n_t^2}:
// the n_t real diagonal entries first, then (Re, Im) of each S_ij, i < j,
// in row-major pair order. The vec-space gradient and Hessian are mapped
// into it through the fixed linear map vec(S) = T theta.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mimome/channel.hpp"
#include "mimome/cmatrix.hpp"
#include "mimome/errors.hpp"
#include "mimome/rates.hpp"

namespace mimome {

struct SolverConfig {
    double epsilon = 1e-4;             // stop when n_t / t < epsilon
    double t0 = 1.0;                   // initial barrier parameter
    double gamma = 1.5;                // barrier growth factor
    double ls_alpha = 0.1;             // sufficient decrease of ||r||
    double ls_beta = 0.5;              // backtracking shrink factor
    std::size_t max_newton_iters = 200;
    double inner_residual_tol = 1e-4;  // centering tolerance on ||r||
    double pd_margin = 1e-12;          // iterates keep min eigenvalue above this

    void validate() const;
};

struct NewtonState {
    HermitianMatrix sigma;
    RealVector nu;
    double t = 0.0;
    double residual_norm = 0.0;
    double gap = 0.0;  // n_t / t
};

struct TraceRecord {
    std::size_t iter = 0;
    double t = 0.0;
    double residual = 0.0;  // ||r|| after the step
    double objective = 0.0; // SAA transformed rate at the new iterate
    double step = 0.0;      // accepted step size
};

struct OptimizeResult {
    NewtonState state;
    double objective = 0.0;  // SAA transformed rate at the final iterate
    RateEstimate rate;       // secrecy_rate(final S, samples)
    std::vector<TraceRecord> trace;
    std::vector<double> stage_objectives;  // SAA transformed rate at the end of each barrier stage
    std::size_t newton_steps = 0;
};

class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, NewtonState last)
        : SolverError(what), last_(std::move(last)) {}
    const NewtonState& last_state() const noexcept { return last_; }

private:
    NewtonState last_;
};

// --- Hermitian parametrization -------------------------------------------

std::size_t hermitian_param_count(std::size_t n) noexcept;
RealVector to_params(const HermitianMatrix& s);
HermitianMatrix from_params(const RealVector& theta, std::size_t n);
/// T with vec(S) = T theta.
ComplexMatrix param_to_vec_map(std::size_t n);
/// n x n^2 selector with A vec(S) = diag(S).
RealMatrix vec_diagonal_selector(std::size_t n);
/// n x n^2 selector with A theta = diag(S).
RealMatrix param_diagonal_selector(std::size_t n);

// --- Barrier objective and derivatives -----------------------------------

/// SAA transformed rate plus (1/t) log|S|. Throws DomainError unless S is PD.
double barrier_objective(const HermitianMatrix& sigma, double t, const SampleSet& samples);

/// Gradient with respect to vec(S) (complex, non-conjugated pairing:
/// df = grad^T vec(dS)), assembled from Kronecker products.
ComplexVector vec_gradient(const HermitianMatrix& sigma, double t, const SampleSet& samples);
/// Matching vec-space Hessian, built with the commutation matrix.
ComplexMatrix vec_hessian(const HermitianMatrix& sigma, double t, const SampleSet& samples);

/// Gradient / Hessian with respect to theta.
RealVector gradient(const HermitianMatrix& sigma, double t, const SampleSet& samples);
RealMatrix hessian(const HermitianMatrix& sigma, double t, const SampleSet& samples);

/// SAA transformed rate (no barrier), the quantity the solver maximizes.
double saa_transformed_rate(const HermitianMatrix& sigma, const SampleSet& samples);

OptimizeResult optimize(const ChannelSpec& spec, std::span<const double> p, const SampleSet& samples,
                        const SolverConfig& config = {});

/// CSV with header iter,t,residual,objective,step.
void write_trace_csv(std::ostream& os, std::span<const TraceRecord> trace);
/// Rows only, for appending several traces under one header.
void write_trace_rows(std::ostream& os, std::span<const TraceRecord> trace);

}  // namespace mimome
