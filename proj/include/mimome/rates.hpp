#pragma once

// Secrecy-rate functionals over a fixed SampleSet. All rates are in nats.
//
// R_s(S)  = E_H[log|I + H S H^H|] - E_G[log|I + G S G^H|]
// R~_s(S) = E[log|I + H' S H'^H|] - E_G[log|I + G S G^H|]   (H' same-marginal)
//
// Every comparison of two covariances in this library evaluates both on the
// same SampleSet (common random numbers), and per-draw terms always pair
// H_k with G_k.

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mimome/channel.hpp"
#include "mimome/cmatrix.hpp"

namespace mimome {

struct RateEstimate {
    double mean = 0.0;     // nats
    double std_err = 0.0;  // sample std / sqrt(n_samples)
    std::size_t n_samples = 0;
};

/// Mean and standard error of per-draw values, reduced in index order.
RateEstimate estimate_from(std::span<const double> per_draw);

/// sqrt(a.std_err^2 + b.std_err^2), for estimates on independent ensembles.
double combined_std_err(const RateEstimate& a, const RateEstimate& b) noexcept;

struct TotalPower {
    double p = 0.0;
};
struct PerAntennaPower {
    std::vector<double> p;
};

class PowerBudget {
public:
    static PowerBudget total(double p);
    static PowerBudget per_antenna(std::vector<double> p);

    bool is_total() const noexcept { return std::holds_alternative<TotalPower>(kind_); }
    const std::variant<TotalPower, PerAntennaPower>& kind() const noexcept { return kind_; }

    /// Sum of the per-antenna limits, or P.
    double total_power() const;
    /// Largest / smallest per-antenna limit (for Total: P / n_t).
    double p_max(std::size_t n_t) const;
    double p_min(std::size_t n_t) const;

private:
    explicit PowerBudget(std::variant<TotalPower, PerAntennaPower> k) : kind_(std::move(k)) {}
    std::variant<TotalPower, PerAntennaPower> kind_;
};

double secrecy_rate_per_draw(const HermitianMatrix& sigma, const ChannelDraw& draw);

/// Transformed-rate integrand, evaluated through H' (whose Gram matrix is
/// H_top^H H_top + (sigma_h2/sigma_g2) G^H G).
double transformed_rate_per_draw(const HermitianMatrix& sigma, const ChannelDraw& draw,
                                 const ChannelSpec& spec);

RateEstimate secrecy_rate(const HermitianMatrix& sigma, const SampleSet& samples);
RateEstimate transformed_rate(const HermitianMatrix& sigma, const SampleSet& samples);

/// Paired estimate of R_s(a) - R_s(b) on one SampleSet.
RateEstimate secrecy_rate_difference(const HermitianMatrix& a, const HermitianMatrix& b,
                                     const SampleSet& samples);

/// log|I + Ht (S^-1 + G^H G)^-1 Ht^H| with Ht = [H_top ; sqrt(ratio - 1) G],
/// so Ht^H Ht = H_top^H H_top + (ratio - 1) G^H G. Requires S strictly PD,
/// n_r >= n_e and sigma_h2 >= sigma_g2.
double per_sample_transformed(const HermitianMatrix& sigma, const ChannelDraw& draw,
                              const ChannelSpec& spec);

/// R_s((P / n_t) I): the total-power capacity when n_r >= n_e, sigma_h >= sigma_g.
RateEstimate capacity_total(const ChannelSpec& spec, double p, const SampleSet& samples);

/// R_s(diag(p)): the per-antenna capacity for n_r = n_e = 1.
RateEstimate capacity_misose_per_antenna(const ChannelSpec& spec, std::span<const double> p,
                                         const SampleSet& samples);

/// E_g[log(1 + beta / (sigma + g^H S g))] over the eavesdropper rows of the
/// samples (n_e = 1). Requires beta <= 0, sigma > 0, beta + 2 sigma > 0.
RateEstimate misose_scalar_objective(const HermitianMatrix& s, double beta, double sigma,
                                     const SampleSet& samples);
/// One draw of the above, without the argument checks.
double misose_scalar_per_draw(const HermitianMatrix& s, double beta, double sigma, const ChannelDraw& draw);

/// n_r E[log(1 + sigma_h2 P/n_t lambda)] - n_e E[log(1 + sigma_g2 P/n_t lambda)],
/// with lambda an unordered eigenvalue of the n_r- (resp. n_e-) dimensional
/// Wishart matrix with n_t degrees of freedom. Each eigen sample holds all
/// eigenvalues of one draw, so the per-draw value is a sum over them.
RateEstimate capacity_wishart_form(const ChannelSpec& spec, double p,
                                   const std::vector<RealVector>& eigen_h,
                                   const std::vector<RealVector>& eigen_g);

/// True iff n_r <= n_e and sigma_h <= sigma_g.
bool zero_capacity(const ChannelSpec& spec) noexcept;

/// Throws ConstraintError unless n_r >= n_e and sigma_h2 >= sigma_g2 > 0.
void require_degraded_regime(const ChannelSpec& spec, const char* what);

struct CapacityPoint {
    double p_g = 0.0;  // linear eavesdropper SNR sigma_g2 * P
    double capacity = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of C against ln P_g.
LineFit fit_snr_line(std::span<const CapacityPoint> points);
double snr_slope(std::span<const CapacityPoint> points);

}  // namespace mimome
