#include "mimome/rates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimome/errors.hpp"

namespace mimome {

RateEstimate estimate_from(std::span<const double> per_draw) {
    RateEstimate out;
    out.n_samples = per_draw.size();
    if (per_draw.empty()) return out;
    // Welford, in index order
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : per_draw) {
        ++k;
        const double d = v - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (v - mean);
    }
    out.mean = mean;
    if (k > 1) {
        const double var = m2 / static_cast<double>(k - 1);
        out.std_err = std::sqrt(std::max(var, 0.0) / static_cast<double>(k));
    }
    return out;
}

double combined_std_err(const RateEstimate& a, const RateEstimate& b) noexcept {
    return std::hypot(a.std_err, b.std_err);
}

PowerBudget PowerBudget::total(double p) {
    if (!std::isfinite(p) || p < 0.0) throw InputError("PowerBudget: total power must be >= 0");
    return PowerBudget(TotalPower{p});
}

PowerBudget PowerBudget::per_antenna(std::vector<double> p) {
    if (p.empty()) throw InputError("PowerBudget: per-antenna list is empty");
    for (double v : p)
        if (!std::isfinite(v) || v < 0.0) throw InputError("PowerBudget: per-antenna power must be >= 0");
    return PowerBudget(PerAntennaPower{std::move(p)});
}

double PowerBudget::total_power() const {
    if (const auto* t = std::get_if<TotalPower>(&kind_)) return t->p;
    const auto& v = std::get<PerAntennaPower>(kind_).p;
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double PowerBudget::p_max(std::size_t n_t) const {
    if (const auto* t = std::get_if<TotalPower>(&kind_)) return t->p / static_cast<double>(n_t);
    const auto& v = std::get<PerAntennaPower>(kind_).p;
    return *std::max_element(v.begin(), v.end());
}

double PowerBudget::p_min(std::size_t n_t) const {
    if (const auto* t = std::get_if<TotalPower>(&kind_)) return t->p / static_cast<double>(n_t);
    const auto& v = std::get<PerAntennaPower>(kind_).p;
    return *std::min_element(v.begin(), v.end());
}

namespace {

void check_covariance(const HermitianMatrix& sigma, const ChannelSpec& spec, const char* what) {
    if (sigma.dim() != spec.n_t)
        throw InputError(std::string(what) + ": covariance dimension " + std::to_string(sigma.dim()) +
                         " does not match n_t = " + std::to_string(spec.n_t));
    if (!sigma.is_psd()) throw InputError(std::string(what) + ": covariance is not PSD");
}

template <class F>
RateEstimate estimate_over(const SampleSet& samples, F&& per_draw) {
    if (samples.size() == 0) throw InputError("rate estimate: empty SampleSet");
    std::vector<double> values(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) values[k] = per_draw(samples[k]);
    return estimate_from(values);
}

}  // namespace

void require_degraded_regime(const ChannelSpec& spec, const char* what) {
    if (spec.n_r < spec.n_e)
        throw ConstraintError(std::string(what) + ": requires n_r >= n_e (got n_r = " +
                              std::to_string(spec.n_r) + ", n_e = " + std::to_string(spec.n_e) + ")");
    if (!(spec.sigma_g2 > 0.0)) throw ConstraintError(std::string(what) + ": requires sigma_g2 > 0");
    if (spec.sigma_h2 < spec.sigma_g2)
        throw ConstraintError(std::string(what) + ": requires sigma_h2 >= sigma_g2");
}

double secrecy_rate_per_draw(const HermitianMatrix& sigma, const ChannelDraw& draw) {
    return logdet_ipa(draw.h, sigma) - logdet_ipa(draw.g, sigma);
}

double transformed_rate_per_draw(const HermitianMatrix& sigma, const ChannelDraw& draw,
                                 const ChannelSpec& spec) {
    return logdet_ipa(same_marginal_h(draw, spec), sigma) - logdet_ipa(draw.g, sigma);
}

RateEstimate secrecy_rate(const HermitianMatrix& sigma, const SampleSet& samples) {
    check_covariance(sigma, samples.spec(), "secrecy_rate");
    return estimate_over(samples, [&](const ChannelDraw& d) { return secrecy_rate_per_draw(sigma, d); });
}

RateEstimate transformed_rate(const HermitianMatrix& sigma, const SampleSet& samples) {
    const auto& spec = samples.spec();
    check_covariance(sigma, spec, "transformed_rate");
    require_degraded_regime(spec, "transformed_rate");
    return estimate_over(samples,
                         [&](const ChannelDraw& d) { return transformed_rate_per_draw(sigma, d, spec); });
}

RateEstimate secrecy_rate_difference(const HermitianMatrix& a, const HermitianMatrix& b,
                                     const SampleSet& samples) {
    check_covariance(a, samples.spec(), "secrecy_rate_difference");
    check_covariance(b, samples.spec(), "secrecy_rate_difference");
    return estimate_over(samples, [&](const ChannelDraw& d) {
        return secrecy_rate_per_draw(a, d) - secrecy_rate_per_draw(b, d);
    });
}

double per_sample_transformed(const HermitianMatrix& sigma, const ChannelDraw& draw,
                              const ChannelSpec& spec) {
    require_degraded_regime(spec, "per_sample_transformed");
    if (sigma.dim() != spec.n_t) throw InputError("per_sample_transformed: dimension mismatch");
    if (!sigma.is_pd())
        throw DomainError(
            "per_sample_transformed: covariance is singular; use transformed_rate_per_draw instead");
    const auto top = static_cast<Eigen::Index>(spec.n_r - spec.n_e);
    const auto n_e = static_cast<Eigen::Index>(spec.n_e);
    ComplexMatrix ht(top + n_e, static_cast<Eigen::Index>(spec.n_t));
    ht.topRows(top) = draw.h.topRows(top);
    ht.bottomRows(n_e) = std::sqrt(spec.variance_ratio() - 1.0) * draw.g;

    const HermitianMatrix inner = sigma.inverse() + HermitianMatrix::gram(draw.g);
    return logdet_ipa(ht, inner.inverse());
}

RateEstimate capacity_total(const ChannelSpec& spec, double p, const SampleSet& samples) {
    if (!(samples.spec() == spec)) throw InputError("capacity_total: spec does not match SampleSet");
    require_degraded_regime(spec, "capacity_total");
    if (!std::isfinite(p) || p < 0.0) throw InputError("capacity_total: power must be >= 0");
    return secrecy_rate(HermitianMatrix::identity(spec.n_t) * (p / static_cast<double>(spec.n_t)), samples);
}

RateEstimate capacity_misose_per_antenna(const ChannelSpec& spec, std::span<const double> p,
                                         const SampleSet& samples) {
    if (!(samples.spec() == spec))
        throw InputError("capacity_misose_per_antenna: spec does not match SampleSet");
    if (spec.n_r != 1 || spec.n_e != 1)
        throw ConstraintError("capacity_misose_per_antenna: requires n_r = n_e = 1");
    require_degraded_regime(spec, "capacity_misose_per_antenna");
    if (p.size() != spec.n_t) throw InputError("capacity_misose_per_antenna: need one power per antenna");
    RealVector d(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || p[i] < 0.0)
            throw InputError("capacity_misose_per_antenna: per-antenna power must be >= 0");
        d(static_cast<Eigen::Index>(i)) = p[i];
    }
    return secrecy_rate(HermitianMatrix::diagonal(d), samples);
}

RateEstimate misose_scalar_objective(const HermitianMatrix& s, double beta, double sigma,
                                     const SampleSet& samples) {
    if (!(beta <= 0.0) || !(sigma > 0.0) || !(beta + 2.0 * sigma > 0.0))
        throw InputError("misose_scalar_objective: requires beta <= 0, sigma > 0, beta + 2 sigma > 0");
    if (samples.spec().n_e != 1) throw InputError("misose_scalar_objective: requires n_e = 1");
    check_covariance(s, samples.spec(), "misose_scalar_objective");
    if (beta == 0.0) return estimate_over(samples, [](const ChannelDraw&) { return 0.0; });
    return estimate_over(samples,
                         [&](const ChannelDraw& d) { return misose_scalar_per_draw(s, beta, sigma, d); });
}

double misose_scalar_per_draw(const HermitianMatrix& s, double beta, double sigma, const ChannelDraw& draw) {
    if (beta == 0.0) return 0.0;
    // g^H S g with g = G^H
    const double q = (draw.g * s.matrix() * draw.g.adjoint())(0, 0).real();
    const double arg = 1.0 + beta / (sigma + q);
    if (!(arg > 0.0)) throw DomainError("misose_scalar_objective: log argument is not positive");
    return std::log(arg);
}

RateEstimate capacity_wishart_form(const ChannelSpec& spec, double p,
                                   const std::vector<RealVector>& eigen_h,
                                   const std::vector<RealVector>& eigen_g) {
    spec.validate();
    require_degraded_regime(spec, "capacity_wishart_form");
    if (!std::isfinite(p) || p < 0.0) throw InputError("capacity_wishart_form: power must be >= 0");
    if (eigen_h.empty() || eigen_h.size() != eigen_g.size())
        throw InputError("capacity_wishart_form: eigen sample sets must be nonempty and equal-sized");
    const double a_h = spec.sigma_h2 * p / static_cast<double>(spec.n_t);
    const double a_g = spec.sigma_g2 * p / static_cast<double>(spec.n_t);
    std::vector<double> values(eigen_h.size());
    for (std::size_t k = 0; k < eigen_h.size(); ++k) {
        if (static_cast<std::size_t>(eigen_h[k].size()) != spec.n_r ||
            static_cast<std::size_t>(eigen_g[k].size()) != spec.n_e)
            throw InputError("capacity_wishart_form: eigen tuple size does not match n_r / n_e");
        double v = 0.0;
        for (double lam : eigen_h[k]) v += std::log1p(a_h * lam);
        for (double lam : eigen_g[k]) v -= std::log1p(a_g * lam);
        values[k] = v;
    }
    return estimate_from(values);
}

bool zero_capacity(const ChannelSpec& spec) noexcept {
    return spec.n_r <= spec.n_e && spec.sigma_h2 <= spec.sigma_g2;
}

LineFit fit_snr_line(std::span<const CapacityPoint> points) {
    std::vector<double> xs;
    xs.reserve(points.size());
    for (const auto& pt : points) {
        if (!(pt.p_g > 0.0) || !std::isfinite(pt.capacity))
            throw InputError("snr_slope: points need P_g > 0 and finite capacity");
        xs.push_back(std::log(pt.p_g));
    }
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2)
        throw InputError("snr_slope: need at least 2 distinct P_g values");

    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        mx += xs[i];
        my += points[i].capacity;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sxy += (xs[i] - mx) * (points[i].capacity - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

double snr_slope(std::span<const CapacityPoint> points) { return fit_snr_line(points).slope; }

}  // namespace mimome
