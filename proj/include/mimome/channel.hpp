#pragma once

// Rayleigh channel ensemble for the MIMOME wiretap model
//   y = H x + n_y,   z = G x + n_z,
// with H (n_r x n_t) entries CN(0, sigma_h2) and G (n_e x n_t) entries
// CN(0, sigma_g2), unit-variance noise at both receivers.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mimome/cmatrix.hpp"

namespace mimome {

struct ChannelSpec {
    std::size_t n_t = 1;
    std::size_t n_r = 1;
    std::size_t n_e = 1;
    double sigma_h2 = 1.0;  // legitimate per-entry variance
    double sigma_g2 = 1.0;  // eavesdropper per-entry variance

    /// n_t, n_r, n_e >= 1, sigma_h2 >= 0, sigma_g2 > 0; throws InputError.
    void validate() const;

    /// sigma_h2 / sigma_g2.
    double variance_ratio() const noexcept { return sigma_h2 / sigma_g2; }

    bool operator==(const ChannelSpec&) const = default;
};

struct ChannelDraw {
    ComplexMatrix h;  // n_r x n_t
    ComplexMatrix g;  // n_e x n_t
};

/// Fixed, seeded ensemble of (H, G) realizations. Immutable once built.
class SampleSet {
public:
    SampleSet(ChannelSpec spec, std::uint64_t seed, std::vector<ChannelDraw> draws);

    const ChannelSpec& spec() const noexcept { return spec_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t size() const noexcept { return draws_.size(); }
    const std::vector<ChannelDraw>& draws() const noexcept { return draws_; }
    const ChannelDraw& operator[](std::size_t k) const { return draws_[k]; }

    bool operator==(const SampleSet&) const;

private:
    ChannelSpec spec_;
    std::uint64_t seed_;
    std::vector<ChannelDraw> draws_;
};

/// Matrix tags of the counter-based generator.
enum class MatrixTag : std::uint64_t { legitimate = 1, eavesdropper = 2, wishart = 3 };

/// One CN(0, variance) entry keyed by (seed, draw, tag, entry).
Complex complex_gaussian(std::uint64_t seed, std::uint64_t draw, MatrixTag tag,
                         std::uint64_t entry, double variance) noexcept;

SampleSet sample(const ChannelSpec& spec, std::size_t count, std::uint64_t seed);

/// H' = [H_top ; (sigma_h / sigma_g) G], where H_top is the first n_r - n_e
/// rows of H. Same law as H; requires n_r >= n_e and sigma_g2 > 0.
ComplexMatrix same_marginal_h(const ChannelDraw& draw, const ChannelSpec& spec);

/// First n_r - n_e rows of H (possibly empty).
ComplexMatrix safe_block(const ChannelDraw& draw, const ChannelSpec& spec);

/// Eigenvalues (ascending) of W = X X^H, X dim x n_t with CN(0, 1) entries.
std::vector<RealVector> wishart_eigen_samples(std::size_t n_t, std::size_t dim, std::size_t count,
                                              std::uint64_t seed);

// Binary cache: 8-byte magic, u32 version, u32 n_t/n_r/n_e, f64 variances,
// u64 seed, u64 count, then per draw H then G (row-major) as little-endian
// f64 (re, im) pairs.
void save_samples(const SampleSet& samples, const std::filesystem::path& path);
SampleSet load_samples(const std::filesystem::path& path);

}  // namespace mimome
