#include "mimome/channel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "mimome/errors.hpp"
#include "mimome/rng.hpp"

namespace mimome {

void ChannelSpec::validate() const {
    if (n_t < 1 || n_r < 1 || n_e < 1) throw InputError("ChannelSpec: antenna counts must be >= 1");
    if (!std::isfinite(sigma_h2) || sigma_h2 < 0.0)
        throw InputError("ChannelSpec: sigma_h2 must be finite and >= 0");
    if (!std::isfinite(sigma_g2) || !(sigma_g2 > 0.0))
        throw InputError("ChannelSpec: sigma_g2 must be finite and > 0");
}

SampleSet::SampleSet(ChannelSpec spec, std::uint64_t seed, std::vector<ChannelDraw> draws)
    : spec_(spec), seed_(seed), draws_(std::move(draws)) {
    spec_.validate();
    for (const auto& d : draws_) {
        if (static_cast<std::size_t>(d.h.rows()) != spec_.n_r ||
            static_cast<std::size_t>(d.h.cols()) != spec_.n_t ||
            static_cast<std::size_t>(d.g.rows()) != spec_.n_e ||
            static_cast<std::size_t>(d.g.cols()) != spec_.n_t)
            throw InputError("SampleSet: draw dimensions do not match spec");
    }
}

bool SampleSet::operator==(const SampleSet& o) const {
    if (!(spec_ == o.spec_) || seed_ != o.seed_ || draws_.size() != o.draws_.size()) return false;
    for (std::size_t k = 0; k < draws_.size(); ++k) {
        const auto& a = draws_[k];
        const auto& b = o.draws_[k];
        if (std::memcmp(a.h.data(), b.h.data(), sizeof(Complex) * a.h.size()) != 0) return false;
        if (std::memcmp(a.g.data(), b.g.data(), sizeof(Complex) * a.g.size()) != 0) return false;
    }
    return true;
}

Complex complex_gaussian(std::uint64_t seed, std::uint64_t draw, MatrixTag tag, std::uint64_t entry,
                         double variance) noexcept {
    const auto [re, im] = rng::normal_pair(seed, draw, static_cast<std::uint64_t>(tag), entry);
    const double scale = std::sqrt(variance / 2.0);
    return {scale * re, scale * im};
}

namespace {

ComplexMatrix gaussian_matrix(std::uint64_t seed, std::uint64_t draw, MatrixTag tag, std::size_t rows,
                              std::size_t cols, double variance) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = complex_gaussian(seed, draw, tag, i * cols + j, variance);
    return m;
}

}  // namespace

SampleSet sample(const ChannelSpec& spec, std::size_t count, std::uint64_t seed) {
    spec.validate();
    if (count < 1) throw InputError("sample: count must be >= 1");
    std::vector<ChannelDraw> draws;
    draws.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        draws.push_back({gaussian_matrix(seed, k, MatrixTag::legitimate, spec.n_r, spec.n_t, spec.sigma_h2),
                         gaussian_matrix(seed, k, MatrixTag::eavesdropper, spec.n_e, spec.n_t, spec.sigma_g2)});
    }
    return SampleSet(spec, seed, std::move(draws));
}

ComplexMatrix safe_block(const ChannelDraw& draw, const ChannelSpec& spec) {
    if (spec.n_r < spec.n_e) throw ConstraintError("safe_block: requires n_r >= n_e");
    return draw.h.topRows(static_cast<Eigen::Index>(spec.n_r - spec.n_e));
}

ComplexMatrix same_marginal_h(const ChannelDraw& draw, const ChannelSpec& spec) {
    if (spec.n_r < spec.n_e)
        throw ConstraintError("same_marginal_h: splitting H requires n_r >= n_e");
    if (!(spec.sigma_g2 > 0.0)) throw ConstraintError("same_marginal_h: requires sigma_g2 > 0");
    const auto top = static_cast<Eigen::Index>(spec.n_r - spec.n_e);
    const double scale = std::sqrt(spec.variance_ratio());
    ComplexMatrix out(spec.n_r, spec.n_t);
    out.topRows(top) = draw.h.topRows(top);
    out.bottomRows(static_cast<Eigen::Index>(spec.n_e)) = scale * draw.g;
    return out;
}

std::vector<RealVector> wishart_eigen_samples(std::size_t n_t, std::size_t dim, std::size_t count,
                                              std::uint64_t seed) {
    if (n_t < 1 || dim < 1) throw InputError("wishart_eigen_samples: dimensions must be >= 1");
    if (count < 1) throw InputError("wishart_eigen_samples: count must be >= 1");
    std::vector<RealVector> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const ComplexMatrix x = gaussian_matrix(seed, k, MatrixTag::wishart, dim, n_t, 1.0);
        out.push_back(HermitianMatrix(x * x.adjoint()).eigenvalues());
    }
    return out;
}

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'I', 'M', 'O', 'S', 'E', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class U>
void put_le(std::ostream& os, U v) {
    std::array<char, sizeof(U)> buf{};
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(buf.data(), buf.size());
}

template <class U>
U get_le(std::istream& is) {
    std::array<unsigned char, sizeof(U)> buf{};
    is.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!is) throw InputError("load_samples: truncated file");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double x) { put_le(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

void put_matrix(std::ostream& os, const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put_f64(os, m(i, j).real());
            put_f64(os, m(i, j).imag());
        }
}

ComplexMatrix get_matrix(std::istream& is, std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double re = get_f64(is);
            const double im = get_f64(is);
            m(i, j) = Complex(re, im);
        }
    return m;
}

}  // namespace

void save_samples(const SampleSet& samples, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("save_samples: cannot open " + path.string());
    const auto& s = samples.spec();
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(os, kVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.n_t));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.n_r));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.n_e));
    put_f64(os, s.sigma_h2);
    put_f64(os, s.sigma_g2);
    put_le<std::uint64_t>(os, samples.seed());
    put_le<std::uint64_t>(os, samples.size());
    for (const auto& d : samples.draws()) {
        put_matrix(os, d.h);
        put_matrix(os, d.g);
    }
    if (!os) throw InputError("save_samples: write failed for " + path.string());
}

SampleSet load_samples(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("load_samples: cannot open " + path.string());
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw InputError("load_samples: bad magic");
    if (get_le<std::uint32_t>(is) != kVersion) throw InputError("load_samples: unsupported version");
    ChannelSpec s;
    s.n_t = get_le<std::uint32_t>(is);
    s.n_r = get_le<std::uint32_t>(is);
    s.n_e = get_le<std::uint32_t>(is);
    s.sigma_h2 = get_f64(is);
    s.sigma_g2 = get_f64(is);
    const auto seed = get_le<std::uint64_t>(is);
    const auto count = get_le<std::uint64_t>(is);
    s.validate();
    std::vector<ChannelDraw> draws;
    draws.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
    for (std::uint64_t k = 0; k < count; ++k) {
        ChannelDraw d;
        d.h = get_matrix(is, s.n_r, s.n_t);
        d.g = get_matrix(is, s.n_e, s.n_t);
        draws.push_back(std::move(d));
    }
    return SampleSet(s, seed, std::move(draws));
}

}  // namespace mimome
