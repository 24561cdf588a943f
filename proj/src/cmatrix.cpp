#include "mimome/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mimome/errors.hpp"

namespace mimome {

bool all_finite(const ComplexMatrix& a) noexcept {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const Complex z = a.data()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void require_finite(const ComplexMatrix& a, const char* what) {
    if (!all_finite(a)) throw InputError(std::string(what) + ": non-finite entry");
}

double psd_tolerance(double largest_abs_eigenvalue) noexcept {
    return 1e-10 * std::max(largest_abs_eigenvalue, 1.0);
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw InputError("HermitianMatrix: matrix is not square");
    require_finite(m, "HermitianMatrix");
    const Eigen::Index n = m.rows();
    m_.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        m_(j, j) = Complex(m(j, j).real(), 0.0);
        for (Eigen::Index i = 0; i < j; ++i) {
            // average with the mirrored entry, then copy the conjugate down
            const Complex upper = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m_(i, j) = upper;
            m_(j, i) = std::conj(upper);
        }
    }
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
    return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::zero(std::size_t dim) {
    return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
    ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = d(i);
    return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::congruence(const ComplexMatrix& b, const HermitianMatrix& s) {
    if (static_cast<std::size_t>(b.cols()) != s.dim())
        throw InputError("congruence: dimension mismatch");
    return HermitianMatrix(b * s.m_ * b.adjoint());
}

HermitianMatrix HermitianMatrix::gram(const ComplexMatrix& b) {
    return HermitianMatrix(b.adjoint() * b);
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw InputError("HermitianMatrix +: dimension mismatch");
    return HermitianMatrix(m_ + o.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
    if (dim() != o.dim()) throw InputError("HermitianMatrix -: dimension mismatch");
    return HermitianMatrix(m_ - o.m_);
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
    return HermitianMatrix(m_ * s);
}

RealVector HermitianMatrix::eigenvalues() const {
    if (m_.size() == 0) return RealVector();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double HermitianMatrix::min_eigenvalue() const {
    const RealVector ev = eigenvalues();
    return ev.size() ? ev.minCoeff() : 0.0;
}

double HermitianMatrix::max_abs_eigenvalue() const {
    const RealVector ev = eigenvalues();
    return ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
}

double HermitianMatrix::trace() const { return m_.trace().real(); }

bool HermitianMatrix::is_psd() const {
    const RealVector ev = eigenvalues();
    if (ev.size() == 0) return true;
    return ev.minCoeff() >= -psd_tolerance(ev.cwiseAbs().maxCoeff());
}

bool HermitianMatrix::is_pd(double margin) const {
    const RealVector ev = eigenvalues();
    return ev.size() == 0 || ev.minCoeff() > margin;
}

HermitianMatrix HermitianMatrix::inverse() const {
    Eigen::LLT<ComplexMatrix> llt(m_);
    if (llt.info() != Eigen::Success) throw DomainError("inverse: matrix is not positive definite");
    return HermitianMatrix(llt.solve(ComplexMatrix::Identity(m_.rows(), m_.cols())));
}

namespace {

// Sum of log of the Cholesky diagonal; NaN signals failure.
double cholesky_logdet(const ComplexMatrix& m) {
    Eigen::LLT<ComplexMatrix> llt(m);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    const ComplexMatrix& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        acc += std::log(d);
    }
    return 2.0 * acc;
}

double eigen_logdet(const ComplexMatrix& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    const RealVector& ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(ev(i) > std::numeric_limits<double>::epsilon() * scale))
            throw DomainError(std::string(what) + ": matrix is numerically singular");
        acc += std::log(ev(i));
    }
    return acc;
}

}  // namespace

double logdet_ipa(const HermitianMatrix& a) {
    const Eigen::Index n = static_cast<Eigen::Index>(a.dim());
    if (n == 0) return 0.0;
    const ComplexMatrix m = ComplexMatrix::Identity(n, n) + a.matrix();
    const double via_chol = cholesky_logdet(m);
    if (std::isfinite(via_chol)) return via_chol;
    return eigen_logdet(m, "logdet_ipa");
}

double logdet_ipa(const ComplexMatrix& b, const HermitianMatrix& s) {
    require_finite(b, "logdet_ipa");
    return logdet_ipa(HermitianMatrix::congruence(b, s));
}

double logdet(const HermitianMatrix& s) {
    if (s.dim() == 0) return 0.0;
    const double via_chol = cholesky_logdet(s.matrix());
    if (std::isfinite(via_chol)) return via_chol;
    return eigen_logdet(s.matrix(), "logdet");
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_finite(a, "kron");
    require_finite(b, "kron");
    constexpr auto limit = static_cast<std::size_t>(std::numeric_limits<Eigen::Index>::max());
    const auto ra = static_cast<std::size_t>(a.rows()), ca = static_cast<std::size_t>(a.cols());
    const auto rb = static_cast<std::size_t>(b.rows()), cb = static_cast<std::size_t>(b.cols());
    if ((rb != 0 && ra > limit / rb) || (cb != 0 && ca > limit / cb))
        throw InputError("kron: result size overflows");
    const std::size_t rows = ra * rb, cols = ca * cb;
    if (rows != 0 && cols > limit / rows) throw InputError("kron: result size overflows");

    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector vec(const ComplexMatrix& a) {
    // Eigen storage is column-major, which is exactly column stacking.
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

ComplexMatrix unvec(const ComplexVector& v, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(v.size()) != rows * cols)
        throw InputError("unvec: length does not match rows * cols");
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix commutation_matrix(std::size_t p, std::size_t q) {
    const std::size_t n = p * q;
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    // A(i, j) sits at i + j p in vec(A) and at j + i q in vec(A^T).
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) k(j + i * q, i + j * p) = 1.0;
    return k;
}

RealVector solve_kkt(const RealMatrix& hessian, const RealMatrix& a, const RealVector& residual) {
    const Eigen::Index n = hessian.rows();
    const Eigen::Index m = a.rows();
    if (hessian.cols() != n || a.cols() != n || residual.size() != n + m)
        throw InputError("solve_kkt: dimension mismatch");
    if (!hessian.allFinite() || !a.allFinite() || !residual.allFinite())
        throw InputError("solve_kkt: non-finite entry");

    RealMatrix kkt = RealMatrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = hessian;
    kkt.topRightCorner(n, m) = a.transpose();
    kkt.bottomLeftCorner(m, n) = a;

    Eigen::FullPivLU<RealMatrix> lu(kkt);
    const double rcond = lu.rcond();
    double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!lu.isInvertible() || rcond < 1e-15) {
        // the LU estimate is unreliable on exactly singular input; report sigma_max / sigma_min
        const RealVector sv = Eigen::JacobiSVD<RealMatrix>(kkt).singularValues();
        const double smin = sv(sv.size() - 1);
        cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
        throw SolverError("solve_kkt: KKT matrix is singular or ill-conditioned", cond);
    }

    const RealVector step = lu.solve(-residual);
    const double rnorm = residual.norm();
    if (rnorm > 0.0) {
        const double rel = (kkt * step + residual).norm() / rnorm;
        if (!(rel < 1e-8))
            throw SolverError("solve_kkt: solve residual " + std::to_string(rel) + " too large", cond);
    }
    return step;
}

}  // namespace mimome
