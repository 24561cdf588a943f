#pragma once

// Dense complex linear algebra used throughout the library. Storage is
// Eigen; this header adds the Hermitian value type and the handful of
// matrix-calculus primitives (vec, Kronecker, commutation matrix, KKT
// solve) the rate functionals and the barrier solver are written in.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace mimome {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Throws InputError if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& a, const char* what);
bool all_finite(const ComplexMatrix& a) noexcept;

/// Scale-relative PSD tolerance: 1e-10 * max(largest |eigenvalue|, 1).
double psd_tolerance(double largest_abs_eigenvalue) noexcept;

/// Complex Hermitian matrix. The constructor mirrors the upper triangle
/// onto the lower one and zeroes the imaginary part of the diagonal, so
/// entries(i, j) == conj(entries(j, i)) holds bit-exactly.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(const ComplexMatrix& m);

    static HermitianMatrix identity(std::size_t dim);
    static HermitianMatrix zero(std::size_t dim);
    static HermitianMatrix diagonal(const RealVector& d);
    /// B * S * B^H for any conformable B.
    static HermitianMatrix congruence(const ComplexMatrix& b, const HermitianMatrix& s);
    /// B^H * B.
    static HermitianMatrix gram(const ComplexMatrix& b);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix operator*(double s) const;

    /// Ascending real eigenvalues.
    RealVector eigenvalues() const;
    double min_eigenvalue() const;
    double max_abs_eigenvalue() const;
    double trace() const;

    /// All eigenvalues >= -psd_tolerance(max |eigenvalue|).
    bool is_psd() const;
    /// Smallest eigenvalue strictly above `margin`.
    bool is_pd(double margin = 0.0) const;

    HermitianMatrix inverse() const;

private:
    ComplexMatrix m_;
};

/// log det(I + A), natural log, for Hermitian A with I + A positive definite.
/// Cholesky first; falls back to an eigenvalue factorization when the
/// Cholesky fails on a numerically borderline input.
double logdet_ipa(const HermitianMatrix& a);

/// log det(I + B S B^H), the Gram-product form.
double logdet_ipa(const ComplexMatrix& b, const HermitianMatrix& s);

/// log det of a Hermitian positive definite matrix.
double logdet(const HermitianMatrix& s);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Column-stacking vectorization.
ComplexVector vec(const ComplexMatrix& a);
ComplexMatrix unvec(const ComplexVector& v, std::size_t rows, std::size_t cols);

/// K with vec(A^T) = K vec(A) for every p x q matrix A.
ComplexMatrix commutation_matrix(std::size_t p, std::size_t q);

/// Solves [[hessian, A^T], [A, 0]] [dx; dnu] = -residual and returns the
/// Newton direction [dx; dnu]. Throws SolverError (with a condition
/// estimate) when the KKT matrix is singular or the solve is inaccurate.
RealVector solve_kkt(const RealMatrix& hessian, const RealMatrix& a, const RealVector& residual);

}  // namespace mimome
