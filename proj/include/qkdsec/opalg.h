#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qkdsec/config.h"
#include "qkdsec/rng.h"

namespace qkdsec {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

/// Dense row-major complex matrix. General shape; used for intermediate
/// products and basis blocks that are not Hermitian.
class CMatrix {
   public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const double> d);
    /// |v><v|
    static CMatrix outer(std::span<const cplx> v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }

    CMatrix adjoint() const;
    cplx trace() const;
    double frobenius() const;
    /// Frobenius norm of the strictly off-diagonal part.
    double off_diagonal_norm() const;
    bool is_diagonal(double tol) const;

    CMatrix &operator+=(const CMatrix &o);
    CMatrix &operator-=(const CMatrix &o);
    CMatrix &operator*=(cplx s);

    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix &a, const CMatrix &b);
    friend bool operator==(const CMatrix &a, const CMatrix &b) = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Matrix-vector product.
StateVector apply(const CMatrix &m, std::span<const cplx> v);
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
double max_abs_diff(const CMatrix &a, const CMatrix &b);

/// Square self-adjoint matrix. Construction validates A = A^dagger within
/// `Config::hermitian_tol` and then symmetrizes exactly, so downstream code can
/// rely on bit-exact self-adjointness.
class HermitianOperator {
   public:
    HermitianOperator() = default;
    explicit HermitianOperator(CMatrix m, const Config &cfg = Config::defaults());

    static HermitianOperator identity(std::size_t n);
    static HermitianOperator zero(std::size_t n);
    static HermitianOperator diagonal(std::span<const double> d);
    static HermitianOperator projector(std::span<const cplx> v);
    /// Skips validation; caller guarantees the input is already exactly
    /// self-adjoint (or close enough that symmetrizing is the intent).
    static HermitianOperator symmetrized(const CMatrix &m);

    std::size_t dim() const { return m_.rows(); }
    const CMatrix &matrix() const { return m_; }
    cplx operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
    double trace() const { return m_.trace().real(); }

    HermitianOperator &operator+=(const HermitianOperator &o);
    HermitianOperator &operator-=(const HermitianOperator &o);
    HermitianOperator &operator*=(double s);
    friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator &b) { return a += b; }
    friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator &b) { return a -= b; }
    friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }
    friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }
    friend bool operator==(const HermitianOperator &a, const HermitianOperator &b) = default;

   private:
    CMatrix m_;
};

/// Eigenvalues in descending order; column i of `vectors` belongs to
/// `values[i]`.
struct Spectrum {
    std::vector<double> values;
    CMatrix vectors;

    /// sum_i f(lambda_i) v_i v_i^dagger
    template <typename F>
    HermitianOperator map(F &&f) const {
        const std::size_t n = values.size();
        CMatrix out(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            const double w = f(values[k]);
            if (w == 0.0) continue;
            for (std::size_t r = 0; r < n; ++r) {
                const cplx vr = vectors(r, k) * w;
                for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(vectors(c, k));
            }
        }
        return HermitianOperator::symmetrized(out);
    }
};

/// Cyclic complex Jacobi eigendecomposition.
///
/// Throws NumericalError if the off-diagonal norm does not fall below
/// `jacobi_offdiag_tol * ||A||_F` within `jacobi_max_sweeps` sweeps; `label`
/// names the matrix in that message.
Spectrum eig_hermitian(const HermitianOperator &a, const Config &cfg = Config::defaults(),
                       const std::string &label = "matrix");

/// Sum of |eigenvalues|.
double trace_norm(const HermitianOperator &a, const Config &cfg = Config::defaults());

/// Throws ValidationError unless `a` is positive semidefinite (eigenvalues
/// >= -psd_tol) with trace 1 within trace_tol. Returns its spectrum with the
/// tiny negative eigenvalues clamped to zero.
Spectrum validate_density(const HermitianOperator &a, const Config &cfg = Config::defaults(),
                          const std::string &label = "density operator");

bool is_psd(const HermitianOperator &a, double tol, const Config &cfg = Config::defaults());

/// Root fidelity F = tr sqrt(sqrt(A) B sqrt(A)).
///
/// Evaluated on the support of the lower-rank argument: with B = W D W^dagger
/// restricted to its support, F = tr sqrt(D^1/2 W^dagger A W D^1/2). This keeps
/// pure and low-rank inputs exact instead of summing square roots of rounding
/// noise.
double fidelity(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg = Config::defaults());

/// Kronecker product. Throws ResourceError past `dim_cap`.
HermitianOperator tensor(const HermitianOperator &a, const HermitianOperator &b,
                         const Config &cfg = Config::defaults());
StateVector tensor(std::span<const cplx> a, std::span<const cplx> b);

/// Partial trace over every subsystem not listed in `keep`. Subsystem 0 is the
/// leftmost (most significant) tensor factor; the kept factors stay in their
/// original order.
HermitianOperator partial_trace(const HermitianOperator &a, std::span<const std::size_t> dims,
                                std::span<const std::size_t> keep);

/// Positive part projector: span of eigenvectors with eigenvalue > tol.
HermitianOperator positive_projector(const HermitianOperator &a, double tol = 0.0,
                                     const Config &cfg = Config::defaults());

/// A^{-1/2} on the support of a PSD operator (eigenvalues <= support_tol
/// treated as zero), together with the support projector.
struct InverseSqrt {
    HermitianOperator inv_sqrt;
    HermitianOperator support;
};
InverseSqrt inverse_sqrt_on_support(const HermitianOperator &a, const Config &cfg = Config::defaults());

/// Frobenius norm of AB - BA.
double commutator_norm(const HermitianOperator &a, const HermitianOperator &b);

/// Orthonormal basis (columns) in which every operator is diagonal. The
/// operators must pairwise commute; eigenvalue clusters within `cluster_tol`
/// are refined by the next operator.
CMatrix common_eigenbasis(std::span<const HermitianOperator> ops, double cluster_tol = 1e-9,
                          const Config &cfg = Config::defaults());

/// Random operators for seeded sweeps and search restarts.
namespace random_ops {
/// Haar-ish unitary from Gram-Schmidt on a complex Gaussian matrix.
CMatrix unitary(std::size_t n, CounterRng &rng);
/// G G^dagger / tr, G a complex Gaussian n x rank matrix.
HermitianOperator density(std::size_t n, CounterRng &rng, std::size_t rank = 0);
StateVector pure_ket(std::size_t n, CounterRng &rng);
HermitianOperator hermitian(std::size_t n, CounterRng &rng);
/// 0 <= Gamma <= I with eigenvalues uniform on [0, 1].
HermitianOperator effect(std::size_t n, CounterRng &rng);
}  // namespace random_ops

}  // namespace qkdsec
