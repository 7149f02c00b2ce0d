#include "qkdsec/opalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qkdsec/errors.h"

namespace qkdsec {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ValidationError("CMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                              std::to_string(data_.size()));
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::outer(std::span<const cplx> v) {
    CMatrix m(v.size(), v.size());
    for (std::size_t r = 0; r < v.size(); ++r) {
        for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
    }
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    }
    return out;
}

cplx CMatrix::trace() const {
    cplx t = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius() const {
    double s = 0;
    for (const auto &x : data_) s += std::norm(x);
    return std::sqrt(s);
}

double CMatrix::off_diagonal_norm() const {
    double s = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            if (r != c) s += std::norm((*this)(r, c));
        }
    }
    return std::sqrt(s);
}

bool CMatrix::is_diagonal(double tol) const {
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            if (r != c && std::abs((*this)(r, c)) > tol) return false;
        }
    }
    return true;
}

CMatrix &CMatrix::operator+=(const CMatrix &o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("CMatrix +: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("CMatrix -: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

CMatrix &CMatrix::operator*=(cplx s) {
    for (auto &x : data_) x *= s;
    return *this;
}

CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    if (a.cols_ != b.rows_) throw ValidationError("CMatrix *: inner dimension mismatch");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const cplx ark = a(r, k);
            if (ark == cplx(0.0)) continue;
            const cplx *brow = &b.data_[k * b.cols_];
            cplx *orow = &out.data_[r * out.cols_];
            for (std::size_t c = 0; c < b.cols_; ++c) orow[c] += ark * brow[c];
        }
    }
    return out;
}

StateVector apply(const CMatrix &m, std::span<const cplx> v) {
    if (m.cols() != v.size()) throw ValidationError("apply: dimension mismatch");
    StateVector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        cplx s = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw ValidationError("inner: dimension mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    double m = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// ---------------------------------------------------------------------------

HermitianOperator::HermitianOperator(CMatrix m, const Config &cfg) {
    if (!m.square()) {
        throw ValidationError("HermitianOperator: matrix is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", not square");
    }
    if (m.rows() == 0) throw ValidationError("HermitianOperator: dimension must be >= 1");
    const std::size_t n = m.rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            const double dev = std::abs(m(r, c) - std::conj(m(c, r)));
            if (dev > cfg.hermitian_tol) {
                std::ostringstream os;
                os << "HermitianOperator: entry (" << r << "," << c << ") deviates from self-adjointness by " << dev;
                throw ValidationError(os.str());
            }
        }
    }
    m_ = std::move(m);
    *this = symmetrized(m_);
}

HermitianOperator HermitianOperator::symmetrized(const CMatrix &m) {
    HermitianOperator h;
    const std::size_t n = m.rows();
    h.m_ = CMatrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        h.m_(r, r) = m(r, r).real();
        for (std::size_t c = r + 1; c < n; ++c) {
            const cplx v = 0.5 * (m(r, c) + std::conj(m(c, r)));
            h.m_(r, c) = v;
            h.m_(c, r) = std::conj(v);
        }
    }
    return h;
}

HermitianOperator HermitianOperator::identity(std::size_t n) { return symmetrized(CMatrix::identity(n)); }

HermitianOperator HermitianOperator::zero(std::size_t n) { return symmetrized(CMatrix(n, n)); }

HermitianOperator HermitianOperator::diagonal(std::span<const double> d) { return symmetrized(CMatrix::diagonal(d)); }

HermitianOperator HermitianOperator::projector(std::span<const cplx> v) { return symmetrized(CMatrix::outer(v)); }

HermitianOperator &HermitianOperator::operator+=(const HermitianOperator &o) {
    m_ += o.m_;
    return *this;
}

HermitianOperator &HermitianOperator::operator-=(const HermitianOperator &o) {
    m_ -= o.m_;
    return *this;
}

HermitianOperator &HermitianOperator::operator*=(double s) {
    m_ *= s;
    return *this;
}

// ---------------------------------------------------------------------------

Spectrum eig_hermitian(const HermitianOperator &op, const Config &cfg, const std::string &label) {
    const std::size_t n = op.dim();
    CMatrix a = op.matrix();
    CMatrix v = CMatrix::identity(n);
    const double scale = a.frobenius();

    bool converged = scale == 0.0 || a.off_diagonal_norm() <= cfg.jacobi_offdiag_tol * scale;
    for (int sweep = 0; !converged && sweep < cfg.jacobi_max_sweeps; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx g = a(p, q);
                const double mag = std::abs(g);
                if (mag == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Real Jacobi rotation on the phase-stripped 2x2 block.
                const double theta = (aqq - app) / (2.0 * mag);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx ph = std::conj(g) / mag;  // e^{-i phi}
                // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
                const cplx upp = c, upq = s, uqp = -s * ph, uqq = c * ph;
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * upp + akq * uqp;
                    a(k, q) = akp * upq + akq * uqq;
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * upp + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
        converged = a.off_diagonal_norm() <= cfg.jacobi_offdiag_tol * scale;
    }
    if (!converged) {
        std::ostringstream os;
        os << "eig_hermitian: Jacobi did not converge on " << label << " (dim " << n << ", Frobenius norm " << scale
           << ") after " << cfg.jacobi_max_sweeps << " sweeps";
        throw NumericalError(os.str());
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
    Spectrum out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

double trace_norm(const HermitianOperator &a, const Config &cfg) {
    if (a.matrix().is_diagonal(0.0)) {
        double s = 0;
        for (std::size_t i = 0; i < a.dim(); ++i) s += std::abs(a(i, i).real());
        return s;
    }
    const Spectrum sp = eig_hermitian(a, cfg, "trace_norm argument");
    double s = 0;
    for (double l : sp.values) s += std::abs(l);
    return s;
}

Spectrum validate_density(const HermitianOperator &a, const Config &cfg, const std::string &label) {
    const double tr = a.trace();
    if (std::abs(tr - 1.0) > cfg.trace_tol) {
        std::ostringstream os;
        os << label << ": trace " << tr << " deviates from 1";
        throw ValidationError(os.str());
    }
    Spectrum sp = eig_hermitian(a, cfg, label);
    for (double &l : sp.values) {
        if (l < -cfg.psd_tol) {
            std::ostringstream os;
            os << label << ": negative eigenvalue " << l;
            throw ValidationError(os.str());
        }
        if (l < 0) l = 0;
    }
    return sp;
}

bool is_psd(const HermitianOperator &a, double tol, const Config &cfg) {
    const Spectrum sp = eig_hermitian(a, cfg, "positivity check");
    return sp.values.empty() || sp.values.back() >= -tol;
}

double fidelity(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg) {
    if (a.dim() != b.dim()) throw ValidationError("fidelity: dimension mismatch");
    const Spectrum sa = validate_density(a, cfg, "fidelity first argument");
    const Spectrum sb = validate_density(b, cfg, "fidelity second argument");
    auto rank = [&](const Spectrum &s) {
        return static_cast<std::size_t>(
            std::count_if(s.values.begin(), s.values.end(), [&](double l) { return l > cfg.support_tol; }));
    };
    const bool swap = rank(sa) < rank(sb);
    const HermitianOperator &other = swap ? b : a;
    const Spectrum &sup = swap ? sa : sb;
    const std::size_t n = a.dim();
    const std::size_t r = rank(sup);

    // W D^{1/2}: support eigenvectors scaled by sqrt(eigenvalue).
    CMatrix w(n, r);
    for (std::size_t k = 0; k < r; ++k) {
        const double sq = std::sqrt(sup.values[k]);
        for (std::size_t i = 0; i < n; ++i) w(i, k) = sup.vectors(i, k) * sq;
    }
    const CMatrix inner_block = w.adjoint() * other.matrix() * w;
    const Spectrum sn = eig_hermitian(HermitianOperator::symmetrized(inner_block), cfg, "fidelity kernel");
    const double top = sn.values.empty() ? 0.0 : std::max(sn.values.front(), 0.0);
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(top, 1e-300);
    double f = 0;
    for (double l : sn.values) {
        if (l > noise) f += std::sqrt(l);
    }
    return f;
}

HermitianOperator tensor(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg) {
    const std::size_t da = a.dim(), db = b.dim();
    if (db != 0 && da > cfg.dim_cap / db) {
        throw ResourceError("tensor: dimension " + std::to_string(da) + "*" + std::to_string(db) + " exceeds cap " +
                            std::to_string(cfg.dim_cap));
    }
    const std::size_t n = da * db;
    CMatrix out(n, n);
    for (std::size_t i = 0; i < da; ++i) {
        for (std::size_t j = 0; j < da; ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0)) continue;
            for (std::size_t k = 0; k < db; ++k) {
                for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = aij * b(k, l);
            }
        }
    }
    return HermitianOperator::symmetrized(out);
}

StateVector tensor(std::span<const cplx> a, std::span<const cplx> b) {
    StateVector out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) out[i * b.size() + k] = a[i] * b[k];
    }
    return out;
}

HermitianOperator partial_trace(const HermitianOperator &a, std::span<const std::size_t> dims,
                                std::span<const std::size_t> keep) {
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw ValidationError("partial_trace: zero subsystem dimension");
        total *= d;
    }
    if (total != a.dim()) {
        throw ValidationError("partial_trace: subsystem dimensions multiply to " + std::to_string(total) +
                              ", operator has dimension " + std::to_string(a.dim()));
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) throw ValidationError("partial_trace: keep index " + std::to_string(k) + " out of range");
        if (kept[k]) throw ValidationError("partial_trace: duplicate keep index " + std::to_string(k));
        kept[k] = true;
    }

    std::vector<std::size_t> stride(dims.size());
    std::size_t s = 1;
    for (std::size_t i = dims.size(); i-- > 0;) {
        stride[i] = s;
        s *= dims[i];
    }
    // Offsets into the full index for every multi-index over a subset of
    // factors, in row-major order of that subset.
    auto offsets = [&](bool want_kept) {
        std::vector<std::size_t> off{0};
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (kept[i] != want_kept) continue;
            std::vector<std::size_t> next;
            next.reserve(off.size() * dims[i]);
            for (std::size_t base : off) {
                for (std::size_t d = 0; d < dims[i]; ++d) next.push_back(base + d * stride[i]);
            }
            off = std::move(next);
        }
        return off;
    };
    const auto ko = offsets(true);
    const auto to = offsets(false);
    CMatrix out(ko.size(), ko.size());
    for (std::size_t i = 0; i < ko.size(); ++i) {
        for (std::size_t j = 0; j < ko.size(); ++j) {
            cplx acc = 0;
            for (std::size_t t : to) acc += a(ko[i] + t, ko[j] + t);
            out(i, j) = acc;
        }
    }
    return HermitianOperator::symmetrized(out);
}

HermitianOperator positive_projector(const HermitianOperator &a, double tol, const Config &cfg) {
    const Spectrum sp = eig_hermitian(a, cfg, "positive_projector argument");
    return sp.map([tol](double l) { return l > tol ? 1.0 : 0.0; });
}

InverseSqrt inverse_sqrt_on_support(const HermitianOperator &a, const Config &cfg) {
    const Spectrum sp = eig_hermitian(a, cfg, "inverse_sqrt argument");
    const double tol = cfg.support_tol;
    return {sp.map([tol](double l) { return l > tol ? 1.0 / std::sqrt(l) : 0.0; }),
            sp.map([tol](double l) { return l > tol ? 1.0 : 0.0; })};
}

double commutator_norm(const HermitianOperator &a, const HermitianOperator &b) {
    return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).frobenius();
}

CMatrix common_eigenbasis(std::span<const HermitianOperator> ops, double cluster_tol, const Config &cfg) {
    if (ops.empty()) throw ValidationError("common_eigenbasis: no operators");
    const std::size_t n = ops.front().dim();
    bool all_diag = true;
    for (const auto &op : ops) {
        if (op.dim() != n) throw ValidationError("common_eigenbasis: dimension mismatch");
        all_diag = all_diag && op.matrix().is_diagonal(0.0);
    }
    if (all_diag) return CMatrix::identity(n);

    std::vector<CMatrix> blocks{CMatrix::identity(n)};
    for (const auto &op : ops) {
        std::vector<CMatrix> refined;
        for (const CMatrix &vb : blocks) {
            if (vb.cols() == 1) {
                refined.push_back(vb);
                continue;
            }
            const CMatrix restricted = vb.adjoint() * op.matrix() * vb;
            const Spectrum sp = eig_hermitian(HermitianOperator::symmetrized(restricted), cfg, "common basis block");
            std::size_t start = 0;
            while (start < sp.values.size()) {
                std::size_t end = start + 1;
                while (end < sp.values.size() && sp.values[end - 1] - sp.values[end] <= cluster_tol) ++end;
                CMatrix cols(vb.cols(), end - start);
                for (std::size_t r = 0; r < vb.cols(); ++r) {
                    for (std::size_t k = start; k < end; ++k) cols(r, k - start) = sp.vectors(r, k);
                }
                refined.push_back(vb * cols);
                start = end;
            }
        }
        blocks = std::move(refined);
    }
    CMatrix basis(n, n);
    std::size_t col = 0;
    for (const CMatrix &b : blocks) {
        for (std::size_t k = 0; k < b.cols(); ++k, ++col) {
            for (std::size_t r = 0; r < n; ++r) basis(r, col) = b(r, k);
        }
    }
    return basis;
}

namespace random_ops {

namespace {
CMatrix gaussian(std::size_t rows, std::size_t cols, CounterRng &rng) {
    CMatrix g(rows, cols);
    for (auto &x : g.data()) x = cplx(rng.normal(), rng.normal());
    return g;
}
}  // namespace

CMatrix unitary(std::size_t n, CounterRng &rng) {
    CMatrix g = gaussian(n, n, rng);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            cplx proj = 0;
            for (std::size_t r = 0; r < n; ++r) proj += std::conj(g(r, j)) * g(r, k);
            for (std::size_t r = 0; r < n; ++r) g(r, k) -= proj * g(r, j);
        }
        double nrm = 0;
        for (std::size_t r = 0; r < n; ++r) nrm += std::norm(g(r, k));
        nrm = std::sqrt(nrm);
        for (std::size_t r = 0; r < n; ++r) g(r, k) /= nrm;
    }
    return g;
}

HermitianOperator density(std::size_t n, CounterRng &rng, std::size_t rank) {
    if (rank == 0 || rank > n) rank = n;
    const CMatrix g = gaussian(n, rank, rng);
    CMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return HermitianOperator::symmetrized(rho);
}

StateVector pure_ket(std::size_t n, CounterRng &rng) {
    StateVector v(n);
    double nrm = 0;
    for (auto &x : v) {
        x = cplx(rng.normal(), rng.normal());
        nrm += std::norm(x);
    }
    nrm = std::sqrt(nrm);
    for (auto &x : v) x /= nrm;
    return v;
}

HermitianOperator hermitian(std::size_t n, CounterRng &rng) {
    const CMatrix g = gaussian(n, n, rng);
    return HermitianOperator::symmetrized(g + g.adjoint());
}

HermitianOperator effect(std::size_t n, CounterRng &rng) {
    const CMatrix u = unitary(n, rng);
    std::vector<double> d(n);
    for (auto &x : d) x = rng.uniform();
    return HermitianOperator::symmetrized(u * CMatrix::diagonal(d) * u.adjoint());
}

}  // namespace random_ops

}  // namespace qkdsec
