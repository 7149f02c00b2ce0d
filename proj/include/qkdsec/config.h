#pragma once

#include <cstddef>
#include <cstdint>

namespace qkdsec {

/// Numerical tolerances and resource limits shared by every module.
///
/// Functions take a `const Config &` defaulted to `Config::defaults()`, so a
/// caller (the CLI, an acceptance run) can tighten or relax everything in one
/// place.
struct Config {
    /// Largest |A_ij - conj(A_ji)| accepted for a Hermitian operator.
    double hermitian_tol = 1e-12;
    /// Jacobi stops once the off-diagonal Frobenius norm drops below this
    /// fraction of the full Frobenius norm.
    double jacobi_offdiag_tol = 1e-13;
    int jacobi_max_sweeps = 100;
    /// Eigenvalues in [-psd_tol, 0) are clamped to zero; below that a density
    /// operator is rejected.
    double psd_tol = 1e-10;
    double trace_tol = 1e-8;
    /// Probability vectors must sum to one within this.
    double prob_sum_tol = 1e-12;
    /// Eigenvalues below this are outside the support (pseudo-inverses,
    /// fidelity on the support of the lower-rank argument).
    double support_tol = 1e-12;
    /// Commutator Frobenius norm below which operators count as commuting.
    double commute_tol = 1e-10;
    /// Cap on any dense operator dimension, including size^2 * eve_dim.
    std::size_t dim_cap = 4096;

    static const Config &defaults() {
        static const Config cfg{};
        return cfg;
    }
};

}  // namespace qkdsec
