#pragma once

#include <cstdint>

#include "qkdsec/config.h"
#include "qkdsec/opalg.h"
#include "qkdsec/report.h"
#include "qkdsec/states.h"

namespace qkdsec {

/// 1/2 ||a - b||_1 on dense operators.
double trace_distance(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg = Config::defaults());

/// Blockwise 1/2 sum_{ka,kb} ||p1 rho1 - p2 rho2||_1; a pair missing on one
/// side contributes the other side's trace norm.
double trace_distance(const CqState &a, const CqState &b, const Config &cfg = Config::defaults());

/// Same quantity through `to_density`; for cross-checking the blockwise path.
double trace_distance_dense(const CqState &a, const CqState &b, const Config &cfg = Config::defaults());

/// eps_cor = Pr[ka != kb], eps_sec = D(zeta, ideal(sigma)), total = D(rho,
/// ideal(sigma)), and whether total <= eps_cor + eps_sec. Also reports
/// D(rho, zeta), the quantity eps_cor actually bounds.
MetricReport epsilon_decomposition(const CqState &rho, const HermitianOperator &sigma,
                                   const Config &cfg = Config::defaults());

/// 1/2 sum_k |P(k) - 2^{-bits}| for P Alice's marginal after correctify, with
/// the check that it does not exceed D(zeta, ideal(sigma)).
MetricReport statistical_distance_lb(const CqState &s, const HermitianOperator &sigma,
                                     const Config &cfg = Config::defaults());

/// Trace distance D, root fidelity F, the upper bound sqrt(1 - F^2) and the
/// companion lower bound 1 - F.
MetricReport fvg_bounds(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg = Config::defaults());

/// Compares, for a key-agreeing state zeta:
///   L13 = sqrt(1 - F(zeta, |psi><psi| (x) sigma)^2)
///   L15 = sqrt(1 - <psi| tr_E zeta |psi>)
///   D   = D(zeta, ideal(sigma))
/// with |psi> the maximally correlated key vector. Checks L15 <= L13 and
/// D <= L13, and records whether L13 == L15 within 1e-8.
///
/// Throws ValidationError if any branch has ka != kb.
MetricReport koashi_chain_check(const CqState &zeta, const HermitianOperator &sigma,
                                const Config &cfg = Config::defaults());

/// Trace distance to the ideal state at sigma = sigma_avg(s), next to a local
/// search over all density operators sigma. The search result is a local
/// minimum, hence an upper bound on the sigma-minimized distance.
///
/// The search is projected coordinate descent: sigma moves along a traceless
/// Hermitian basis with step halving, and each step is projected back onto
/// the density operators by projecting its eigenvalues onto the simplex. One
/// run starts at sigma_avg and `restarts` more from seeded random states.
MetricReport min_sigma_trace_distance(const CqState &s, std::size_t restarts, uint64_t seed = 0,
                                      const Config &cfg = Config::defaults());

/// Closest density operator in Frobenius norm: eigenvalues projected onto the
/// probability simplex.
HermitianOperator project_to_density(const HermitianOperator &a, const Config &cfg = Config::defaults());

}  // namespace qkdsec
