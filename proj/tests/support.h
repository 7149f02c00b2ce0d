#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qkdsec/opalg.h"
#include "qkdsec/rng.h"
#include "qkdsec/states.h"

namespace qkdsec::testing {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline StateVector ket0() { return {1.0, 0.0}; }
inline StateVector ket1() { return {0.0, 1.0}; }
inline StateVector ket_plus() { return {kInvSqrt2, kInvSqrt2}; }

inline HermitianOperator proj(const StateVector &v) { return HermitianOperator::projector(v); }

inline HermitianOperator diag(std::vector<double> d) { return HermitianOperator::diagonal(d); }

inline HermitianOperator from_rows(std::size_t n, std::vector<cplx> entries) {
    return HermitianOperator(CMatrix(n, n, std::move(entries)));
}

/// Uniform 1-bit key with Eve holding |0> for key 0 and |+> for key 1.
inline CqState binary_example() {
    return CqState(KeySpace(1), 2, {{0, 0, 0.5, proj(ket0())}, {1, 1, 0.5, proj(ket_plus())}});
}

/// Random probability vector with a few exact zeros when `sparse`.
inline std::vector<double> random_probs(std::size_t n, CounterRng &rng, bool sparse = false) {
    std::vector<double> p(n);
    double total = 0.0;
    for (auto &x : p) {
        x = (sparse && rng.uniform() < 0.25) ? 0.0 : -std::log(1.0 - rng.uniform());
        total += x;
    }
    if (total == 0.0) {
        p[rng.below(n)] = 1.0;
        return p;
    }
    for (auto &x : p) x /= total;
    return p;
}

/// U diag(d) U^dagger with d a random probability vector.
inline HermitianOperator rotated_diagonal(const CMatrix &u, CounterRng &rng) {
    const std::size_t n = u.rows();
    const auto d = random_probs(n, rng);
    CMatrix m(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < n; ++k) m(r, c) += u(r, k) * d[k] * std::conj(u(c, k));
    return HermitianOperator::symmetrized(m);
}

struct CqOptions {
    unsigned max_bits = 2;
    std::size_t max_eve_dim = 4;
    /// Only key-agreeing branches.
    bool agree = false;
    /// Eve's operators share one random eigenbasis.
    bool commuting = false;
};

/// Random cq-state: a random subset of (ka, kb) pairs with random weights and
/// random conditional states of random rank.
inline CqState random_cq_state(CounterRng &rng, const CqOptions &opt = {}) {
    const unsigned bits = 1 + static_cast<unsigned>(rng.below(opt.max_bits));
    const std::size_t eve_dim = 1 + rng.below(opt.max_eve_dim);
    const KeySpace keys(bits);
    const std::size_t size = keys.size();
    const CMatrix u = random_ops::unitary(eve_dim, rng);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = 0; b < size; ++b)
            if ((!opt.agree || a == b) && rng.uniform() < 0.7) pairs.emplace_back(a, b);
    if (pairs.empty()) pairs.emplace_back(0, 0);

    const auto w = random_probs(pairs.size(), rng);
    std::vector<CqBranch> branches;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        HermitianOperator op = opt.commuting
                                   ? rotated_diagonal(u, rng)
                                   : random_ops::density(eve_dim, rng, 1 + rng.below(eve_dim));
        branches.push_back({pairs[i].first, pairs[i].second, w[i], std::move(op)});
    }
    return CqState(keys, eve_dim, std::move(branches));
}

/// Closed-form eigenvalues of a 2x2 Hermitian matrix, larger first.
inline std::pair<double, double> eig2(const HermitianOperator &a) {
    const double p = a(0, 0).real(), q = a(1, 1).real();
    const double off = std::abs(a(0, 1));
    const double mid = 0.5 * (p + q);
    const double rad = std::sqrt(0.25 * (p - q) * (p - q) + off * off);
    return {mid + rad, mid - rad};
}

/// Frobenius distance between two operators.
inline double frob_diff(const HermitianOperator &a, const HermitianOperator &b) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) s += std::norm(a(r, c) - b(r, c));
    return std::sqrt(s);
}

/// tr[A B] computed entrywise.
inline double trace_product(const HermitianOperator &a, const HermitianOperator &b) {
    cplx s = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) s += a(r, c) * b(c, r);
    return s.real();
}

}  // namespace qkdsec::testing
