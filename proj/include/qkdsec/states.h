#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qkdsec/config.h"
#include "qkdsec/opalg.h"

namespace qkdsec {

/// Key register of `bits` bits. Keys are the integers 0..size-1; bit 0 of the
/// key string is the most significant bit of the index.
class KeySpace {
   public:
    explicit KeySpace(unsigned bits, const Config &cfg = Config::defaults());

    unsigned bits() const { return bits_; }
    std::size_t size() const { return std::size_t{1} << bits_; }
    /// 2^{-bits}
    double uniform_prob() const { return 1.0 / static_cast<double>(size()); }

    friend bool operator==(const KeySpace &, const KeySpace &) = default;

   private:
    unsigned bits_;
};

/// Probability vector over a finite alphabet (usually a key space).
class ClassicalDistribution {
   public:
    explicit ClassicalDistribution(std::vector<double> probs, const Config &cfg = Config::defaults());

    static ClassicalDistribution uniform(std::size_t n);
    static ClassicalDistribution point_mass(std::size_t n, std::size_t at);

    std::size_t support() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double> &probs() const { return probs_; }
    bool is_point_mass() const;

   private:
    std::vector<double> probs_;
};

struct CqBranch {
    std::size_t key_a;
    std::size_t key_b;
    double prob;
    HermitianOperator eve_op;
};

enum class KeySide { A, B };

/// Classical-quantum state sum_b p_b |ka,kb><ka,kb| (x) rho_E(ka,kb).
///
/// Branches are kept sorted by (key_a, key_b); at most one branch per pair.
/// Dense `to_density` is only built on demand.
class CqState {
   public:
    CqState(KeySpace keys, std::size_t eve_dim, std::vector<CqBranch> branches, const Config &cfg = Config::defaults());

    const KeySpace &keys() const { return keys_; }
    std::size_t eve_dim() const { return eve_dim_; }
    const std::vector<CqBranch> &branches() const { return branches_; }
    /// size^2 * eve_dim
    std::size_t total_dim() const { return keys_.size() * keys_.size() * eve_dim_; }
    /// Pr[key_a != key_b]
    double mismatch_prob() const;
    bool keys_agree() const;

   private:
    KeySpace keys_;
    std::size_t eve_dim_;
    std::vector<CqBranch> branches_;
};

/// Dense operator on (key_a, key_b, eve), key_a the most significant factor.
HermitianOperator to_density(const CqState &s, const Config &cfg = Config::defaults());

/// sum_k 2^{-bits} |k,k><k,k| (x) sigma
CqState ideal_state(const KeySpace &keys, const HermitianOperator &sigma, const Config &cfg = Config::defaults());

/// Overwrites Bob's key with Alice's. Branches landing on the same (k, k)
/// merge into their probability-weighted mixture.
CqState correctify(const CqState &s, const Config &cfg = Config::defaults());

/// sum_b p_b rho_E(b): Eve's reduced state.
HermitianOperator sigma_avg(const CqState &s);

ClassicalDistribution key_marginal(const CqState &s, KeySide side, const Config &cfg = Config::defaults());

/// sum_k 2^{-bits/2} |k,k>, a vector of dimension size^2.
StateVector max_entangled_ket(const KeySpace &keys, const Config &cfg = Config::defaults());

/// Index of |ka, kb, e> in the dense ordering used by `to_density`.
inline std::size_t joint_index(std::size_t key_size, std::size_t eve_dim, std::size_t ka, std::size_t kb,
                               std::size_t e) {
    return (ka * key_size + kb) * eve_dim + e;
}

}  // namespace qkdsec
