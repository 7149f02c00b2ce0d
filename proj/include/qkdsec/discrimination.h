#pragma once

#include <cstddef>
#include <vector>

#include "qkdsec/config.h"
#include "qkdsec/logprob.h"
#include "qkdsec/opalg.h"
#include "qkdsec/report.h"
#include "qkdsec/states.h"

namespace qkdsec {

struct PovmElement {
    std::size_t label;
    HermitianOperator op;
};

/// Measurement with key-labelled outcomes. Elements are PSD and sum to the
/// identity within `psd_tol`. Several elements may share a label.
class Povm {
   public:
    explicit Povm(std::vector<PovmElement> elements, const Config &cfg = Config::defaults());

    std::size_t dim() const { return dim_; }
    const std::vector<PovmElement> &elements() const { return elements_; }
    /// Sum of the elements carrying `label` (zero operator if none).
    HermitianOperator effect(std::size_t label) const;
    /// True when every label in [0, n) occurs and no other label does.
    bool covers(std::size_t n) const;

   private:
    std::size_t dim_;
    std::vector<PovmElement> elements_;
};

struct EnsembleItem {
    double prob;
    HermitianOperator state;
};

/// Weighted density operators; weights sum to one.
class Ensemble {
   public:
    explicit Ensemble(std::vector<EnsembleItem> items, const Config &cfg = Config::defaults());
    const std::vector<EnsembleItem> &items() const { return items_; }
    std::size_t dim() const { return items_.front().state.dim(); }

   private:
    std::vector<EnsembleItem> items_;
};

struct HelstromResult {
    double p_guess;
    /// Projector onto the positive eigenspace of p0 rho0 - p1 rho1 (guess 0).
    HermitianOperator guess_zero;
    Povm measurement;
};

/// 1/2 + 1/2 ||p0 rho0 - p1 rho1||_1 and the measurement attaining it.
HelstromResult helstrom_optimum(const Ensemble &e, const Config &cfg = Config::defaults());

/// Report form of `helstrom_optimum`, including the achieved value of the
/// projective measurement and an achievability check.
MetricReport helstrom(const Ensemble &e, const Config &cfg = Config::defaults());

/// sum_i p_i tr[M_{label} rho_i] for an ensemble indexed by label.
double ensemble_guess_prob(const Ensemble &e, const Povm &m);

/// sum_b p_b tr[M_{ka} rho_E(b)]: probability that Eve's outcome equals
/// Alice's key.
double povm_guess_prob(const CqState &s, const Povm &m, const Config &cfg = Config::defaults());

/// Gamma = sum_k |k,k><k,k| (x) M_k on the dense (ka, kb, eve) space.
HermitianOperator build_gamma(const Povm &m, const KeySpace &keys, const Config &cfg = Config::defaults());

/// {Pr(ka), rho-bar_ka}: Eve's states conditioned on Alice's key, mixing over
/// Bob's key. Keys with zero weight get the maximally mixed state.
Ensemble induced_ensemble(const CqState &s, const Config &cfg = Config::defaults());

/// Pretty-good measurement M_k = S^-1/2 (p_k rho_k) S^-1/2, S = sum p_k rho_k,
/// inverse on the support only. The deficit I - supp(S) is added to label 0.
Povm pretty_good_measurement(const Ensemble &e, const Config &cfg = Config::defaults());

enum class GuessMethod { Helstrom, Map, PrettyGood };

struct BestGuess {
    double value;
    GuessMethod method;
    bool exact;
};

/// Eve's optimal probability of guessing Alice's key.
///
/// Two keys: Helstrom on the induced binary ensemble. Pairwise commuting
/// conditional states: classical MAP sum_e max_k Pr(k) <e|rho_k|e> in a common
/// eigenbasis, ties to the smallest key. Otherwise the pretty-good
/// measurement value, which is only a lower bound.
BestGuess best_guess(const CqState &s, const Config &cfg = Config::defaults());
MetricReport best_guess_prob(const CqState &s, const Config &cfg = Config::defaults());

/// bound = 2^-bits + D(correctify(s), ideal(sigma)), compared with the best
/// guess probability.
MetricReport guess_bound(const CqState &s, const HermitianOperator &sigma, const Config &cfg = Config::defaults());

/// Same bound for key lengths far past double range: 2^-bits + eps_sec in the
/// log domain.
MetricReport guess_bound(uint64_t key_bits, LogProb eps_sec);

const char *to_string(GuessMethod m);

}  // namespace qkdsec
