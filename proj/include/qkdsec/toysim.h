#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "qkdsec/config.h"
#include "qkdsec/report.h"
#include "qkdsec/states.h"

namespace qkdsec {

enum class PrivacyAmplification { None, Parity };

struct Bb84Config {
    /// Rounds kept in the key. With `sift` set these are sifted rounds.
    unsigned rounds = 1;
    /// Probability that Eve intercepts a given round.
    double intercept_prob = 0.0;
    /// Condition every round on Alice's and Bob's bases matching.
    bool sift = true;
    PrivacyAmplification pa_mode = PrivacyAmplification::None;

    void validate() const;
    unsigned key_bits() const { return pa_mode == PrivacyAmplification::Parity ? 1 : rounds; }
};

/// Eve's per-round record: 0 for a round she left alone, otherwise
/// 1 + 2 * basis + outcome (basis 0 = Z, 1 = X).
inline constexpr std::size_t kEveSymbolsPerRound = 5;

/// One fully specified history of all rounds.
struct Bb84Record {
    std::size_t key_a;
    std::size_t key_b;
    /// Base-5 digits of Eve's per-round symbols, round 0 most significant.
    std::size_t eve_record;
    double weight;
    /// Rounds where Alice's and Bob's sifted bits differ.
    unsigned bit_errors;
};

/// Every history with nonzero weight. Weights are products of 1/2, q and
/// 1 - q, so they are exact for dyadic q. No dimension cap applies.
std::vector<Bb84Record> enumerate_bb84(const Bb84Config &c);

/// Streams the same histories depth-first without storing them.
void for_each_bb84(const Bb84Config &c, const std::function<void(const Bb84Record &)> &visit);

struct SimOutcome {
    CqState state;
    double qber;
    /// Probability that a raw round survives sifting.
    double sifted_fraction;
};

/// Intercept-resend BB84 as a cq-state with a diagonal Eve register of
/// dimension 5^rounds. Throws ResourceError past `dim_cap`.
SimOutcome simulate_bb84(const Bb84Config &c, const Config &cfg = Config::defaults());

/// Runs the simulation, then epsilon_decomposition, guess_bound and
/// best_guess_prob at sigma = sigma_avg.
MetricReport pipeline_report(const Bb84Config &c, const Config &cfg = Config::defaults());

}  // namespace qkdsec
