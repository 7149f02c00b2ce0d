#pragma once

#include <cstdint>
#include <span>

#include "qkdsec/logprob.h"
#include "qkdsec/report.h"

namespace qkdsec {

/// 365 days of continuous operation.
inline constexpr double kSecondsPerYear = 3.1536e7;

/// Published decimal exponent for 2^-(10^6) that direct computation does not
/// reproduce; kept so reports can flag the disagreement.
inline constexpr long long kPublishedLog10OfTwoPowMinusMillion = -326228;

struct RiskScenario {
    double key_rate_bits_per_sec;
    uint64_t key_len_bits;
    double duration_sec;
    LogProb epsilon_sec;

    /// Throws ValidationError unless every field is positive.
    void validate() const;
};

/// Ordering of a and b decided on log2 values, plus log2/log10 renderings.
/// `order` is -1, 0, +1 for a < b, a == b, a > b.
MetricReport log2_compare(LogProb a, LogProb b);

/// keys = rate * duration / key_len; expected leaks = keys * (eps_sec +
/// 2^-key_len), the power term kept in the log domain.
MetricReport leak_rate(const RiskScenario &r);

/// fatalities / fleet. Throws ValidationError for an empty fleet.
double fatality_baseline(double fatalities, double fleet);

/// (layers + 1) * avg_bound^{1/(layers + 1)}: the per-instance bound left after
/// peeling `layers` averages with Markov's inequality at threshold
/// avg_bound^{m/(m+1)} each.
MetricReport markov_cascade(double avg_bound, unsigned layers);
double markov_cascade_value(double avg_bound, unsigned layers);

/// Empirical mean, empirical Pr[x >= t] and the Markov bound mean / t.
MetricReport markov_tail_demo(std::span<const double> samples, double threshold);

/// Round to `sig` significant figures.
double round_sig(double v, int sig);

}  // namespace qkdsec
