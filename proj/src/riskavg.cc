#include "qkdsec/riskavg.h"

#include <cmath>
#include <string>
#include <utility>

#include "qkdsec/errors.h"

namespace qkdsec {

void RiskScenario::validate() const {
    if (!(key_rate_bits_per_sec > 0) || !std::isfinite(key_rate_bits_per_sec)) {
        throw ValidationError("RiskScenario: key_rate_bits_per_sec must be positive");
    }
    if (key_len_bits == 0) throw ValidationError("RiskScenario: key_len_bits must be positive");
    if (!(duration_sec > 0) || !std::isfinite(duration_sec)) {
        throw ValidationError("RiskScenario: duration_sec must be positive");
    }
    if (epsilon_sec.log2() > 0 || std::isnan(epsilon_sec.log2())) {
        throw ValidationError("RiskScenario: epsilon_sec must be a probability");
    }
}

double round_sig(double v, int sig) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double e = std::floor(std::log10(std::abs(v)));
    const double scale = std::pow(10.0, sig - 1 - e);
    return std::round(v * scale) / scale;
}

MetricReport log2_compare(LogProb a, LogProb b) {
    const int order = a < b ? -1 : (a > b ? 1 : 0);
    const Decimal da = to_decimal(a.log10());
    const Decimal db = to_decimal(b.log10());
    MetricReport r;
    r.add("order", order, "riskavg.log2_compare: sign(log2 a - log2 b)");
    r.add("a_log2", a.log2(), "riskavg.log2_compare");
    r.add("b_log2", b.log2(), "riskavg.log2_compare");
    r.add("ratio_log2", a.log2() - b.log2(), "riskavg.log2_compare: log2(a / b)");
    r.add("a_log10", a.log10(), "riskavg.log2_compare: log2 a * log10(2)");
    r.add("b_log10", b.log10(), "riskavg.log2_compare: log2 b * log10(2)");
    r.add("a_log10_exponent", static_cast<double>(da.exponent), "riskavg.log2_compare: a = m x 10^e, 1 <= m < 10");
    r.add("a_log10_mantissa", da.mantissa, "riskavg.log2_compare: a = m x 10^e, 1 <= m < 10");
    r.add("b_log10_exponent", static_cast<double>(db.exponent), "riskavg.log2_compare: b = m x 10^e, 1 <= m < 10");
    r.add("b_log10_mantissa", db.mantissa, "riskavg.log2_compare: b = m x 10^e, 1 <= m < 10");
    // The widely quoted figure for 2^-(10^6) has a different exponent; surface
    // it rather than adopt it.
    for (auto [tag, p] : {std::pair{"a", a}, std::pair{"b", b}}) {
        if (p.log2() == -1e6) {
            const double computed = std::floor(p.log10());
            r.add(std::string(tag) + "_published_log10_exponent", static_cast<double>(kPublishedLog10OfTwoPowMinusMillion),
                  "riskavg.log2_compare: published exponent for 2^-(10^6) disagrees with computed " +
                      std::to_string(static_cast<long long>(computed)) + "; computed value is used",
                  true);
        }
    }
    return r;
}

MetricReport leak_rate(const RiskScenario &s) {
    s.validate();
    const double keys = s.key_rate_bits_per_sec * s.duration_sec / static_cast<double>(s.key_len_bits);
    const LogProb per_key = s.epsilon_sec + LogProb::pow2_neg(static_cast<double>(s.key_len_bits));
    const LogProb leaks_log = per_key * keys;
    const double leaks = leaks_log.to_double();
    MetricReport r;
    r.add("keys", keys, "riskavg.leak_rate: rate * duration / key_len");
    r.add("keys_1sf", round_sig(keys, 1), "riskavg.leak_rate: keys to one significant figure");
    r.add("per_key_guess_log2", per_key.log2(), "riskavg.leak_rate: log2(eps_sec + 2^-key_len)");
    r.add("expected_leaks", leaks, "riskavg.leak_rate: keys * (eps_sec + 2^-key_len)");
    r.add("expected_leaks_log2", leaks_log.log2(), "riskavg.leak_rate: log domain");
    r.add("expected_leaks_1sf", round_sig(leaks, 1), "riskavg.leak_rate: expected_leaks to one significant figure");
    return r;
}

double fatality_baseline(double fatalities, double fleet) {
    if (!(fleet > 0)) throw ValidationError("fatality_baseline: fleet must be positive");
    if (!(fatalities >= 0)) throw ValidationError("fatality_baseline: fatalities must be >= 0");
    return fatalities / fleet;
}

double markov_cascade_value(double avg_bound, unsigned layers) {
    if (!(avg_bound > 0.0) || !(avg_bound < 1.0)) {
        throw ValidationError("markov_cascade: average bound must lie in (0, 1)");
    }
    const double m1 = static_cast<double>(layers) + 1.0;
    return m1 * std::pow(avg_bound, 1.0 / m1);
}

MetricReport markov_cascade(double avg_bound, unsigned layers) {
    const double value = markov_cascade_value(avg_bound, layers);
    const double m1 = static_cast<double>(layers) + 1.0;
    MetricReport r;
    r.add("cascade", value, "riskavg.markov_cascade: (m + 1) eps^{1/(m + 1)}");
    r.add("layers", layers, "riskavg.markov_cascade: number of averages peeled");
    r.add("threshold_per_layer", std::pow(avg_bound, layers / m1),
          "riskavg.markov_cascade: Markov threshold t = eps^{m/(m + 1)}");
    r.add("exception_prob_per_layer", std::pow(avg_bound, 1.0 / m1),
          "riskavg.markov_cascade: Pr[d >= t] <= eps / t = eps^{1/(m + 1)}");
    r.add("inflation", value / avg_bound, "riskavg.markov_cascade: cascade / eps");
    return r;
}

MetricReport markov_tail_demo(std::span<const double> samples, double threshold) {
    if (samples.empty()) throw ValidationError("markov_tail_demo: empty sample set");
    if (!(threshold > 0)) throw ValidationError("markov_tail_demo: threshold must be positive");
    double sum = 0, comp = 0;
    std::size_t above = 0;
    for (double x : samples) {
        if (!(x >= 0)) throw ValidationError("markov_tail_demo: samples must be nonnegative");
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        if (x >= threshold) ++above;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = (sum + comp) / n;
    const double empirical = static_cast<double>(above) / n;
    const double bound = mean / threshold;
    const bool ok = empirical <= bound + 1e-12;
    MetricReport r;
    r.add("mean", mean, "riskavg.markov_tail_demo: empirical mean");
    r.add("tail_prob", empirical, "riskavg.markov_tail_demo: empirical Pr[x >= t]");
    r.add("markov_bound", bound, "riskavg.markov_tail_demo: mean / t");
    r.add("slack", bound - empirical, "riskavg.markov_tail_demo: bound - empirical");
    r.add("check_markov", ok ? 1.0 : 0.0, "riskavg.markov_tail_demo: empirical <= bound + 1e-12", !ok);
    return r;
}

}  // namespace qkdsec
