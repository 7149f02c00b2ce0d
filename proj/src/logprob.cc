#include "qkdsec/logprob.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qkdsec/errors.h"

namespace qkdsec {

LogProb LogProb::from_prob(double p) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("LogProb: probability must be finite and >= 0");
    return LogProb(p == 0.0 ? -std::numeric_limits<double>::infinity() : std::log2(p));
}

LogProb LogProb::zero() { return LogProb(-std::numeric_limits<double>::infinity()); }

bool LogProb::is_zero() const { return std::isinf(log2_) && log2_ < 0; }

double LogProb::log10() const { return log2_ * std::numbers::ln2 / std::numbers::ln10; }

double LogProb::to_double() const { return std::exp2(log2_); }

LogProb operator+(LogProb a, LogProb b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double hi = std::max(a.log2_, b.log2_);
    const double lo = std::min(a.log2_, b.log2_);
    // hi + log2(1 + 2^{lo - hi}); the correction is exactly 0 once lo - hi
    // is below about -1075.
    return LogProb(hi + std::log1p(std::exp2(lo - hi)) / std::numbers::ln2);
}

LogProb operator*(LogProb a, double scale) {
    if (scale < 0.0) throw ValidationError("LogProb: negative scale");
    if (scale == 0.0) return LogProb::zero();
    return LogProb(a.log2_ + std::log2(scale));
}

Decimal to_decimal(double log10_value) {
    const double e = std::floor(log10_value);
    double m = std::pow(10.0, log10_value - e);
    long long exponent = static_cast<long long>(e);
    if (m >= 10.0) {
        m /= 10.0;
        ++exponent;
    }
    return {m, exponent};
}

std::string render_scientific(LogProb p, int sig) {
    if (p.is_zero()) return "0";
    Decimal d = to_decimal(p.log10());
    // Round the mantissa first so 9.96 at 2 figures becomes 1.0e(E+1).
    const double scale = std::pow(10.0, sig - 1);
    double m = std::round(d.mantissa * scale) / scale;
    if (m >= 10.0) {
        m /= 10.0;
        ++d.exponent;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fe%lld", sig - 1, m, d.exponent);
    return buf;
}

std::string render_scientific(double v, int sig) {
    if (v == 0.0) return "0";
    const std::string body = render_scientific(LogProb::from_prob(std::abs(v)), sig);
    return v < 0 ? "-" + body : body;
}

}  // namespace qkdsec
