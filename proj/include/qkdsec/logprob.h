#pragma once

#include <compare>
#include <string>

namespace qkdsec {

/// Probability stored as its base-2 logarithm. Zero is -infinity.
class LogProb {
   public:
    LogProb() = default;
    static LogProb from_log2(double log2_value) { return LogProb(log2_value); }
    /// Throws ValidationError for negative or non-finite p.
    static LogProb from_prob(double p);
    /// 2^{-bits}
    static LogProb pow2_neg(double bits) { return LogProb(-bits); }
    static LogProb zero();

    double log2() const { return log2_; }
    double log10() const;
    /// Underflows to 0 below about 2^-1074.
    double to_double() const;
    bool is_zero() const;

    /// Sum via log-sum-exp with the dominant term factored out.
    friend LogProb operator+(LogProb a, LogProb b);
    friend LogProb operator*(LogProb a, LogProb b) { return LogProb(a.log2_ + b.log2_); }
    friend LogProb operator*(LogProb a, double scale);
    friend std::partial_ordering operator<=>(LogProb a, LogProb b) { return a.log2_ <=> b.log2_; }
    friend bool operator==(LogProb a, LogProb b) { return a.log2_ == b.log2_; }

   private:
    explicit LogProb(double l) : log2_(l) {}
    double log2_ = 0.0;
};

/// m x 10^e with 1 <= m < 10, from a log10 value.
struct Decimal {
    double mantissa;
    long long exponent;
};
Decimal to_decimal(double log10_value);

/// "m.mmme-E" style rendering with `sig` significant figures; works for
/// exponents beyond double range.
std::string render_scientific(LogProb p, int sig);
std::string render_scientific(double v, int sig);

}  // namespace qkdsec
