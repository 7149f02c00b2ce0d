#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qkdsec/errors.h"
#include "qkdsec/logprob.h"
#include "qkdsec/riskavg.h"
#include "qkdsec/rng.h"

using namespace qkdsec;

namespace {

RiskScenario year_at_gigabit(LogProb eps) {
    return {1e9, 1000000, kSecondsPerYear, eps};
}

}  // namespace

TEST(LogProb, Arithmetic) {
    const auto a = LogProb::from_prob(0.25), b = LogProb::from_prob(0.5);
    EXPECT_EQ(a.log2(), -2.0);
    EXPECT_DOUBLE_EQ((a + b).to_double(), 0.75);
    EXPECT_DOUBLE_EQ((a * b).to_double(), 0.125);
    EXPECT_TRUE(LogProb::zero().is_zero());
    EXPECT_EQ((LogProb::zero() + a).log2(), -2.0);
    // Far below double range the sum keeps the dominant term.
    const auto tiny = LogProb::pow2_neg(1e7);
    EXPECT_EQ((tiny + LogProb::pow2_neg(50)).log2(), -50.0);
    EXPECT_EQ(tiny.to_double(), 0.0);
    EXPECT_LT(tiny, LogProb::pow2_neg(50));
}

TEST(LogProb, AgreesWithDoublesAboveUnderflow) {
    CounterRng rng(71);
    for (int t = 0; t < 1000; ++t) {
        const double la = -rng.uniform(0, 900), lb = -rng.uniform(0, 900);
        const double a = std::exp2(la), b = std::exp2(lb);
        const auto r = log2_compare(LogProb::from_log2(la), LogProb::from_log2(lb));
        const double expect = a < b ? -1.0 : (a > b ? 1.0 : 0.0);
        ASSERT_EQ(r.value("order"), expect);
        ASSERT_NEAR((LogProb::from_log2(la) + LogProb::from_log2(lb)).to_double() / (a + b), 1.0, 1e-12);
    }
}

TEST(Log2Compare, MillionBitKeyAgainstEpsSec) {
    const auto r = log2_compare(LogProb::pow2_neg(1e6), LogProb::pow2_neg(50));
    EXPECT_EQ(r.value("order"), -1.0);
    EXPECT_EQ(r.value("ratio_log2"), -(1e6 - 50));
    // 10^6 log10(2) = 301029.9957
    EXPECT_NEAR(r.value("a_log10"), -1e6 * std::log10(2.0), 1e-6);
    EXPECT_EQ(r.value("a_log10_exponent"), -301030.0);
    ASSERT_TRUE(r.contains("a_published_log10_exponent"));
    const auto &flag = r.entry("a_published_log10_exponent");
    EXPECT_TRUE(flag.flagged);
    EXPECT_EQ(flag.value, -326228.0);
}

TEST(Log2Compare, EqualInputs) {
    const auto r = log2_compare(LogProb::pow2_neg(7), LogProb::pow2_neg(7));
    EXPECT_EQ(r.value("order"), 0.0);
    EXPECT_EQ(r.value("ratio_log2"), 0.0);
    EXPECT_FALSE(r.contains("a_published_log10_exponent"));
}

TEST(Render, Scientific) {
    EXPECT_EQ(render_scientific(LogProb::pow2_neg(1e6), 6).substr(0, 9), "1.01003e-");
    EXPECT_NE(render_scientific(LogProb::pow2_neg(1e6), 3).find("e-301030"), std::string::npos);
    EXPECT_EQ(render_scientific(2.8e-5, 1), "3e-5");
}

TEST(LeakRate, YearAtGigabit) {
    const auto r = leak_rate(year_at_gigabit(LogProb::pow2_neg(50)));
    EXPECT_DOUBLE_EQ(r.value("keys"), 3.1536e10);
    EXPECT_EQ(r.value("keys_1sf"), 3e10);
    EXPECT_NEAR(r.value("expected_leaks"), 3.1536e10 * std::ldexp(1.0, -50), 1e-18);
    EXPECT_NEAR(r.value("expected_leaks"), 2.8e-5, 0.01e-5);
    EXPECT_EQ(r.value("expected_leaks_1sf"), 3e-5);
}

TEST(LeakRate, ZeroEpsUnderflowsToKeyFloor) {
    const auto r = leak_rate(year_at_gigabit(LogProb::zero()));
    EXPECT_EQ(r.value("expected_leaks"), 0.0);
    EXPECT_NEAR(r.value("expected_leaks_log2"), std::log2(3.1536e10) - 1e6, 1e-6);
}

TEST(LeakRate, LinearInDurationAndEps) {
    CounterRng rng(72);
    for (int t = 0; t < 200; ++t) {
        const double eps = std::exp2(-rng.uniform(10, 60));
        const double dur = rng.uniform(1.0, 1e8);
        const RiskScenario a{1e9, 1000000, dur, LogProb::from_prob(eps)};
        RiskScenario b = a;
        b.duration_sec = 3 * dur;
        ASSERT_NEAR(leak_rate(b).value("expected_leaks") / leak_rate(a).value("expected_leaks"), 3.0, 1e-12);
        RiskScenario c = a;
        c.epsilon_sec = LogProb::from_prob(2 * eps);
        ASSERT_NEAR(leak_rate(c).value("expected_leaks") / leak_rate(a).value("expected_leaks"), 2.0, 1e-12);
    }
}

TEST(LeakRate, Validation) {
    EXPECT_THROW(leak_rate({0.0, 1000, 1.0, LogProb::pow2_neg(50)}), ValidationError);
    EXPECT_THROW(leak_rate({1.0, 0, 1.0, LogProb::pow2_neg(50)}), ValidationError);
    EXPECT_THROW(leak_rate({1.0, 1000, -1.0, LogProb::pow2_neg(50)}), ValidationError);
}

TEST(FatalityBaseline, Examples) {
    const double f = fatality_baseline(7.5e3, 7.9e7);
    EXPECT_NEAR(f, 9.5e-5, 0.01e-5);
    EXPECT_EQ(round_sig(f, 2), 9.5e-5);
    EXPECT_EQ(fatality_baseline(0, 7.9e7), 0.0);
    EXPECT_THROW(fatality_baseline(1, 0), ValidationError);
    const double ratio = leak_rate(year_at_gigabit(LogProb::pow2_neg(50))).value("expected_leaks") / f;
    EXPECT_GT(ratio, 0.1);
    EXPECT_LT(ratio, 10.0);
}

TEST(MarkovCascade, Examples) {
    EXPECT_EQ(markov_cascade_value(1e-6, 0), 1e-6);
    // Split at t = sqrt(eps): Pr[d >= t] <= sqrt(eps), and d < t otherwise.
    EXPECT_NEAR(markov_cascade_value(1e-6, 1), 2 * std::sqrt(1e-6), 1e-18);
    EXPECT_NEAR(markov_cascade_value(1e-6, 1), 2e-3, 1e-15);
    EXPECT_NEAR(markov_cascade_value(1e-6, 2), 3e-2, 1e-15);
    const auto r = markov_cascade(1e-6, 2);
    EXPECT_NEAR(r.value("threshold_per_layer"), 1e-4, 1e-18);
    EXPECT_NEAR(r.value("exception_prob_per_layer"), 1e-2, 1e-15);
}

TEST(MarkovCascade, Validation) {
    EXPECT_THROW(markov_cascade(1.0, 1), ValidationError);
    EXPECT_THROW(markov_cascade(0.0, 1), ValidationError);
    EXPECT_THROW(markov_cascade(1.5, 0), ValidationError);
}

TEST(MarkovCascadeProperty, MonotoneAndAboveEps) {
    CounterRng rng(73);
    for (int t = 0; t < 500; ++t) {
        const double eps = std::pow(10.0, -rng.uniform(3, 15));
        double prev = eps;
        for (unsigned m = 0; m <= 6; ++m) {
            const double v = markov_cascade_value(eps, m);
            ASSERT_GE(v, eps);
            ASSERT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(MarkovTail, Saturation) {
    const std::vector<double> all_at_t(10, 0.3);
    auto r = markov_tail_demo(all_at_t, 0.3);
    EXPECT_EQ(r.value("tail_prob"), 1.0);
    EXPECT_NEAR(r.value("markov_bound"), 1.0, 1e-15);

    // Mass eps / t at t, the rest at 0: Pr[x >= t] = eps / t = mean / t.
    std::vector<double> two_point(1000, 0.0);
    for (int i = 0; i < 8; ++i) two_point[i] = 0.5;
    r = markov_tail_demo(two_point, 0.5);
    EXPECT_EQ(r.value("tail_prob"), 0.008);
    EXPECT_NEAR(r.value("markov_bound"), r.value("tail_prob"), 1e-12);
}

TEST(MarkovTail, UniformSamples) {
    CounterRng rng(74);
    std::vector<double> xs(10000);
    for (auto &x : xs) x = rng.uniform(0.0, 2.0);
    const auto r = markov_tail_demo(xs, 2.0);
    EXPECT_EQ(r.value("tail_prob"), 0.0);
    EXPECT_LE(r.value("tail_prob"), r.value("markov_bound") + 1e-12);
    EXPECT_NEAR(r.value("markov_bound"), 0.5, 0.02);
}

TEST(MarkovTail, Validation) {
    const std::vector<double> none;
    EXPECT_THROW(markov_tail_demo(none, 1.0), ValidationError);
    const std::vector<double> one{1.0};
    EXPECT_THROW(markov_tail_demo(one, 0.0), ValidationError);
    const std::vector<double> neg{-1.0};
    EXPECT_THROW(markov_tail_demo(neg, 1.0), ValidationError);
}
