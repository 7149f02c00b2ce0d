#include <gtest/gtest.h>

#include <cmath>

#include "qkdsec/coupling.h"
#include "qkdsec/errors.h"
#include "support.h"

using namespace qkdsec;
using namespace qkdsec::testing;

namespace {

double sd_oracle(const std::vector<double> &p, const std::vector<double> &u) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - u[i]);
    return 0.5 * s;
}

/// Random coupling of (p, u) by alternately rescaling rows and columns of a
/// random positive table.
std::vector<double> sinkhorn(const std::vector<double> &p, const std::vector<double> &u, CounterRng &rng) {
    const std::size_t n = p.size();
    std::vector<double> t(n * n);
    for (auto &x : t) x = 0.05 + rng.uniform();
    for (int it = 0; it < 2000; ++it) {
        for (std::size_t r = 0; r < n; ++r) {
            double s = 0;
            for (std::size_t c = 0; c < n; ++c) s += t[r * n + c];
            for (std::size_t c = 0; c < n; ++c) t[r * n + c] *= s > 0 ? p[r] / s : 0.0;
        }
        for (std::size_t c = 0; c < n; ++c) {
            double s = 0;
            for (std::size_t r = 0; r < n; ++r) s += t[r * n + c];
            for (std::size_t r = 0; r < n; ++r) t[r * n + c] *= s > 0 ? u[c] / s : 0.0;
        }
    }
    return t;
}

}  // namespace

TEST(MaximalCoupling, EqualMarginalsGiveDiagonal) {
    const ClassicalDistribution p({0.5, 0.25, 0.25, 0.0});
    const auto t = maximal_coupling(p, p);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t kp = 0; kp < 4; ++kp) EXPECT_EQ(t(k, kp), k == kp ? p[k] : 0.0);
    EXPECT_EQ(mismatch_prob(t), 0.0);
}

TEST(MaximalCoupling, TwoByTwoExample) {
    const ClassicalDistribution p({0.75, 0.25}), u({0.5, 0.5});
    const auto t = maximal_coupling(p, u);
    // R' = diag(1/2, 1/4), S = (1/4, 0), T = (0, 1/4), SD = 1/4.
    EXPECT_EQ(t(0, 0), 0.5);
    EXPECT_EQ(t(1, 1), 0.25);
    EXPECT_EQ(t(0, 1), 0.25);
    EXPECT_EQ(t(1, 0), 0.0);
    EXPECT_EQ(statistical_distance(p, u), 0.25);
    EXPECT_EQ(mismatch_prob(t), 0.25);
    EXPECT_EQ(mismatch_prob(independent_coupling(p, u)), 0.5);
}

TEST(MaximalCouplingProperty, MarginalsAndIdentity) {
    CounterRng rng(61);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(32);
        const auto pv = random_probs(n, rng, true), uv = random_probs(n, rng, true);
        const ClassicalDistribution p(pv), u(uv);
        const auto tab = maximal_coupling(p, u);
        for (std::size_t k = 0; k < n; ++k) {
            double row = 0, col = 0;
            for (std::size_t j = 0; j < n; ++j) {
                row += tab(k, j);
                col += tab(j, k);
            }
            ASSERT_NEAR(row, pv[k], 1e-12);
            ASSERT_NEAR(col, uv[k], 1e-12);
        }
        ASSERT_NEAR(mismatch_prob(tab), sd_oracle(pv, uv), 1e-12);
    }
}

TEST(CouplingProperty, EveryCouplingMismatchesAtLeastSd) {
    CounterRng rng(62);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.below(6);
        const auto pv = random_probs(n, rng), uv = random_probs(n, rng);
        const auto joint = sinkhorn(pv, uv, rng);
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) diag += joint[k * n + k];
        ASSERT_GE(1.0 - diag, sd_oracle(pv, uv) - 1e-10);
    }
}

TEST(CouplingTable, Validation) {
    const ClassicalDistribution p({0.5, 0.5});
    EXPECT_THROW(CouplingTable(2, {0.5, 0.0, 0.0, 0.25}, p, p), ValidationError);
    EXPECT_THROW(CouplingTable(2, {0.5, 0.0, 0.5, 0.0}, p, p), ValidationError);
    EXPECT_THROW(CouplingTable(2, {0.75, -0.25, 0.0, 0.5}, p, p), ValidationError);
    EXPECT_NO_THROW(CouplingTable(2, {0.25, 0.25, 0.25, 0.25}, p, p));
}

TEST(StatisticalDistance, DyadicIsExact) {
    const ClassicalDistribution p({0.375, 0.125, 0.5}), u({0.125, 0.5, 0.375});
    EXPECT_EQ(statistical_distance(p, u), 0.375);
    EXPECT_THROW(statistical_distance(p, ClassicalDistribution::uniform(2)), ValidationError);
}

TEST(IndependentCoupling, Examples) {
    auto r = independent_coupling_check(ClassicalDistribution::uniform(2), ClassicalDistribution::uniform(2));
    EXPECT_EQ(r.value("statistical_distance"), 0.0);
    EXPECT_EQ(r.value("mismatch_independent"), 0.5);
    EXPECT_EQ(r.value("strict"), 1.0);

    r = independent_coupling_check(ClassicalDistribution({0.75, 0.25}), ClassicalDistribution::uniform(2));
    EXPECT_EQ(r.value("statistical_distance"), 0.25);
    EXPECT_EQ(r.value("mismatch_maximal"), 0.25);
    EXPECT_EQ(r.value("mismatch_independent"), 0.5);
    EXPECT_EQ(r.value("strict"), 1.0);

    const auto pm = ClassicalDistribution::point_mass(2, 1);
    r = independent_coupling_check(pm, pm);
    EXPECT_EQ(r.value("statistical_distance"), 0.0);
    EXPECT_EQ(r.value("mismatch_independent"), 0.0);
    EXPECT_EQ(r.value("strict"), 0.0);
}

TEST(IndependentCouplingProperty, StrictOffPointMasses) {
    CounterRng rng(63);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng.below(15);
        const auto pv = random_probs(n, rng, true), uv = random_probs(n, rng, true);
        const ClassicalDistribution p(pv), u(uv);
        const auto r = independent_coupling_check(p, u);
        const double gap = r.value("mismatch_independent") - r.value("statistical_distance");
        ASSERT_GE(gap, -1e-15);
        if (!p.is_point_mass() && !u.is_point_mass() && r.value("statistical_distance") < 1.0) {
            ASSERT_GT(gap, 0.0);
            ASSERT_EQ(r.value("strict"), 1.0);
        }
    }
}

TEST(Otp, Examples) {
    const auto uniform_plain = ClassicalDistribution::uniform(2);
    auto r = otp_secrecy_check(ClassicalDistribution::uniform(2), ClassicalDistribution({0.9, 0.1}));
    EXPECT_EQ(r.value("max_deviation"), 0.0);
    EXPECT_EQ(r.value("perfect_secrecy"), 1.0);

    r = otp_secrecy_check(ClassicalDistribution({0.75, 0.25}), uniform_plain);
    // Pr(X=0 | C=0) = 3/4 against Pr(X=0) = 1/2.
    EXPECT_EQ(r.value("max_deviation"), 0.25);
    EXPECT_EQ(r.value("perfect_secrecy"), 0.0);

    r = otp_secrecy_check(ClassicalDistribution::uniform(4), ClassicalDistribution({0.1, 0.2, 0.3, 0.4}));
    EXPECT_EQ(r.value("max_deviation"), 0.0);
}

TEST(Otp, ZeroProbabilityCiphertextsExcluded) {
    const auto r = otp_secrecy_check(ClassicalDistribution::point_mass(2, 0), ClassicalDistribution::point_mass(2, 1));
    EXPECT_EQ(r.value("excluded_ciphertexts"), 1.0);
    EXPECT_EQ(r.value("max_deviation"), 0.0);
    EXPECT_EQ(r.value("plaintext_full_support"), 0.0);
}

TEST(Otp, LengthMismatch) {
    EXPECT_THROW(otp_secrecy_check(ClassicalDistribution::uniform(2), ClassicalDistribution::uniform(4)),
                 ValidationError);
    EXPECT_THROW(otp_secrecy_check(ClassicalDistribution::uniform(3), ClassicalDistribution::uniform(3)),
                 ValidationError);
}
