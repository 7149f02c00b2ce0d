#include <gtest/gtest.h>

#include <cmath>

#include "qkdsec/discrimination.h"
#include "qkdsec/errors.h"
#include "qkdsec/metrics.h"
#include "support.h"

using namespace qkdsec;
using namespace qkdsec::testing;

namespace {

const double kBinaryHelstrom = 0.5 + 0.5 * kInvSqrt2;

Povm computational_povm(std::size_t dim, std::size_t labels) {
    std::vector<PovmElement> el;
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> d(dim, 0.0);
        d[i] = 1.0;
        el.push_back({i % labels, HermitianOperator::diagonal(d)});
    }
    return Povm(std::move(el));
}

Povm uniform_povm(std::size_t dim, std::size_t labels) {
    std::vector<PovmElement> el;
    for (std::size_t k = 0; k < labels; ++k)
        el.push_back({k, HermitianOperator::identity(dim) * (1.0 / static_cast<double>(labels))});
    return Povm(std::move(el));
}

/// Random POVM with `labels` outcomes: G_k = A_k^dagger A_k normalised by
/// S^-1/2 (sum G_k) S^-1/2.
Povm random_povm(std::size_t dim, std::size_t labels, CounterRng &rng) {
    std::vector<HermitianOperator> g;
    HermitianOperator sum = HermitianOperator::zero(dim);
    for (std::size_t k = 0; k < labels; ++k) {
        g.push_back(random_ops::density(dim, rng, 1 + rng.below(dim)) * rng.uniform(0.1, 1.0) +
                    HermitianOperator::identity(dim) * 0.05);
        sum += g.back();
    }
    const auto inv = inverse_sqrt_on_support(sum).inv_sqrt;
    std::vector<PovmElement> el;
    for (std::size_t k = 0; k < labels; ++k)
        el.push_back({k, HermitianOperator::symmetrized(inv.matrix() * g[k].matrix() * inv.matrix())});
    return Povm(std::move(el));
}

/// Classical MAP oracle for diagonal conditional states.
double diagonal_map(const CqState &s) {
    const std::size_t n = s.keys().size(), d = s.eve_dim();
    std::vector<double> joint(n * d, 0.0);
    for (const auto &b : s.branches())
        for (std::size_t e = 0; e < d; ++e) joint[b.key_a * d + e] += b.prob * b.eve_op(e, e).real();
    double total = 0.0;
    for (std::size_t e = 0; e < d; ++e) {
        double best = 0.0;
        for (std::size_t k = 0; k < n; ++k) best = std::max(best, joint[k * d + e]);
        total += best;
    }
    return total;
}

}  // namespace

TEST(Povm, Validation) {
    EXPECT_THROW(Povm({{0, diag({1, 0})}}), ValidationError);
    EXPECT_THROW(Povm({{0, diag({1.5, 1})}, {1, diag({-0.5, 0})}}), ValidationError);
    EXPECT_NO_THROW(Povm({{0, diag({1, 0})}, {1, diag({0, 1})}}));
    const Povm m({{0, diag({1, 0})}, {0, diag({0, 1})}});
    EXPECT_FALSE(m.covers(2));
    EXPECT_TRUE(m.covers(1));
}

TEST(Helstrom, Examples) {
    const Ensemble ortho({{0.5, proj(ket0())}, {0.5, proj(ket1())}});
    EXPECT_NEAR(helstrom(ortho).value("p_guess"), 1.0, 1e-15);
    const Ensemble same({{0.5, proj(ket_plus())}, {0.5, proj(ket_plus())}});
    EXPECT_NEAR(helstrom(same).value("p_guess"), 0.5, 1e-15);
    const Ensemble pair({{0.5, proj(ket0())}, {0.5, proj(ket_plus())}});
    const auto r = helstrom(pair);
    // Closed-form eigenvalues of 1/2 |0><0| - 1/2 |+><+|.
    const auto [hi, lo] = eig2(proj(ket0()) * 0.5 - proj(ket_plus()) * 0.5);
    EXPECT_NEAR(r.value("p_guess"), 0.5 + 0.5 * (std::abs(hi) + std::abs(lo)), 1e-14);
    EXPECT_NEAR(r.value("p_guess"), kBinaryHelstrom, 1e-12);
    EXPECT_NEAR(r.value("achieved"), r.value("p_guess"), 1e-10);
    EXPECT_EQ(r.value("check_achievable"), 1.0);
}

TEST(Helstrom, RequiresTwoStates) {
    const Ensemble three({{0.5, proj(ket0())}, {0.25, proj(ket1())}, {0.25, proj(ket_plus())}});
    EXPECT_THROW(helstrom(three), ValidationError);
    EXPECT_THROW(Ensemble({{0.5, proj(ket0())}, {0.25, proj(ket1())}}), ValidationError);
}

TEST(HelstromProperty, DominatesEveryPovm) {
    CounterRng rng(51);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 2 + rng.below(3);
        const double p = rng.uniform();
        const Ensemble e({{p, random_ops::density(d, rng)}, {1 - p, random_ops::density(d, rng)}});
        const double opt = helstrom_optimum(e).p_guess;
        const auto m = random_povm(d, 2, rng);
        ASSERT_LE(ensemble_guess_prob(e, m), opt + 1e-10);
    }
}

TEST(PovmGuess, Examples) {
    const auto z = binary_example();
    EXPECT_NEAR(povm_guess_prob(z, uniform_povm(2, 2)), 0.5, 1e-15);
    EXPECT_NEAR(povm_guess_prob(ideal_state(KeySpace(2), diag({0.5, 0.5})), uniform_povm(2, 4)), 0.25, 1e-15);
    // 1/2 (<0|rho_0|0> + <1|rho_1|1>) = 1/2 (1 + 1/2)
    EXPECT_NEAR(povm_guess_prob(z, computational_povm(2, 2)), 0.75, 1e-15);
    const auto h = helstrom_optimum(induced_ensemble(z));
    EXPECT_NEAR(povm_guess_prob(z, h.measurement), kBinaryHelstrom, 1e-12);
}

TEST(PovmGuess, LabelMismatch) {
    EXPECT_THROW(povm_guess_prob(binary_example(), uniform_povm(3, 2)), ValidationError);
    EXPECT_THROW(povm_guess_prob(binary_example(), uniform_povm(2, 1)), ValidationError);
}

TEST(BuildGamma, Examples) {
    const KeySpace ks(1);
    // M_0 = I: Gamma is the projector onto (0, 0) (x) I.
    const Povm all({{0, HermitianOperator::identity(2)}, {1, HermitianOperator::zero(2)}});
    EXPECT_EQ(build_gamma(all, ks), diag({1, 1, 0, 0, 0, 0, 0, 0}));
    // Hand expansion: |00><00| (x) |0><0| + |11><11| (x) |1><1|.
    EXPECT_EQ(build_gamma(computational_povm(2, 2), ks), diag({1, 0, 0, 0, 0, 0, 0, 1}));
    Config cfg;
    cfg.dim_cap = 4;
    EXPECT_THROW(build_gamma(computational_povm(2, 2), ks, cfg), ResourceError);
}

TEST(BuildGammaProperty, BoundedAndIdealPairing) {
    CounterRng rng(52);
    for (int t = 0; t < 200; ++t) {
        const KeySpace ks(1 + static_cast<unsigned>(rng.below(2)));
        const std::size_t d = 1 + rng.below(3);
        const auto m = random_povm(d, ks.size(), rng);
        const auto g = build_gamma(m, ks);
        const auto sp = eig_hermitian(g);
        ASSERT_LE(sp.values.front(), 1.0 + 1e-10);
        ASSERT_GE(sp.values.back(), -1e-10);
        const auto ideal = to_density(ideal_state(ks, random_ops::density(d, rng)));
        ASSERT_NEAR(trace_product(g, ideal), ks.uniform_prob(), 1e-10);
    }
}

TEST(GuessDerivationProperty, GammaPairingIdentity) {
    CounterRng rng(53);
    for (int t = 0; t < 500; ++t) {
        const auto s = random_cq_state(rng);
        const auto m = random_povm(s.eve_dim(), s.keys().size(), rng);
        const auto z = correctify(s);
        const auto ideal = ideal_state(s.keys(), random_ops::density(s.eve_dim(), rng));
        const auto g = build_gamma(m, s.keys());
        const double lhs = povm_guess_prob(s, m) - s.keys().uniform_prob();
        const double rhs = trace_product(g, to_density(z) - to_density(ideal));
        ASSERT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(BestGuess, Examples) {
    const auto same = ideal_state(KeySpace(2), proj(ket_plus()));
    auto r = best_guess_prob(same);
    EXPECT_NEAR(r.value("best_guess"), 0.25, 1e-12);
    EXPECT_EQ(r.value("exact"), 1.0);

    r = best_guess_prob(binary_example());
    EXPECT_NEAR(r.value("best_guess"), kBinaryHelstrom, 1e-12);
    EXPECT_EQ(best_guess(binary_example()).method, GuessMethod::Helstrom);

    std::vector<CqBranch> br;
    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> d(4, 0.0);
        d[k] = 1.0;
        br.push_back({k, k, 0.25, HermitianOperator::diagonal(d)});
    }
    const CqState perfect(KeySpace(2), 4, br);
    const auto g = best_guess(perfect);
    EXPECT_EQ(g.method, GuessMethod::Map);
    EXPECT_TRUE(g.exact);
    EXPECT_NEAR(g.value, 1.0, 1e-15);
}

TEST(BestGuess, NonCommutingFallsBackToPrettyGood) {
    const StateVector y{kInvSqrt2, cplx(0, kInvSqrt2)};
    const CqState s(KeySpace(2), 2,
                    {{0, 0, 0.25, proj(ket0())},
                     {1, 1, 0.25, proj(ket1())},
                     {2, 2, 0.25, proj(ket_plus())},
                     {3, 3, 0.25, proj(y)}});
    const auto g = best_guess(s);
    EXPECT_EQ(g.method, GuessMethod::PrettyGood);
    EXPECT_FALSE(g.exact);
    const auto r = best_guess_prob(s);
    EXPECT_EQ(r.value("exact"), 0.0);
    EXPECT_GE(g.value, 0.25);
    EXPECT_LE(g.value, guess_bound(s, sigma_avg(s)).value("bound") + 1e-10);
}

TEST(BestGuessProperty, MapMatchesDiagonalOracle) {
    CounterRng rng(54);
    for (int t = 0; t < 300; ++t) {
        const KeySpace ks(2);
        const std::size_t d = 1 + rng.below(4);
        const auto w = random_probs(16, rng, true);
        std::vector<CqBranch> br;
        for (std::size_t i = 0; i < 16; ++i)
            if (w[i] > 0) br.push_back({i / 4, i % 4, w[i], HermitianOperator::diagonal(random_probs(d, rng, true))});
        const CqState s(ks, d, br);
        const auto g = best_guess(s);
        ASSERT_TRUE(g.exact);
        ASSERT_NEAR(g.value, diagonal_map(s), 1e-12);
    }
}

TEST(BestGuessProperty, PrettyGoodSandwich) {
    CounterRng rng(55);
    for (int t = 0; t < 300; ++t) {
        CqOptions opt;
        opt.commuting = true;
        opt.max_bits = 2;
        auto s = random_cq_state(rng, opt);
        const auto e = induced_ensemble(s);
        const double pgm = ensemble_guess_prob(e, pretty_good_measurement(e));
        // MAP exact value through the commuting path, independent of key count.
        std::vector<HermitianOperator> ops;
        for (const auto &it : e.items()) ops.push_back(it.state);
        const CMatrix w = common_eigenbasis(ops);
        double map = 0.0;
        for (std::size_t c = 0; c < e.dim(); ++c) {
            double best = 0.0;
            for (const auto &it : e.items()) {
                cplx v = 0.0;
                for (std::size_t i = 0; i < e.dim(); ++i)
                    for (std::size_t j = 0; j < e.dim(); ++j)
                        v += std::conj(w(i, c)) * it.state(i, j) * w(j, c);
                best = std::max(best, it.prob * v.real());
            }
            map += best;
        }
        ASSERT_LE(pgm, map + 1e-10);
        ASSERT_GE(pgm, map * map - 1e-10);
        ASSERT_NEAR(best_guess(s).value, map, 1e-9);
    }
}

TEST(GuessBound, Examples) {
    const auto sigma = proj(ket0());
    auto r = guess_bound(ideal_state(KeySpace(2), sigma), sigma);
    EXPECT_NEAR(r.value("bound"), 0.25, 1e-15);

    const auto z = binary_example();
    r = guess_bound(z, sigma_avg(z));
    EXPECT_NEAR(r.value("bound"), 0.5 + std::sqrt(2.0) / 4.0, 1e-12);
    EXPECT_NEAR(r.value("bound"), kBinaryHelstrom, 1e-12);
    EXPECT_LE(r.value("gap"), 1e-9);
    EXPECT_EQ(r.value("check_bound"), 1.0);
}

TEST(GuessBound, LogDomainMillionBitKey) {
    const auto r = guess_bound(1000000, LogProb::pow2_neg(50));
    EXPECT_NEAR(r.value("bound"), std::ldexp(1.0, -50), 1e-30);
    EXPECT_NEAR(r.value("bound"), 8.88e-16, 0.01e-16);
    EXPECT_EQ(r.value("eps_sec_dominates"), 1.0);
    EXPECT_EQ(r.value("key_floor_log2"), -1e6);
}

TEST(GuessBoundProperty, HoldsOnRandomStates) {
    CounterRng rng(56);
    for (int t = 0; t < 1000; ++t) {
        const auto s = random_cq_state(rng);
        const auto r = guess_bound(s, sigma_avg(s));
        ASSERT_LE(r.value("best_guess"), r.value("bound") + 1e-10);
    }
}

TEST(GuessBoundProperty, BinaryPureStatesSaturate) {
    CounterRng rng(57);
    for (int t = 0; t < 300; ++t) {
        const std::size_t d = 2 + rng.below(3);
        const CqState s(KeySpace(1), d,
                        {{0, 0, 0.5, proj(random_ops::pure_ket(d, rng))}, {1, 1, 0.5, proj(random_ops::pure_ket(d, rng))}});
        const auto r = guess_bound(s, sigma_avg(s));
        ASSERT_NEAR(r.value("bound"), r.value("best_guess"), 1e-9);
    }
}
