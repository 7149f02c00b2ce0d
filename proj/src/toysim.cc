#include "qkdsec/toysim.h"

#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <utility>

#include "qkdsec/discrimination.h"
#include "qkdsec/errors.h"
#include "qkdsec/metrics.h"

namespace qkdsec {

namespace {

struct RoundOutcome {
    unsigned alice_bit;
    unsigned bob_bit;
    std::size_t eve_symbol;
    double weight;
};

/// All outcomes of one round with their probabilities.
std::vector<RoundOutcome> single_round(const Bb84Config &c) {
    const double q = c.intercept_prob;
    std::vector<RoundOutcome> out;
    auto push = [&](unsigned a, unsigned b, std::size_t sym, double w) {
        if (w <= 0.0) return;
        for (auto &o : out) {
            if (o.alice_bit == a && o.bob_bit == b && o.eve_symbol == sym) {
                o.weight += w;
                return;
            }
        }
        out.push_back({a, b, sym, w});
    };
    for (unsigned a = 0; a < 2; ++a) {
        for (unsigned alice_basis = 0; alice_basis < 2; ++alice_basis) {
            const double w_alice = 0.25;
            // Bob's basis is forced equal to Alice's under sifting.
            for (unsigned bob_basis = 0; bob_basis < 2; ++bob_basis) {
                double w_bob;
                if (c.sift) {
                    if (bob_basis != alice_basis) continue;
                    w_bob = 1.0;
                } else {
                    w_bob = 0.5;
                }
                // Eve leaves the round alone.
                if (bob_basis == alice_basis) {
                    push(a, a, 0, w_alice * w_bob * (1.0 - q));
                } else {
                    for (unsigned b = 0; b < 2; ++b) push(a, b, 0, w_alice * w_bob * (1.0 - q) * 0.5);
                }
                // Eve measures in her basis and resends what she saw.
                for (unsigned eve_basis = 0; eve_basis < 2; ++eve_basis) {
                    for (unsigned e = 0; e < 2; ++e) {
                        double w_eve = 0.5 * q;
                        if (eve_basis == alice_basis) {
                            if (e != a) continue;
                        } else {
                            w_eve *= 0.5;
                        }
                        const std::size_t sym = 1 + 2 * eve_basis + e;
                        if (bob_basis == eve_basis) {
                            push(a, e, sym, w_alice * w_bob * w_eve);
                        } else {
                            for (unsigned b = 0; b < 2; ++b) push(a, b, sym, w_alice * w_bob * w_eve * 0.5);
                        }
                    }
                }
            }
        }
    }
    return out;
}

std::size_t pow5(unsigned n) {
    std::size_t p = 1;
    for (unsigned i = 0; i < n; ++i) p *= kEveSymbolsPerRound;
    return p;
}

}  // namespace

void Bb84Config::validate() const {
    if (rounds == 0) throw ValidationError("Bb84Config: rounds must be >= 1");
    if (rounds > 20) throw ResourceError("Bb84Config: " + std::to_string(rounds) + " rounds is beyond enumeration range");
    if (!(intercept_prob >= 0.0 && intercept_prob <= 1.0)) {
        throw ValidationError("Bb84Config: intercept_prob must lie in [0, 1]");
    }
}

namespace {

void extend(const Bb84Config &c, const std::vector<RoundOutcome> &round, const Bb84Record &h, unsigned depth,
            const std::function<void(const Bb84Record &)> &visit) {
    if (depth == c.rounds) {
        if (c.pa_mode == PrivacyAmplification::Parity) {
            Bb84Record p = h;
            p.key_a = static_cast<std::size_t>(std::popcount(h.key_a) & 1);
            p.key_b = static_cast<std::size_t>(std::popcount(h.key_b) & 1);
            visit(p);
        } else {
            visit(h);
        }
        return;
    }
    for (const auto &o : round) {
        extend(c, round, {(h.key_a << 1) | o.alice_bit, (h.key_b << 1) | o.bob_bit,
                          h.eve_record * kEveSymbolsPerRound + o.eve_symbol, h.weight * o.weight,
                          h.bit_errors + (o.alice_bit != o.bob_bit ? 1u : 0u)},
               depth + 1, visit);
    }
}

}  // namespace

void for_each_bb84(const Bb84Config &c, const std::function<void(const Bb84Record &)> &visit) {
    c.validate();
    extend(c, single_round(c), {0, 0, 0, 1.0, 0}, 0, visit);
}

std::vector<Bb84Record> enumerate_bb84(const Bb84Config &c) {
    std::vector<Bb84Record> out;
    for_each_bb84(c, [&](const Bb84Record &r) { out.push_back(r); });
    return out;
}

SimOutcome simulate_bb84(const Bb84Config &c, const Config &cfg) {
    c.validate();
    const std::size_t eve_dim = pow5(c.rounds);
    if (eve_dim > cfg.dim_cap) {
        throw ResourceError("simulate_bb84: Eve register dimension " + std::to_string(eve_dim) + " exceeds cap " +
                            std::to_string(cfg.dim_cap));
    }
    const KeySpace keys(c.key_bits(), cfg);

    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> blocks;
    double error_weight = 0;
    for_each_bb84(c, [&](const Bb84Record &h) {
        auto &diag = blocks[{h.key_a, h.key_b}];
        if (diag.empty()) diag.assign(eve_dim, 0.0);
        diag[h.eve_record] += h.weight;
        error_weight += h.weight * h.bit_errors;
    });
    std::vector<CqBranch> branches;
    for (auto &[key, diag] : blocks) {
        double p = 0;
        for (double w : diag) p += w;
        if (p == 0.0) continue;
        for (double &w : diag) w /= p;
        branches.push_back({key.first, key.second, p, HermitianOperator::diagonal(diag)});
    }
    return {CqState(keys, eve_dim, std::move(branches), cfg), error_weight / c.rounds, c.sift ? 0.5 : 1.0};
}

MetricReport pipeline_report(const Bb84Config &c, const Config &cfg) {
    const SimOutcome sim = simulate_bb84(c, cfg);
    const HermitianOperator sigma = sigma_avg(sim.state);
    MetricReport r;
    r.add("rounds", c.rounds, "toysim.simulate_bb84: config");
    r.add("intercept_prob", c.intercept_prob, "toysim.simulate_bb84: config");
    r.add("key_bits", c.key_bits(), "toysim.simulate_bb84: config");
    r.add("qber", sim.qber, "toysim.simulate_bb84: Pr[sifted bits differ] per round");
    r.add("sifted_fraction", sim.sifted_fraction, "toysim.simulate_bb84: Pr[round kept by sifting]");
    r.merge(epsilon_decomposition(sim.state, sigma, cfg), "decomp.");
    const MetricReport bound = guess_bound(sim.state, sigma, cfg);
    r.merge(bound, "guess.");
    r.add("per_bit_guess", std::pow(bound.value("best_guess"), 1.0 / c.key_bits()),
          "toysim.pipeline_report: best_guess^{1/key_bits}");
    return r;
}

}  // namespace qkdsec
