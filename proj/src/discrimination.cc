#include "qkdsec/discrimination.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "qkdsec/errors.h"
#include "qkdsec/metrics.h"

namespace qkdsec {

namespace {

constexpr double kCheckTol = 1e-10;

double trace_of_product(const HermitianOperator &a, const HermitianOperator &b) {
    // tr[AB] = sum_ij A_ij B_ji; both Hermitian so the result is real.
    double s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) s += (a(i, j) * b(j, i)).real();
    }
    return s;
}

double kahan_total(const std::vector<double> &xs) {
    double sum = 0, comp = 0;
    for (double x : xs) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

Povm::Povm(std::vector<PovmElement> elements, const Config &cfg) : elements_(std::move(elements)) {
    if (elements_.empty()) throw ValidationError("Povm: no elements");
    dim_ = elements_.front().op.dim();
    HermitianOperator total = HermitianOperator::zero(dim_);
    for (const auto &el : elements_) {
        if (el.op.dim() != dim_) throw ValidationError("Povm: element dimensions differ");
        if (!is_psd(el.op, cfg.psd_tol, cfg)) {
            throw ValidationError("Povm: element with label " + std::to_string(el.label) + " is not positive");
        }
        total += el.op;
    }
    const double dev = max_abs_diff(total.matrix(), CMatrix::identity(dim_));
    if (dev > cfg.psd_tol) {
        throw ValidationError("Povm: elements sum to identity only within " + std::to_string(dev));
    }
}

HermitianOperator Povm::effect(std::size_t label) const {
    HermitianOperator acc = HermitianOperator::zero(dim_);
    for (const auto &el : elements_) {
        if (el.label == label) acc += el.op;
    }
    return acc;
}

bool Povm::covers(std::size_t n) const {
    std::set<std::size_t> seen;
    for (const auto &el : elements_) {
        if (el.label >= n) return false;
        seen.insert(el.label);
    }
    return seen.size() == n;
}

Ensemble::Ensemble(std::vector<EnsembleItem> items, const Config &cfg) : items_(std::move(items)) {
    if (items_.empty()) throw ValidationError("Ensemble: no items");
    std::vector<double> p;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const auto &it = items_[i];
        if (!(it.prob >= 0.0)) throw ValidationError("Ensemble: negative prior at item " + std::to_string(i));
        if (it.state.dim() != items_.front().state.dim()) throw ValidationError("Ensemble: state dimensions differ");
        validate_density(it.state, cfg, "Ensemble item " + std::to_string(i));
        p.push_back(it.prob);
    }
    if (std::abs(kahan_total(p) - 1.0) > cfg.prob_sum_tol) throw ValidationError("Ensemble: priors do not sum to 1");
}

HelstromResult helstrom_optimum(const Ensemble &e, const Config &cfg) {
    if (e.items().size() != 2) {
        throw ValidationError("helstrom: expected exactly 2 ensemble items, got " + std::to_string(e.items().size()));
    }
    const auto &a = e.items()[0];
    const auto &b = e.items()[1];
    const HermitianOperator diff = a.prob * a.state - b.prob * b.state;
    const Spectrum sp = eig_hermitian(diff, cfg, "helstrom operator");
    double norm1 = 0;
    for (double l : sp.values) norm1 += std::abs(l);
    HermitianOperator plus = sp.map([](double l) { return l > 0.0 ? 1.0 : 0.0; });
    HermitianOperator rest = HermitianOperator::identity(diff.dim()) - plus;
    Povm m({{0, plus}, {1, rest}}, cfg);
    return {0.5 + 0.5 * norm1, std::move(plus), std::move(m)};
}

double ensemble_guess_prob(const Ensemble &e, const Povm &m) {
    if (m.dim() != e.dim()) throw ValidationError("ensemble_guess_prob: POVM dimension mismatch");
    std::vector<double> terms;
    for (std::size_t i = 0; i < e.items().size(); ++i) {
        terms.push_back(e.items()[i].prob * trace_of_product(m.effect(i), e.items()[i].state));
    }
    return kahan_total(terms);
}

MetricReport helstrom(const Ensemble &e, const Config &cfg) {
    const HelstromResult h = helstrom_optimum(e, cfg);
    const double achieved = ensemble_guess_prob(e, h.measurement);
    const bool ok = std::abs(achieved - h.p_guess) <= kCheckTol;
    MetricReport r;
    r.add("p_guess", h.p_guess, "discrimination.helstrom: 1/2 + 1/2 ||p0 rho0 - p1 rho1||_1");
    r.add("achieved", achieved, "discrimination.helstrom: positive-eigenspace projective measurement");
    r.add("check_achievable", ok ? 1.0 : 0.0, "discrimination.helstrom: |achieved - p_guess| <= 1e-10", !ok);
    return r;
}

double povm_guess_prob(const CqState &s, const Povm &m, const Config &cfg) {
    (void)cfg;
    if (m.dim() != s.eve_dim()) throw ValidationError("povm_guess_prob: POVM dimension differs from eve_dim");
    if (!m.covers(s.keys().size())) throw ValidationError("povm_guess_prob: POVM labels do not cover the key space");
    std::vector<HermitianOperator> effects;
    for (std::size_t k = 0; k < s.keys().size(); ++k) effects.push_back(m.effect(k));
    std::vector<double> terms;
    for (const auto &b : s.branches()) terms.push_back(b.prob * trace_of_product(effects[b.key_a], b.eve_op));
    return kahan_total(terms);
}

HermitianOperator build_gamma(const Povm &m, const KeySpace &keys, const Config &cfg) {
    if (!m.covers(keys.size())) throw ValidationError("build_gamma: POVM labels do not cover the key space");
    const std::size_t ks = keys.size();
    const std::size_t d = m.dim();
    if (ks * ks > cfg.dim_cap / d) {
        throw ResourceError("build_gamma: dimension " + std::to_string(ks * ks * d) + " exceeds cap " +
                            std::to_string(cfg.dim_cap));
    }
    CMatrix g(ks * ks * d, ks * ks * d);
    for (std::size_t k = 0; k < ks; ++k) {
        const HermitianOperator mk = m.effect(k);
        const std::size_t base = joint_index(ks, d, k, k, 0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) g(base + i, base + j) = mk(i, j);
        }
    }
    return HermitianOperator::symmetrized(g);
}

Ensemble induced_ensemble(const CqState &s, const Config &cfg) {
    const std::size_t ks = s.keys().size();
    std::vector<double> weight(ks, 0.0);
    std::vector<HermitianOperator> acc(ks, HermitianOperator::zero(s.eve_dim()));
    for (const auto &b : s.branches()) {
        weight[b.key_a] += b.prob;
        acc[b.key_a] += b.prob * b.eve_op;
    }
    std::vector<EnsembleItem> items;
    for (std::size_t k = 0; k < ks; ++k) {
        if (weight[k] > 0.0) {
            items.push_back({weight[k], acc[k] * (1.0 / weight[k])});
        } else {
            items.push_back({0.0, HermitianOperator::identity(s.eve_dim()) * (1.0 / static_cast<double>(s.eve_dim()))});
        }
    }
    return Ensemble(std::move(items), cfg);
}

Povm pretty_good_measurement(const Ensemble &e, const Config &cfg) {
    HermitianOperator avg = HermitianOperator::zero(e.dim());
    for (const auto &it : e.items()) avg += it.prob * it.state;
    const InverseSqrt is = inverse_sqrt_on_support(avg, cfg);
    std::vector<PovmElement> elements;
    for (std::size_t k = 0; k < e.items().size(); ++k) {
        const auto &it = e.items()[k];
        const CMatrix mk = is.inv_sqrt.matrix() * (it.prob * it.state).matrix() * is.inv_sqrt.matrix();
        elements.push_back({k, HermitianOperator::symmetrized(mk)});
    }
    elements.front().op += HermitianOperator::identity(e.dim()) - is.support;
    return Povm(std::move(elements), cfg);
}

BestGuess best_guess(const CqState &s, const Config &cfg) {
    const Ensemble ens = induced_ensemble(s, cfg);
    if (s.keys().size() == 2) return {helstrom_optimum(ens, cfg).p_guess, GuessMethod::Helstrom, true};

    std::vector<HermitianOperator> weighted;
    bool all_diag = true;
    for (const auto &it : ens.items()) {
        if (it.prob == 0.0) continue;
        weighted.push_back(it.prob * it.state);
        all_diag = all_diag && weighted.back().matrix().is_diagonal(0.0);
    }
    bool commuting = true;
    for (std::size_t i = 0; i < weighted.size() && commuting && !all_diag; ++i) {
        for (std::size_t j = i + 1; j < weighted.size() && commuting; ++j) {
            commuting = commutator_norm(weighted[i], weighted[j]) < cfg.commute_tol;
        }
    }
    if (commuting) {
        const CMatrix basis = common_eigenbasis(weighted, 1e-9, cfg);
        const std::size_t d = s.eve_dim();
        std::vector<double> per_outcome(d, 0.0);
        for (std::size_t e = 0; e < d; ++e) {
            double best = 0.0;
            for (const auto &w : weighted) {
                cplx v = 0;
                for (std::size_t r = 0; r < d; ++r) {
                    cplx row = 0;
                    for (std::size_t c = 0; c < d; ++c) row += w(r, c) * basis(c, e);
                    v += std::conj(basis(r, e)) * row;
                }
                best = std::max(best, v.real());
            }
            per_outcome[e] = best;
        }
        return {kahan_total(per_outcome), GuessMethod::Map, true};
    }
    return {ensemble_guess_prob(ens, pretty_good_measurement(ens, cfg)), GuessMethod::PrettyGood, false};
}

const char *to_string(GuessMethod m) {
    switch (m) {
        case GuessMethod::Helstrom:
            return "helstrom";
        case GuessMethod::Map:
            return "map";
        case GuessMethod::PrettyGood:
            return "pretty_good";
    }
    return "unknown";
}

MetricReport best_guess_prob(const CqState &s, const Config &cfg) {
    const BestGuess g = best_guess(s, cfg);
    MetricReport r;
    r.add("best_guess", g.value,
          std::string("discrimination.best_guess_prob: ") + to_string(g.method) +
              (g.exact ? " (exact optimum)" : " (lower bound, not optimal)"),
          !g.exact);
    r.add("exact", g.exact ? 1.0 : 0.0, "discrimination.best_guess_prob: 1 if optimal measurement was found");
    r.add("method", static_cast<double>(g.method), "discrimination.best_guess_prob: 0 helstrom, 1 map, 2 pretty_good");
    return r;
}

MetricReport guess_bound(const CqState &s, const HermitianOperator &sigma, const Config &cfg) {
    const double floor = s.keys().uniform_prob();
    const double eps_sec = trace_distance(correctify(s, cfg), ideal_state(s.keys(), sigma, cfg), cfg);
    const double bound = floor + eps_sec;
    const BestGuess g = best_guess(s, cfg);
    const bool ok = g.value <= bound + kCheckTol;
    MetricReport r;
    r.add("key_floor", floor, "discrimination.guess_bound: 2^-bits");
    r.add("eps_sec", eps_sec, "discrimination.guess_bound: trace_distance(correctify(s), ideal(sigma))");
    r.add("bound", bound, "discrimination.guess_bound: 2^-bits + eps_sec");
    r.add("best_guess", g.value, std::string("discrimination.best_guess_prob: ") + to_string(g.method), !g.exact);
    r.add("gap", bound - g.value, "discrimination.guess_bound: bound - best_guess");
    r.add("check_bound", ok ? 1.0 : 0.0, "discrimination.guess_bound: best_guess <= bound + 1e-10", !ok);
    return r;
}

MetricReport guess_bound(uint64_t key_bits, LogProb eps_sec) {
    const LogProb floor = LogProb::pow2_neg(static_cast<double>(key_bits));
    const LogProb bound = floor + eps_sec;
    MetricReport r;
    r.add("key_floor_log2", floor.log2(), "discrimination.guess_bound: log2 2^-bits");
    r.add("eps_sec_log2", eps_sec.log2(), "discrimination.guess_bound: log2 eps_sec");
    r.add("bound_log2", bound.log2(), "discrimination.guess_bound: log2(2^-bits + eps_sec), log domain");
    r.add("bound", bound.to_double(), "discrimination.guess_bound: 2^-bits + eps_sec");
    r.add("eps_sec_dominates", eps_sec > floor ? 1.0 : 0.0, "discrimination.guess_bound: eps_sec > 2^-bits");
    return r;
}

}  // namespace qkdsec
