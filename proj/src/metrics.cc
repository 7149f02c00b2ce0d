#include "qkdsec/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "qkdsec/coupling.h"
#include "qkdsec/errors.h"

namespace qkdsec {

namespace {

constexpr double kCheckTol = 1e-10;

double as_flag(bool b) { return b ? 1.0 : 0.0; }

using BlockKey = std::pair<std::size_t, std::size_t>;

std::map<BlockKey, const CqBranch *> index_branches(const CqState &s) {
    std::map<BlockKey, const CqBranch *> m;
    for (const auto &b : s.branches()) m[{b.key_a, b.key_b}] = &b;
    return m;
}

void require_same_shape(const CqState &a, const CqState &b) {
    if (a.keys() != b.keys() || a.eve_dim() != b.eve_dim()) {
        throw ValidationError("trace_distance: cq-states differ in key space or Eve dimension");
    }
}

/// Traceless Hermitian basis, orthonormal in the Frobenius inner product.
std::vector<HermitianOperator> traceless_basis(std::size_t d) {
    std::vector<HermitianOperator> basis;
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            CMatrix sym(d, d), asym(d, d);
            sym(j, k) = r;
            sym(k, j) = r;
            asym(j, k) = cplx(0, -r);
            asym(k, j) = cplx(0, r);
            basis.push_back(HermitianOperator::symmetrized(sym));
            basis.push_back(HermitianOperator::symmetrized(asym));
        }
    }
    for (std::size_t l = 1; l < d; ++l) {
        std::vector<double> diag(d, 0.0);
        const double c = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (std::size_t j = 0; j < l; ++j) diag[j] = c;
        diag[l] = -c * static_cast<double>(l);
        basis.push_back(HermitianOperator::diagonal(diag));
    }
    return basis;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0, theta = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        const double t = (cum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0) theta = t;
    }
    for (double &x : v) x = std::max(x - theta, 0.0);
    return v;
}

/// D(s, ideal(sigma)) as a function of sigma, with the sigma-independent
/// mismatched blocks precomputed.
class IdealDistance {
   public:
    IdealDistance(const CqState &s, const Config &cfg) : cfg_(cfg), uniform_(s.keys().uniform_prob()) {
        auto blocks = index_branches(s);
        for (std::size_t k = 0; k < s.keys().size(); ++k) {
            auto it = blocks.find({k, k});
            if (it == blocks.end()) {
                diag_.push_back(HermitianOperator::zero(s.eve_dim()));
            } else {
                diag_.push_back(it->second->prob * it->second->eve_op);
            }
        }
        for (const auto &b : s.branches()) {
            if (b.key_a != b.key_b) constant_ += b.prob;
        }
    }

    double operator()(const HermitianOperator &sigma) const {
        double total = constant_;
        for (const auto &block : diag_) total += trace_norm(block - uniform_ * sigma, cfg_);
        return 0.5 * total;
    }

   private:
    const Config &cfg_;
    double uniform_;
    double constant_ = 0;
    std::vector<HermitianOperator> diag_;
};

}  // namespace

double trace_distance(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg) {
    if (a.dim() != b.dim()) {
        throw ValidationError("trace_distance: dimensions " + std::to_string(a.dim()) + " and " +
                              std::to_string(b.dim()) + " differ");
    }
    return 0.5 * trace_norm(a - b, cfg);
}

double trace_distance(const CqState &a, const CqState &b, const Config &cfg) {
    require_same_shape(a, b);
    const auto ia = index_branches(a);
    const auto ib = index_branches(b);
    double total = 0;
    for (const auto &[key, br] : ia) {
        auto it = ib.find(key);
        if (it == ib.end()) {
            total += br->prob;
        } else {
            total += trace_norm(br->prob * br->eve_op - it->second->prob * it->second->eve_op, cfg);
        }
    }
    for (const auto &[key, br] : ib) {
        if (!ia.contains(key)) total += br->prob;
    }
    return 0.5 * total;
}

double trace_distance_dense(const CqState &a, const CqState &b, const Config &cfg) {
    require_same_shape(a, b);
    return trace_distance(to_density(a, cfg), to_density(b, cfg), cfg);
}

MetricReport epsilon_decomposition(const CqState &rho, const HermitianOperator &sigma, const Config &cfg) {
    const CqState zeta = correctify(rho, cfg);
    const CqState ideal = ideal_state(rho.keys(), sigma, cfg);
    const double eps_cor = rho.mismatch_prob();
    const double eps_sec = trace_distance(zeta, ideal, cfg);
    const double total = trace_distance(rho, ideal, cfg);
    const double rho_zeta = trace_distance(rho, zeta, cfg);
    const bool triangle = total <= eps_cor + eps_sec + kCheckTol;
    MetricReport r;
    r.add("eps_cor", eps_cor, "metrics.epsilon_decomposition: Pr[ka != kb] from branches");
    r.add("eps_sec", eps_sec, "metrics.epsilon_decomposition: trace_distance(correctify(rho), ideal(sigma))");
    r.add("total", total, "metrics.epsilon_decomposition: trace_distance(rho, ideal(sigma))");
    r.add("distance_rho_zeta", rho_zeta, "metrics.epsilon_decomposition: trace_distance(rho, correctify(rho))");
    r.add("check_triangle", as_flag(triangle), "metrics.epsilon_decomposition: total <= eps_cor + eps_sec + 1e-10",
          !triangle);
    return r;
}

MetricReport statistical_distance_lb(const CqState &s, const HermitianOperator &sigma, const Config &cfg) {
    const CqState zeta = correctify(s, cfg);
    const ClassicalDistribution p = key_marginal(zeta, KeySide::A, cfg);
    const double sd = statistical_distance(p, ClassicalDistribution::uniform(s.keys().size()));
    const double d = trace_distance(zeta, ideal_state(s.keys(), sigma, cfg), cfg);
    const bool ok = sd <= d + kCheckTol;
    MetricReport r;
    r.add("sd_lower_bound", sd, "metrics.statistical_distance_lb: 1/2 sum_k |P(k) - 2^-bits|, P = marginal of zeta");
    r.add("trace_distance", d, "metrics.statistical_distance_lb: trace_distance(zeta, ideal(sigma))");
    r.add("check_lower_bound", as_flag(ok), "metrics.statistical_distance_lb: sd <= trace_distance + 1e-10", !ok);
    return r;
}

MetricReport fvg_bounds(const HermitianOperator &a, const HermitianOperator &b, const Config &cfg) {
    const double d = trace_distance(a, b, cfg);
    const double f = fidelity(a, b, cfg);
    const double upper = std::sqrt(std::max(0.0, 1.0 - f * f));
    const double lower = 1.0 - f;
    const bool upper_ok = d <= upper + kCheckTol;
    const bool lower_ok = lower <= d + kCheckTol;
    MetricReport r;
    r.add("trace_distance", d, "metrics.fvg_bounds: 1/2 ||a - b||_1");
    r.add("fidelity", f, "metrics.fvg_bounds: tr sqrt(sqrt(a) b sqrt(a))");
    r.add("upper", upper, "metrics.fvg_bounds: sqrt(1 - F^2)");
    r.add("lower", lower, "metrics.fvg_bounds: 1 - F (extension: companion bound)");
    r.add("check_upper", as_flag(upper_ok), "metrics.fvg_bounds: D <= sqrt(1 - F^2) + 1e-10", !upper_ok);
    r.add("check_lower", as_flag(lower_ok), "metrics.fvg_bounds: 1 - F <= D + 1e-10 (extension)", !lower_ok);
    return r;
}

MetricReport koashi_chain_check(const CqState &zeta, const HermitianOperator &sigma, const Config &cfg) {
    if (!zeta.keys_agree()) throw ValidationError("koashi_chain_check: state has a branch with ka != kb");
    validate_density(sigma, cfg, "koashi_chain_check sigma");
    if (sigma.dim() != zeta.eve_dim()) throw ValidationError("koashi_chain_check: sigma has wrong dimension");

    const KeySpace &keys = zeta.keys();
    const HermitianOperator rho = to_density(zeta, cfg);
    const StateVector psi = max_entangled_ket(keys, cfg);
    const HermitianOperator target = tensor(HermitianOperator::projector(psi), sigma, cfg);
    const double f13 = fidelity(rho, target, cfg);
    const double l13 = std::sqrt(std::max(0.0, 1.0 - f13 * f13));

    const std::size_t dims[] = {keys.size() * keys.size(), zeta.eve_dim()};
    const std::size_t keep[] = {0};
    const HermitianOperator reduced = partial_trace(rho, dims, keep);
    const double overlap = inner(psi, qkdsec::apply(reduced.matrix(), psi)).real();
    const double l15 = std::sqrt(std::max(0.0, 1.0 - overlap));

    const double d = trace_distance(zeta, ideal_state(keys, sigma, cfg), cfg);
    const bool mono = l15 <= l13 + kCheckTol;
    const bool fvg = d <= l13 + kCheckTol;
    MetricReport r;
    r.add("L13", l13, "metrics.koashi_chain_check: sqrt(1 - F(zeta, |psi><psi| x sigma)^2)");
    r.add("L15", l15, "metrics.koashi_chain_check: sqrt(1 - <psi| tr_E zeta |psi>)");
    r.add("D", d, "metrics.koashi_chain_check: trace_distance(zeta, ideal(sigma))");
    r.add("gap_L13_L15", l13 - l15, "metrics.koashi_chain_check: L13 - L15");
    r.add("check_monotonicity", as_flag(mono), "metrics.koashi_chain_check: L15 <= L13 + 1e-10", !mono);
    r.add("check_fvg", as_flag(fvg), "metrics.koashi_chain_check: D <= L13 + 1e-10", !fvg);
    r.add("equality_L13_L15", as_flag(std::abs(l13 - l15) <= 1e-8),
          "metrics.koashi_chain_check: |L13 - L15| <= 1e-8 at this fixed sigma");
    return r;
}

HermitianOperator project_to_density(const HermitianOperator &a, const Config &cfg) {
    const Spectrum sp = eig_hermitian(a, cfg, "density projection");
    std::vector<double> lam = project_to_simplex(sp.values);
    std::size_t k = 0;
    return sp.map([&](double) { return lam[k++]; });
}

MetricReport min_sigma_trace_distance(const CqState &s, std::size_t restarts, uint64_t seed, const Config &cfg) {
    if (restarts == 0) throw ValidationError("min_sigma_trace_distance: restarts must be >= 1");
    const IdealDistance objective(s, cfg);
    const HermitianOperator avg = sigma_avg(s);
    const double at_avg = objective(avg);
    const std::vector<HermitianOperator> directions = traceless_basis(s.eve_dim());

    auto descend = [&](HermitianOperator sigma) {
        double best = objective(sigma);
        double step = 0.25;
        for (int sweep = 0; sweep < 5000 && step > 1e-9 && !directions.empty(); ++sweep) {
            const double before = best;
            for (const auto &dir : directions) {
                for (double sign : {1.0, -1.0}) {
                    HermitianOperator cand = project_to_density(sigma + (sign * step) * dir, cfg);
                    const double v = objective(cand);
                    if (v < best) {
                        best = v;
                        sigma = std::move(cand);
                        break;
                    }
                }
            }
            if (before - best < 1e-9) step *= 0.5;
        }
        return best;
    };

    double best = descend(avg);
    CounterRng rng(seed, /*stream_id=*/0x51);
    for (std::size_t i = 0; i < restarts; ++i) best = std::min(best, descend(random_ops::density(s.eve_dim(), rng)));

    const double sd = statistical_distance(key_marginal(correctify(s, cfg), KeySide::A, cfg),
                                           ClassicalDistribution::uniform(s.keys().size()));
    const bool ok = best <= at_avg + 1e-9;
    MetricReport r;
    r.add("at_sigma_avg", at_avg, "metrics.min_sigma_trace_distance: fixed sigma = sum p rho_E (fixed-sigma convention)");
    r.add("local_min", best,
          "metrics.min_sigma_trace_distance: local minimum over sigma, upper bound on the sigma-minimized distance");
    r.add("sd_lower_bound", sd, "metrics.min_sigma_trace_distance: sigma-independent statistical distance");
    r.add("check_min_le_avg", as_flag(ok), "metrics.min_sigma_trace_distance: local_min <= at_sigma_avg + 1e-9", !ok);
    return r;
}

}  // namespace qkdsec
