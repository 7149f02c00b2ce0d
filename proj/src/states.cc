#include "qkdsec/states.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "qkdsec/errors.h"

namespace qkdsec {

namespace {

double neumaier_sum(const std::vector<double> &xs) {
    double sum = 0, comp = 0;
    for (double x : xs) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

KeySpace::KeySpace(unsigned bits, const Config &cfg) : bits_(bits) {
    if (bits == 0) throw ValidationError("KeySpace: bits must be >= 1");
    if (bits >= 32 || (std::size_t{1} << bits) > cfg.dim_cap) {
        throw ResourceError("KeySpace: 2^" + std::to_string(bits) + " keys exceeds cap " + std::to_string(cfg.dim_cap));
    }
}

ClassicalDistribution::ClassicalDistribution(std::vector<double> probs, const Config &cfg) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ValidationError("ClassicalDistribution: empty support");
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
            throw ValidationError("ClassicalDistribution: entry " + std::to_string(i) + " is negative or not finite");
        }
    }
    const double total = neumaier_sum(probs_);
    if (std::abs(total - 1.0) > cfg.prob_sum_tol) {
        std::ostringstream os;
        os.precision(17);
        os << "ClassicalDistribution: probabilities sum to " << total;
        throw ValidationError(os.str());
    }
}

ClassicalDistribution ClassicalDistribution::uniform(std::size_t n) {
    return ClassicalDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ClassicalDistribution ClassicalDistribution::point_mass(std::size_t n, std::size_t at) {
    std::vector<double> p(n, 0.0);
    p.at(at) = 1.0;
    return ClassicalDistribution(std::move(p));
}

bool ClassicalDistribution::is_point_mass() const {
    return std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }) == 1;
}

CqState::CqState(KeySpace keys, std::size_t eve_dim, std::vector<CqBranch> branches, const Config &cfg)
    : keys_(keys), eve_dim_(eve_dim), branches_(std::move(branches)) {
    if (eve_dim_ == 0) throw ValidationError("CqState: eve_dim must be >= 1");
    if (eve_dim_ > cfg.dim_cap) {
        throw ResourceError("CqState: eve_dim " + std::to_string(eve_dim_) + " exceeds cap " +
                            std::to_string(cfg.dim_cap));
    }
    if (branches_.empty()) throw ValidationError("CqState: no branches");
    std::sort(branches_.begin(), branches_.end(), [](const CqBranch &x, const CqBranch &y) {
        return std::pair(x.key_a, x.key_b) < std::pair(y.key_a, y.key_b);
    });
    std::vector<double> probs;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const CqBranch &b = branches_[i];
        const std::string where = "CqState branch (" + std::to_string(b.key_a) + "," + std::to_string(b.key_b) + ")";
        if (b.key_a >= keys_.size() || b.key_b >= keys_.size()) throw ValidationError(where + ": key out of range");
        if (i > 0 && branches_[i - 1].key_a == b.key_a && branches_[i - 1].key_b == b.key_b) {
            throw ValidationError(where + ": duplicate key pair");
        }
        if (!(b.prob >= 0.0) || !std::isfinite(b.prob)) throw ValidationError(where + ": negative probability");
        if (b.eve_op.dim() != eve_dim_) throw ValidationError(where + ": Eve operator has wrong dimension");
        validate_density(b.eve_op, cfg, where + " Eve operator");
        probs.push_back(b.prob);
    }
    const double total = neumaier_sum(probs);
    if (std::abs(total - 1.0) > cfg.prob_sum_tol) {
        std::ostringstream os;
        os.precision(17);
        os << "CqState: branch probabilities sum to " << total;
        throw ValidationError(os.str());
    }
}

double CqState::mismatch_prob() const {
    std::vector<double> p;
    for (const auto &b : branches_) {
        if (b.key_a != b.key_b) p.push_back(b.prob);
    }
    return neumaier_sum(p);
}

bool CqState::keys_agree() const {
    return std::all_of(branches_.begin(), branches_.end(), [](const CqBranch &b) { return b.key_a == b.key_b; });
}

HermitianOperator to_density(const CqState &s, const Config &cfg) {
    const std::size_t ks = s.keys().size();
    const std::size_t d = s.eve_dim();
    if (ks * ks > cfg.dim_cap / d) {
        throw ResourceError("to_density: dimension " + std::to_string(ks * ks * d) + " exceeds cap " +
                            std::to_string(cfg.dim_cap));
    }
    const std::size_t n = ks * ks * d;
    CMatrix out(n, n);
    for (const auto &b : s.branches()) {
        const std::size_t base = joint_index(ks, d, b.key_a, b.key_b, 0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) out(base + i, base + j) = b.prob * b.eve_op(i, j);
        }
    }
    return HermitianOperator::symmetrized(out);
}

CqState ideal_state(const KeySpace &keys, const HermitianOperator &sigma, const Config &cfg) {
    validate_density(sigma, cfg, "ideal_state sigma");
    std::vector<CqBranch> branches;
    branches.reserve(keys.size());
    for (std::size_t k = 0; k < keys.size(); ++k) branches.push_back({k, k, keys.uniform_prob(), sigma});
    return CqState(keys, sigma.dim(), std::move(branches), cfg);
}

CqState correctify(const CqState &s, const Config &cfg) {
    // Accumulate p * rho per Alice key, then renormalize. Lone branches pass
    // through untouched so that the map is idempotent bit for bit.
    struct Merge {
        double prob;
        HermitianOperator weighted;
        const CqBranch *first;
        std::size_t count;
    };
    std::map<std::size_t, Merge> merged;
    for (const auto &b : s.branches()) {
        auto it = merged.find(b.key_a);
        if (it == merged.end()) {
            merged.emplace(b.key_a, Merge{b.prob, b.prob * b.eve_op, &b, 1});
        } else {
            it->second.prob += b.prob;
            it->second.weighted += b.prob * b.eve_op;
            ++it->second.count;
        }
    }
    std::vector<CqBranch> out;
    for (auto &[k, m] : merged) {
        if (m.count == 1 || m.prob == 0.0) {
            // Zero-weight groups keep Alice's first operator as is.
            out.push_back({k, k, m.prob, m.first->eve_op});
        } else {
            m.weighted *= 1.0 / m.prob;
            out.push_back({k, k, m.prob, std::move(m.weighted)});
        }
    }
    return CqState(s.keys(), s.eve_dim(), std::move(out), cfg);
}

HermitianOperator sigma_avg(const CqState &s) {
    HermitianOperator acc = HermitianOperator::zero(s.eve_dim());
    for (const auto &b : s.branches()) acc += b.prob * b.eve_op;
    return acc;
}

ClassicalDistribution key_marginal(const CqState &s, KeySide side, const Config &cfg) {
    std::vector<double> p(s.keys().size(), 0.0);
    for (const auto &b : s.branches()) p[side == KeySide::A ? b.key_a : b.key_b] += b.prob;
    return ClassicalDistribution(std::move(p), cfg);
}

StateVector max_entangled_ket(const KeySpace &keys, const Config &cfg) {
    const std::size_t ks = keys.size();
    if (ks > cfg.dim_cap / ks) throw ResourceError("max_entangled_ket: dimension exceeds cap");
    StateVector v(ks * ks);
    const double amp = std::sqrt(keys.uniform_prob());
    for (std::size_t k = 0; k < ks; ++k) v[k * ks + k] = amp;
    return v;
}

}  // namespace qkdsec
