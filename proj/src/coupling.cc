#include "qkdsec/coupling.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>

#include "qkdsec/errors.h"

namespace qkdsec {

namespace {

constexpr double kDyadicScale = 0x1.0p60;

std::optional<uint64_t> dyadic_numerator(double p) {
    const double scaled = p * kDyadicScale;
    if (scaled != std::floor(scaled) || scaled > kDyadicScale) return std::nullopt;
    return static_cast<uint64_t>(scaled);
}

double compensated_sum(const std::vector<double> &xs) {
    double sum = 0, comp = 0;
    for (double x : xs) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

void require_same_support(const ClassicalDistribution &p, const ClassicalDistribution &u, const char *who) {
    if (p.support() != u.support()) {
        throw ValidationError(std::string(who) + ": supports differ (" + std::to_string(p.support()) + " vs " +
                              std::to_string(u.support()) + ")");
    }
}

}  // namespace

CouplingTable::CouplingTable(std::size_t size, std::vector<double> joint, ClassicalDistribution row_marginal,
                             ClassicalDistribution col_marginal)
    : size_(size), joint_(std::move(joint)), rows_(std::move(row_marginal)), cols_(std::move(col_marginal)) {
    if (joint_.size() != size_ * size_) throw ValidationError("CouplingTable: joint has wrong number of entries");
    if (rows_.support() != size_ || cols_.support() != size_) throw ValidationError("CouplingTable: marginal size");
    for (double x : joint_) {
        if (!(x >= 0.0)) throw ValidationError("CouplingTable: negative entry");
    }
    if (std::abs(compensated_sum(joint_) - 1.0) > 1e-12) throw ValidationError("CouplingTable: entries do not sum to 1");
    for (std::size_t k = 0; k < size_; ++k) {
        double r = 0, c = 0;
        for (std::size_t j = 0; j < size_; ++j) {
            r += joint_[k * size_ + j];
            c += joint_[j * size_ + k];
        }
        if (std::abs(r - rows_[k]) > 1e-10 || std::abs(c - cols_[k]) > 1e-10) {
            throw ValidationError("CouplingTable: marginal mismatch at index " + std::to_string(k));
        }
    }
}

double statistical_distance(const ClassicalDistribution &p, const ClassicalDistribution &u) {
    require_same_support(p, u, "statistical_distance");
    bool dyadic = true;
    unsigned __int128 acc = 0;
    for (std::size_t k = 0; k < p.support() && dyadic; ++k) {
        const auto a = dyadic_numerator(p[k]);
        const auto b = dyadic_numerator(u[k]);
        if (!a || !b) {
            dyadic = false;
            break;
        }
        acc += *a > *b ? *a - *b : *b - *a;
    }
    if (dyadic) {
        // acc / 2^61, exact up to the final rounding to double.
        return static_cast<double>(acc) * 0x1.0p-61;
    }
    std::vector<double> diffs(p.support());
    for (std::size_t k = 0; k < p.support(); ++k) diffs[k] = std::abs(p[k] - u[k]);
    return 0.5 * compensated_sum(diffs);
}

CouplingTable maximal_coupling(const ClassicalDistribution &p, const ClassicalDistribution &u) {
    require_same_support(p, u, "maximal_coupling");
    const std::size_t n = p.support();
    std::vector<double> s(n), t(n), joint(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::min(p[k], u[k]);
        joint[k * n + k] = m;
        s[k] = p[k] - m;
        t[k] = u[k] - m;
    }
    const double sd = statistical_distance(p, u);
    const bool residual = std::any_of(s.begin(), s.end(), [](double x) { return x > 0; }) ||
                          std::any_of(t.begin(), t.end(), [](double x) { return x > 0; });
    if (sd > 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
            if (s[k] == 0.0) continue;
            for (std::size_t kp = 0; kp < n; ++kp) joint[k * n + kp] += s[k] * t[kp] / sd;
        }
    } else if (residual) {
        throw NumericalError("maximal_coupling: zero statistical distance with nonzero residual mass");
    }
    return CouplingTable(n, std::move(joint), p, u);
}

CouplingTable independent_coupling(const ClassicalDistribution &p, const ClassicalDistribution &u) {
    require_same_support(p, u, "independent_coupling");
    const std::size_t n = p.support();
    std::vector<double> joint(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t kp = 0; kp < n; ++kp) joint[k * n + kp] = p[k] * u[kp];
    }
    return CouplingTable(n, std::move(joint), p, u);
}

double mismatch_prob(const CouplingTable &t) {
    std::vector<double> diag(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) diag[k] = t(k, k);
    return 1.0 - compensated_sum(diag);
}

MetricReport independent_coupling_check(const ClassicalDistribution &p, const ClassicalDistribution &u) {
    const double sd = statistical_distance(p, u);
    const double maximal = mismatch_prob(maximal_coupling(p, u));
    const double independent = mismatch_prob(independent_coupling(p, u));
    const bool identity = std::abs(sd - maximal) <= 1e-12;
    const bool dominated = sd <= independent + 1e-12;
    const bool strict = independent > sd;
    MetricReport r;
    r.add("statistical_distance", sd, "coupling.statistical_distance(P, U)");
    r.add("mismatch_maximal", maximal, "coupling.mismatch_prob(maximal_coupling(P, U))");
    r.add("mismatch_independent", independent, "coupling.mismatch_prob(P x U)");
    r.add("check_coupling_identity", identity ? 1.0 : 0.0, "coupling: |SD - maximal mismatch| <= 1e-12", !identity);
    r.add("check_sd_le_independent", dominated ? 1.0 : 0.0, "coupling: SD <= independent mismatch", !dominated);
    r.add("strict", strict ? 1.0 : 0.0, "coupling: independent mismatch > SD");
    r.add("p_point_mass", p.is_point_mass() ? 1.0 : 0.0, "coupling: P has a single atom");
    return r;
}

MetricReport otp_secrecy_check(const ClassicalDistribution &key, const ClassicalDistribution &plaintext) {
    const std::size_t n = key.support();
    if (plaintext.support() != n || !std::has_single_bit(n)) {
        throw ValidationError("otp_secrecy_check: key and plaintext must range over the same 2^bits strings");
    }
    // Pr(x, c) = Pr_X(x) Pr_K(x xor c)
    double deviation = 0;
    std::size_t excluded = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> joint(n);
        for (std::size_t x = 0; x < n; ++x) joint[x] = plaintext[x] * key[x ^ c];
        const double pc = compensated_sum(joint);
        if (pc <= 0.0) {
            ++excluded;
            continue;
        }
        for (std::size_t x = 0; x < n; ++x) deviation = std::max(deviation, std::abs(joint[x] / pc - plaintext[x]));
    }
    const bool full_support =
        std::all_of(plaintext.probs().begin(), plaintext.probs().end(), [](double p) { return p > 0.0; });
    MetricReport r;
    r.add("max_deviation", deviation, "coupling.otp_secrecy_check: max |Pr(x|c) - Pr(x)| over Pr(c) > 0");
    r.add("perfect_secrecy", deviation <= 1e-12 ? 1.0 : 0.0, "coupling.otp_secrecy_check: deviation <= 1e-12");
    r.add("key_uniform", statistical_distance(key, ClassicalDistribution::uniform(n)) <= 1e-12 ? 1.0 : 0.0,
          "coupling.otp_secrecy_check: SD(key, uniform) <= 1e-12");
    r.add("excluded_ciphertexts", static_cast<double>(excluded),
          "coupling.otp_secrecy_check: ciphertexts with Pr(c) = 0, conditional undefined", excluded > 0);
    r.add("plaintext_full_support", full_support ? 1.0 : 0.0,
          "coupling.otp_secrecy_check: deviation = 0 characterizes a uniform key only when every plaintext is possible");
    return r;
}

}  // namespace qkdsec
