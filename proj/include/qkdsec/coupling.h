#pragma once

#include <cstddef>
#include <vector>

#include "qkdsec/report.h"
#include "qkdsec/states.h"

namespace qkdsec {

/// Joint distribution R(k, k') with its two marginals.
class CouplingTable {
   public:
    /// Validates that `joint` (row-major size x size) is nonnegative, sums to
    /// one, and reproduces both marginals within 1e-10.
    CouplingTable(std::size_t size, std::vector<double> joint, ClassicalDistribution row_marginal,
                  ClassicalDistribution col_marginal);

    std::size_t size() const { return size_; }
    double operator()(std::size_t k, std::size_t kp) const { return joint_[k * size_ + kp]; }
    const std::vector<double> &joint() const { return joint_; }
    const ClassicalDistribution &row_marginal() const { return rows_; }
    const ClassicalDistribution &col_marginal() const { return cols_; }

   private:
    std::size_t size_;
    std::vector<double> joint_;
    ClassicalDistribution rows_;
    ClassicalDistribution cols_;
};

/// 1/2 sum_k |p(k) - u(k)|. Exact when every entry is a multiple of 2^-60
/// (dyadic key probabilities); compensated floating point otherwise.
double statistical_distance(const ClassicalDistribution &p, const ClassicalDistribution &u);

/// R = R' + S T^T / SD with R'(k,k) = min(P(k), U(k)), S = P - min(P, U),
/// T = U - min(P, U). The completion term is an outer product, so it fills
/// rows by S and columns by T at once; R = diag(P) when SD = 0.
CouplingTable maximal_coupling(const ClassicalDistribution &p, const ClassicalDistribution &u);

/// R = P U^T.
CouplingTable independent_coupling(const ClassicalDistribution &p, const ClassicalDistribution &u);

/// 1 - sum_k R(k, k)
double mismatch_prob(const CouplingTable &t);

/// SD(P, U) next to the mismatch under the maximal and the independent
/// couplings. `strict` is set when the independent mismatch exceeds SD.
MetricReport independent_coupling_check(const ClassicalDistribution &p, const ClassicalDistribution &u);

/// One-time pad C = X xor K over equal-length bit strings. Reports
/// max_{x, c: Pr(c) > 0} |Pr(x | c) - Pr(x)| by exhaustive enumeration.
MetricReport otp_secrecy_check(const ClassicalDistribution &key, const ClassicalDistribution &plaintext);

}  // namespace qkdsec
