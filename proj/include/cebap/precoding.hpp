#pragma once

#include <armadillo>
#include <stdexcept>
#include <string>

namespace cebap {

enum class UtilityKind { weighted_sum_rate, min_weighted_sinr };

UtilityKind parse_utility_kind(const std::string& name); // "sum-rate" | "min-sinr"
std::string utility_kind_name(UtilityKind kind);

// Channel draw too ill-conditioned to zero-force. Monte-Carlo code catches
// this and redraws; everything else should let it propagate.
class RankDeficientError : public std::runtime_error {
  public:
    explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

struct PowerAllocation {
    arma::vec powers; // per-user transmit powers p_k, watts
    arma::vec sinrs;  // gamma_k = p_k / noise_power
    double utility_value = 0.0;
};

// Decorrelated per-user gains under zero-forcing: c_k = 1 / [(H^H H)^-1]_{kk}.
// Requires K <= N and cond(H^H H) below cond_limit.
arma::vec decorrelated_gains(const arma::cx_mat& h, double cond_limit = 1e12);

// W = H (H^H H)^-1 Diag(p)^{1/2}: user k receives sqrt(p_k) h_k^H w_k with
// zero inter-user leakage. Transmit power is sum_k p_k / c_k.
arma::cx_mat zf_precoder(const arma::cx_mat& h, const arma::vec& powers);

// Per-user SINR of an arbitrary precoder: |h_k^H w_k|^2 over noise plus
// inter-user leakage.
arma::vec sinr(const arma::cx_mat& h, const arma::cx_mat& w, double noise_power);

// Exact water-filling for the weighted sum rate under the ZF power coupling
// sum_k p_k / c_k <= total_power. Active set found by descending w_k c_k
// scan; the power constraint is tight at the solution.
PowerAllocation waterfill(const arma::vec& gains, const arma::vec& weights, double total_power,
                          double noise_power);

// Max-min weighted SINR: gamma_k = w_k * gamma0 with
// gamma0 = total_power / (noise_power * sum_k w_k / c_k). Closed form; the
// power constraint is tight.
PowerAllocation maxmin_alloc(const arma::vec& gains, const arma::vec& weights, double total_power,
                             double noise_power);

// weighted_sum_rate: sum_k w_k log2(1 + gamma_k) (bits/s/Hz).
// min_weighted_sinr: min_k gamma_k / w_k.
double utility(const arma::vec& sinrs, const arma::vec& weights, UtilityKind kind);

} // namespace cebap
