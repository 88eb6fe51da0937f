#include "cebap/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cebap {

UtilityKind parse_utility_kind(const std::string& name) {
    if (name == "sum-rate")
        return UtilityKind::weighted_sum_rate;
    if (name == "min-sinr")
        return UtilityKind::min_weighted_sinr;
    throw std::invalid_argument("unknown utility '" + name + "' (expected sum-rate or min-sinr)");
}

std::string utility_kind_name(UtilityKind kind) {
    return kind == UtilityKind::weighted_sum_rate ? "sum-rate" : "min-sinr";
}

namespace {

// Gram matrix eigensystem shared by the gain and precoder paths. Throws when
// the draw cannot be zero-forced reliably.
void gram_eigs(const arma::cx_mat& h, double cond_limit, arma::vec& ev, arma::cx_mat& vec) {
    if (h.n_cols == 0)
        throw std::invalid_argument("precoding: no users");
    if (h.n_cols > h.n_rows)
        throw RankDeficientError("precoding: more users than antennas");

    const arma::cx_mat gram = h.t() * h;
    if (!arma::eig_sym(ev, vec, gram))
        throw std::runtime_error("precoding: Gram eigendecomposition failed");

    const double ev_max = ev(ev.n_elem - 1); // ascending order
    const double ev_min = ev(0);
    if (!(ev_min > 0.0) || ev_max / ev_min > cond_limit) {
        std::ostringstream msg;
        msg << "precoding: Gram matrix condition " << (ev_min > 0.0 ? ev_max / ev_min : INFINITY)
            << " exceeds limit " << cond_limit;
        throw RankDeficientError(msg.str());
    }
}

void check_alloc_args(const arma::vec& gains, const arma::vec& weights, double total_power,
                      double noise_power) {
    if (gains.n_elem == 0 || gains.n_elem != weights.n_elem)
        throw std::invalid_argument("power allocation: gain/weight length mismatch");
    if (gains.min() <= 0.0)
        throw std::invalid_argument("power allocation: gains must be positive");
    if (weights.min() <= 0.0)
        throw std::invalid_argument("power allocation: weights must be positive");
    if (!(total_power > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("power allocation: powers must be positive");
}

} // namespace

arma::vec decorrelated_gains(const arma::cx_mat& h, double cond_limit) {
    arma::vec ev;
    arma::cx_mat vec;
    gram_eigs(h, cond_limit, ev, vec);

    // [(H^H H)^-1]_{kk} = sum_m |V_{km}|^2 / lambda_m via the eigensystem.
    const arma::uword k_users = h.n_cols;
    arma::vec gains(k_users);
    for (arma::uword k = 0; k < k_users; ++k) {
        double diag = 0.0;
        for (arma::uword m = 0; m < k_users; ++m)
            diag += std::norm(vec(k, m)) / ev(m);
        gains(k) = 1.0 / diag;
    }
    return gains;
}

arma::cx_mat zf_precoder(const arma::cx_mat& h, const arma::vec& powers) {
    if (powers.n_elem != h.n_cols)
        throw std::invalid_argument("zf_precoder: one power per user required");
    if (powers.min() < 0.0)
        throw std::invalid_argument("zf_precoder: negative power");

    arma::vec ev;
    arma::cx_mat vec;
    gram_eigs(h, 1e12, ev, vec);

    const arma::cx_mat gram_inv = vec * arma::diagmat(1.0 / ev) * vec.t();
    return h * gram_inv * arma::diagmat(arma::sqrt(powers));
}

arma::vec sinr(const arma::cx_mat& h, const arma::cx_mat& w, double noise_power) {
    if (h.n_rows != w.n_rows || h.n_cols != w.n_cols)
        throw std::invalid_argument("sinr: channel and precoder shapes differ");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("sinr: noise power must be positive");

    const arma::cx_mat cross = h.t() * w; // [cross]_{ki} = h_k^H w_i
    const arma::uword k_users = h.n_cols;
    arma::vec out(k_users);
    for (arma::uword k = 0; k < k_users; ++k) {
        const double signal = std::norm(cross(k, k));
        double leak = 0.0;
        for (arma::uword i = 0; i < k_users; ++i)
            if (i != k)
                leak += std::norm(cross(k, i));
        out(k) = signal / (noise_power + leak);
    }
    return out;
}

PowerAllocation waterfill(const arma::vec& gains, const arma::vec& weights, double total_power,
                          double noise_power) {
    check_alloc_args(gains, weights, total_power, noise_power);
    const arma::uword k_users = gains.n_elem;

    // Users sorted by w_k c_k descending; the KKT active set is a prefix.
    std::vector<arma::uword> order(k_users);
    std::iota(order.begin(), order.end(), arma::uword(0));
    std::stable_sort(order.begin(), order.end(), [&](arma::uword a, arma::uword b) {
        return weights(a) * gains(a) > weights(b) * gains(b);
    });

    arma::vec powers(k_users, arma::fill::zeros);
    for (arma::uword m = k_users; m >= 1; --m) {
        // Water level for active prefix of size m:
        // nu = sum w / (P_T + sigma^2 sum 1/c) over the prefix.
        double w_sum = 0.0, inv_c_sum = 0.0;
        for (arma::uword j = 0; j < m; ++j) {
            w_sum += weights(order[j]);
            inv_c_sum += 1.0 / gains(order[j]);
        }
        const double level = w_sum / (total_power + noise_power * inv_c_sum);
        const arma::uword last = order[m - 1];
        if (weights(last) * gains(last) / level - noise_power > 0.0) {
            for (arma::uword j = 0; j < m; ++j) {
                const arma::uword k = order[j];
                powers(k) = weights(k) * gains(k) / level - noise_power;
            }
            break;
        }
    }

    PowerAllocation alloc;
    alloc.powers = powers;
    alloc.sinrs = powers / noise_power;
    alloc.utility_value = utility(alloc.sinrs, weights, UtilityKind::weighted_sum_rate);
    return alloc;
}

PowerAllocation maxmin_alloc(const arma::vec& gains, const arma::vec& weights, double total_power,
                             double noise_power) {
    check_alloc_args(gains, weights, total_power, noise_power);

    const double gamma0 = total_power / (noise_power * arma::accu(weights / gains));

    PowerAllocation alloc;
    alloc.sinrs = weights * gamma0;
    alloc.powers = noise_power * alloc.sinrs;
    alloc.utility_value = gamma0;
    return alloc;
}

double utility(const arma::vec& sinrs, const arma::vec& weights, UtilityKind kind) {
    if (sinrs.n_elem == 0 || sinrs.n_elem != weights.n_elem)
        throw std::invalid_argument("utility: SINR/weight length mismatch");

    if (kind == UtilityKind::weighted_sum_rate) {
        double sum = 0.0;
        for (arma::uword k = 0; k < sinrs.n_elem; ++k)
            sum += weights(k) * std::log2(1.0 + sinrs(k));
        return sum;
    }
    double worst = INFINITY;
    for (arma::uword k = 0; k < sinrs.n_elem; ++k)
        worst = std::min(worst, sinrs(k) / weights(k));
    return worst;
}

} // namespace cebap
