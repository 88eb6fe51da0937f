#include "cebap/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cebap/rng.hpp"

namespace cebap {

WeightsPolicy WeightsPolicy::fixed(arma::vec weights) {
    if (weights.n_elem == 0 || weights.min() <= 0.0)
        throw std::invalid_argument("WeightsPolicy: fixed weights must be positive");
    WeightsPolicy policy;
    policy.kind = Kind::fixed;
    policy.fixed_weights = std::move(weights);
    return policy;
}

WeightsPolicy WeightsPolicy::random() {
    WeightsPolicy policy;
    policy.kind = Kind::random;
    return policy;
}

namespace {

arma::vec draw_weights(const WeightsPolicy& policy, arma::uword k_users, RngStream& rng) {
    switch (policy.kind) {
    case WeightsPolicy::Kind::unit:
        return arma::vec(k_users, arma::fill::ones);
    case WeightsPolicy::Kind::fixed:
        if (policy.fixed_weights.n_elem < k_users)
            throw std::invalid_argument("WeightsPolicy: fewer fixed weights than users");
        return policy.fixed_weights.head(k_users);
    case WeightsPolicy::Kind::random: {
        arma::vec w(k_users);
        for (arma::uword k = 0; k < k_users; ++k)
            w(k) = rng.uniform(0.5, 1.5);
        return w * (static_cast<double>(k_users) / arma::accu(w));
    }
    }
    throw std::logic_error("WeightsPolicy: unreachable");
}

constexpr arma::uword max_attempts = 64;

void check_sample_args(const Scenario& scenario, const AngularGrid& grid, arma::uword n_samples) {
    if (n_samples == 0)
        throw std::invalid_argument("monte carlo: need at least one sample");
    if (scenario.power_responses.n_rows != grid.size())
        throw std::invalid_argument("monte carlo: scenario responses do not match the grid");
    if (!(scenario.noise_power > 0.0) || !(scenario.tx_power > 0.0))
        throw std::invalid_argument("monte carlo: scenario link budget must be positive");
}

void finish_moments(const std::vector<double>& values, double& mean, double& stdev,
                    double& std_error) {
    const double n = static_cast<double>(values.size());
    mean = pairwise_sum(values) / n;
    if (values.size() < 2) {
        stdev = 0.0;
        std_error = 0.0;
        return;
    }
    std::vector<double> sq(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) {
        const double d = values[s] - mean;
        sq[s] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    stdev = std::sqrt(var);
    std_error = stdev / std::sqrt(n);
}

[[noreturn]] void abort_redraws(const char* who, arma::uword redraws, arma::uword n_samples,
                                arma::uword worst_sample, arma::uword worst_attempts) {
    std::ostringstream msg;
    msg << who << ": " << redraws << " rank-deficient redraws over " << n_samples
        << " samples exceeds the 1% budget (worst sample " << worst_sample << ": "
        << worst_attempts << " attempts); the scenario spectrum is too degenerate for "
        << "zero-forcing at this load";
    throw std::runtime_error(msg.str());
}

} // namespace

ErgodicEstimate ergodic_utility(const Scenario& scenario, const AngularGrid& grid,
                                const ArrayLayout& layout, UtilityKind kind,
                                const WeightsPolicy& weights, arma::uword n_samples,
                                std::uint64_t seed) {
    check_sample_args(scenario, grid, n_samples);

    const ChannelSampler sampler(scenario, grid, layout);
    std::vector<double> values(n_samples, 0.0);
    std::vector<arma::uword> redraw_counts(n_samples, 0);
    std::vector<unsigned char> exhausted(n_samples, 0);

#pragma omp parallel for schedule(dynamic, 16)
    for (arma::uword s = 0; s < n_samples; ++s) {
        RngStream rng(seed, s);
        const arma::uword k_users = sample_user_count(scenario, rng);
        const arma::vec w = draw_weights(weights, k_users, rng);

        for (arma::uword attempt = 0; attempt < max_attempts; ++attempt) {
            // Attempt 0 continues the sample stream; retries get fresh
            // substreams so a bad draw cannot repeat itself.
            RngStream retry(seed, s, attempt);
            RngStream& active = attempt == 0 ? rng : retry;
            const arma::cx_mat h = sampler.draw(k_users, active);

            if (arma::abs(h).max() == 0.0) {
                values[s] = 0.0; // dead spectrum carries no rate
                break;
            }
            try {
                const arma::vec gains = decorrelated_gains(h);
                const PowerAllocation alloc =
                    kind == UtilityKind::weighted_sum_rate
                        ? waterfill(gains, w, scenario.tx_power, scenario.noise_power)
                        : maxmin_alloc(gains, w, scenario.tx_power, scenario.noise_power);
                values[s] = alloc.utility_value;
                break;
            } catch (const RankDeficientError&) {
                ++redraw_counts[s];
                if (attempt + 1 == max_attempts)
                    exhausted[s] = 1;
            }
        }
    }

    arma::uword redraws = 0;
    arma::uword worst_sample = 0;
    for (arma::uword s = 0; s < n_samples; ++s) {
        redraws += redraw_counts[s];
        if (redraw_counts[s] > redraw_counts[worst_sample])
            worst_sample = s;
        if (exhausted[s])
            abort_redraws("ergodic_utility", redraws, n_samples, s, max_attempts);
    }
    if (100 * redraws > n_samples)
        abort_redraws("ergodic_utility", redraws, n_samples, worst_sample,
                      redraw_counts[worst_sample]);

    ErgodicEstimate estimate;
    double stdev = 0.0;
    finish_moments(values, estimate.mean, stdev, estimate.std_error);
    estimate.n_samples = n_samples;
    estimate.n_redraws = redraws;
    estimate.seed = seed;
    return estimate;
}

CMeanReport empirical_c_mean(const Scenario& scenario, const AngularGrid& grid,
                             const ArrayLayout& layout, arma::uword k_users,
                             arma::uword n_samples, std::uint64_t seed) {
    check_sample_args(scenario, grid, n_samples);
    if (k_users == 0 || k_users > layout.size())
        throw std::invalid_argument("empirical_c_mean: need 1 <= K <= antenna count");

    const ChannelSampler sampler(scenario, grid, layout);
    std::vector<double> values(n_samples, 0.0);
    std::vector<arma::uword> redraw_counts(n_samples, 0);
    std::vector<unsigned char> exhausted(n_samples, 0);

#pragma omp parallel for schedule(dynamic, 16)
    for (arma::uword s = 0; s < n_samples; ++s) {
        for (arma::uword attempt = 0; attempt < max_attempts; ++attempt) {
            RngStream rng(seed, s, attempt);
            const arma::cx_mat h = sampler.draw(k_users, rng);
            try {
                values[s] = arma::accu(decorrelated_gains(h)) / static_cast<double>(k_users);
                break;
            } catch (const RankDeficientError&) {
                ++redraw_counts[s];
                if (attempt + 1 == max_attempts)
                    exhausted[s] = 1;
            }
        }
    }

    arma::uword redraws = 0;
    arma::uword worst_sample = 0;
    for (arma::uword s = 0; s < n_samples; ++s) {
        redraws += redraw_counts[s];
        if (redraw_counts[s] > redraw_counts[worst_sample])
            worst_sample = s;
        if (exhausted[s])
            abort_redraws("empirical_c_mean", redraws, n_samples, s, max_attempts);
    }
    if (100 * redraws > n_samples)
        abort_redraws("empirical_c_mean", redraws, n_samples, worst_sample,
                      redraw_counts[worst_sample]);

    CMeanReport report;
    finish_moments(values, report.mean, report.spread, report.std_error);
    report.n_samples = n_samples;
    report.n_redraws = redraws;
    report.seed = seed;
    return report;
}

void save_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_results_csv: cannot open " + path);
    out << "layout_name,utility,mean,std_error,n_samples,seed\n";
    char buf[192];
    for (const ResultRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.12g,%.12g,%llu,%llu\n", row.layout_name.c_str(),
                      row.utility.c_str(), row.mean, row.std_error,
                      static_cast<unsigned long long>(row.n_samples),
                      static_cast<unsigned long long>(row.seed));
        out << buf;
    }
    if (!out)
        throw std::runtime_error("save_results_csv: write failed for " + path);
}

} // namespace cebap
