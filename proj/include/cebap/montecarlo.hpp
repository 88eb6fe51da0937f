#pragma once

#include <armadillo>
#include <cstdint>
#include <string>
#include <vector>

#include "cebap/channel.hpp"
#include "cebap/precoding.hpp"

namespace cebap {

// How per-user utility weights are produced for each Monte-Carlo sample.
struct WeightsPolicy {
    enum class Kind { unit, fixed, random } kind = Kind::unit;
    arma::vec fixed_weights; // used by Kind::fixed, length >= drawn user count

    static WeightsPolicy unit() { return {}; }
    static WeightsPolicy fixed(arma::vec weights);
    // Per-sample uniform [0.5, 1.5] weights, renormalized to mean 1.
    static WeightsPolicy random();
};

struct ErgodicEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std / sqrt(n_samples)
    arma::uword n_samples = 0;
    arma::uword n_redraws = 0;
    std::uint64_t seed = 0;
};

struct CMeanReport {
    double mean = 0.0;   // average c_k across users and samples
    double spread = 0.0; // std of the per-sample user-averaged c
    double std_error = 0.0;
    arma::uword n_samples = 0;
    arma::uword n_redraws = 0;
    std::uint64_t seed = 0;
};

// Sample-mean ergodic utility of the optimal-allocation ZF downlink. Each
// sample draws a user count, weights per the policy, and channels; samples
// use counter-derived substreams keyed by the sample index, so estimates do
// not depend on thread count or scheduling. Channel draws whose Gram matrix
// is too ill-conditioned to zero-force are redrawn on a fresh substream;
// more than 1% redraws aborts with diagnostics.
ErgodicEstimate ergodic_utility(const Scenario& scenario, const AngularGrid& grid,
                                const ArrayLayout& layout, UtilityKind kind,
                                const WeightsPolicy& weights, arma::uword n_samples,
                                std::uint64_t seed);

// Monte-Carlo mean of the decorrelated gains c_k at a fixed user count.
CMeanReport empirical_c_mean(const Scenario& scenario, const AngularGrid& grid,
                             const ArrayLayout& layout, arma::uword k_users,
                             arma::uword n_samples, std::uint64_t seed);

struct ResultRow {
    std::string layout_name;
    std::string utility;
    double mean = 0.0;
    double std_error = 0.0;
    arma::uword n_samples = 0;
    std::uint64_t seed = 0;
};

// CSV with header layout_name,utility,mean,std_error,n_samples,seed.
void save_results_csv(const std::vector<ResultRow>& rows, const std::string& path);

} // namespace cebap
