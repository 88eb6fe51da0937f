#pragma once

#include <armadillo>
#include <utility>

#include "cebap/geometry.hpp"
#include "cebap/rng.hpp"

namespace cebap {

// Cell-wide angular power spectrum on a grid: values b_l >= 0, one per grid
// cell, already weighted by the cell areas. total_power is sum(values).
struct Aps {
    arma::vec values;
    double total_power = 0.0;
};

// Antenna-domain covariance of the cell-wide channel with its eigensystem
// (eigenvalues descending, unitary eigenvectors in matching column order).
struct Covariance {
    arma::cx_mat matrix;
    arma::vec eigenvalues;
    arma::cx_mat eigenvectors;
};

// Everything the Monte-Carlo layer needs to draw users and channels: the
// angular grid, per-subregion power responses (columns), the user location
// mixture, the truncated-Poisson load parameter, and the link budget. Powers
// are stored in watts; the dBm values from the file are kept for round-trip
// serialization.
struct Scenario {
    AngularGrid grid;
    arma::mat power_responses;   // L0 x M, column m is subregion m's response
    arma::vec user_distribution; // M, nonnegative, sums to 1
    double user_count_param = 0.0; // K0 of the truncated Poisson
    arma::uword max_users = 0;     // truncation point (antenna count)
    double noise_power = 0.0;      // watts
    double tx_power = 0.0;         // watts
    double noise_power_dbm = 0.0;
    double tx_power_dbm = 0.0;
    arma::mat subregion_centers;   // M x 2 meters, empty when absent
    arma::ivec los_grid_index;     // M, -1 = no LoS entry, empty when absent

    arma::uword subregions() const { return power_responses.n_cols; }
};

// b = D mu: mixture of per-subregion responses under the user distribution.
Aps compute_aps(const arma::mat& power_responses, const arma::vec& user_distribution);

// Assembles G from the grid sum and attaches the eigensystem.
Covariance covariance(const AngularGrid& grid, const ArrayLayout& layout, const Aps& aps);

// Hermitian eigendecomposition with descending eigenvalues. Rejects matrices
// that are not Hermitian within 1e-8 of their norm; eigenvalue noise below
// 1e-10 * trace is clamped to zero so PSD inputs stay PSD.
std::pair<arma::vec, arma::cx_mat> eigen(const arma::cx_mat& hermitian);

// Truncated Poisson on {1, ..., max_users} with rate user_count_param.
arma::uword sample_user_count(const Scenario& scenario, RngStream& rng);

// K user channels: each user picks a subregion from the mixture, draws
// per-cell gains psi ~ CN(0, Diag(b_m)) on the grid, and maps them to the
// antennas through the field-response matrix, h = Q^H psi.
arma::cx_mat sample_channels(const Scenario& scenario, const AngularGrid& grid,
                             const ArrayLayout& layout, arma::uword k_users, RngStream& rng);

// Precomputed sampler for repeated draws against one (scenario, layout) pair.
class ChannelSampler {
  public:
    ChannelSampler(const Scenario& scenario, const AngularGrid& grid, const ArrayLayout& layout);

    // Fills an antennas x k_users matrix; consumes the stream sequentially.
    arma::cx_mat draw(arma::uword k_users, RngStream& rng) const;

  private:
    arma::cx_mat frm_adjoint_;  // N x L0
    arma::mat sqrt_responses_;  // L0 x M
    arma::vec mixture_cdf_;     // M
};

// Scales LoS grid entries by one factor and all other entries by another so
// that the cell-wide LoS/NLoS power ratio becomes the given Rician factor
// while the total (unweighted) response power is preserved.
Scenario rescale_rician(const Scenario& scenario, double rician_factor_db);

// Isotropic Gaussian weights over subregion centers around a focus point.
arma::vec gaussian_user_distribution(const arma::mat& centers, const arma::vec2& focus,
                                     double spread);

// Point on the SW-NE diagonal: (1 - eta) * sw + eta * ne.
arma::vec2 traverse_point(const arma::vec2& sw, const arma::vec2& ne, double eta);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

} // namespace cebap
