#pragma once

#include <armadillo>
#include <complex>
#include <vector>

#include "cebap/channel.hpp"
#include "cebap/geometry.hpp"

namespace cebap {

// Von Mises-Fisher angular power spectrum on the wavenumber sphere:
// p(kappa) = beta * exp(nu . kappa) / B with nu = concentration * direction.
// concentration is in meters (it multiplies rad/m wavevectors);
// concentration = 0 is the isotropic spectrum. For positive concentration the
// mean direction must point into the upper hemisphere, where the array sees
// arrivals.
struct VmfParams {
    arma::vec3 direction = {0.0, 0.0, 1.0}; // unit mean direction
    double concentration = 0.0;             // nu0, meters
    double total_power = 1.0;               // beta
    double wavenumber = 0.0;                // k0, rad/m

    arma::vec3 nu() const { return concentration * direction; }
};

// Normalizes the direction and validates the parameter set.
VmfParams make_vmf(const arma::vec3& direction, double concentration, double total_power,
                   double wavenumber);

// Discretized spectrum: b_l = omega_l * exp(nu . kappa_l), normalized so the
// values sum to total_power.
Aps vmf_aps(const AngularGrid& grid, const VmfParams& params);

// Principal square root of |delta|^2 - nu0^2 + 2j delta . nu, evaluated
// branch-by-branch so neither component cancels. The imaginary part never
// exceeds nu0.
std::complex<double> complex_distance(const arma::vec3& delta, const arma::vec3& nu);

// sin(z) / z with a series fallback near zero.
std::complex<double> complex_sinc(std::complex<double> z);

// Full-sphere closed form of the covariance under the vMF spectrum:
// [G]_{ni} = beta * (c / sinh c) * sinc(k0 * d(r_n - r_i)), c = k0 * nu0.
// Valid as an approximation of the hemisphere integral when the spectrum is
// concentrated well inside the upper hemisphere. Hermitian with diagonal
// exactly beta.
arma::cx_mat closed_form_covariance(const ArrayLayout& layout, const VmfParams& params);

// |[G]_{ni}| / beta over growing antenna separations along direction_hat
// (in-plane). Under a broad spectrum the correlation magnitude must decay.
struct SparseLimitReport {
    arma::vec separations;        // meters
    arma::vec magnitudes;         // |G| / beta per separation
    bool monotone_decay = false;
};
SparseLimitReport sparse_limit_check(const VmfParams& params, const arma::vec3& direction_hat,
                                     const arma::vec& separations);

// Rank-1 convergence of the closed form as the concentration grows: residual
// |G - beta v v^H|_F / |G|_F with [v]_n = exp(-j k0 r_n . direction_hat),
// the ratio of the two largest eigenvalues, and the worst phase error of the
// off-diagonal entries against -k0 (r_n - r_i) . direction_hat.
struct ConcentratedLimitEntry {
    double concentration = 0.0;
    double residual = 0.0;
    double lambda2_over_lambda1 = 0.0;
    double max_phase_error = 0.0; // radians
};
struct ConcentratedLimitReport {
    std::vector<ConcentratedLimitEntry> entries;
    bool residual_decreasing = false;
};
ConcentratedLimitReport concentrated_limit_check(const ArrayLayout& layout,
                                                 const arma::vec3& direction_hat,
                                                 double total_power, double wavenumber,
                                                 const arma::vec& concentrations);

} // namespace cebap
