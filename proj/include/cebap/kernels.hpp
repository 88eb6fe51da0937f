#pragma once

#include <armadillo>

#include "cebap/geometry.hpp"

namespace cebap {

// Assembly kernels shared by the channel and optimizer modules. The OpenMP
// versions parallelize over output entries (or columns); every entry is a
// fixed-order serial sum over the angular grid, so results are bit-identical
// for any thread count. cebap::reference holds serial twins of the same
// loops, kept for equivalence tests and the kernel benchmark.
namespace kernels {

// [Q]_{ln} = exp(j kappa_l . r_n) with r_n in the z = 0 plane.
arma::cx_mat frm(const AngularGrid& grid, const ArrayLayout& layout);

// [G]_{ni} = sum_l b_l exp(-j kappa_l . (r_n - r_i)). Hermitian by
// construction (lower triangle mirrored), real diagonal equal to sum(b).
arma::cx_mat covariance_matrix(const AngularGrid& grid, const ArrayLayout& layout,
                               const arma::vec& aps_values);

// [S^t]_{ni} = sum_l j kappa_l^t b_l exp(-j kappa_l . (r_n - r_i)) for
// t = x, y. Skew-Hermitian by construction.
void s_matrix_pair(const AngularGrid& grid, const ArrayLayout& layout,
                   const arma::vec& aps_values, arma::cx_mat& sx, arma::cx_mat& sy);

// One shared pass over the grid filling G, S^x, S^y together (the sin/cos
// evaluations dominate and are identical for the three matrices).
void covariance_and_s(const AngularGrid& grid, const ArrayLayout& layout,
                      const arma::vec& aps_values, arma::cx_mat& g, arma::cx_mat& sx,
                      arma::cx_mat& sy);

} // namespace kernels

namespace reference {

arma::cx_mat frm(const AngularGrid& grid, const ArrayLayout& layout);
arma::cx_mat covariance_matrix(const AngularGrid& grid, const ArrayLayout& layout,
                               const arma::vec& aps_values);
void s_matrix_pair(const AngularGrid& grid, const ArrayLayout& layout,
                   const arma::vec& aps_values, arma::cx_mat& sx, arma::cx_mat& sy);

} // namespace reference

} // namespace cebap
