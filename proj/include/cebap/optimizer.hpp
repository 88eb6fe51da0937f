#pragma once

#include <armadillo>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cebap/channel.hpp"
#include "cebap/geometry.hpp"

namespace cebap {

// Penalized ascent configuration. All length-valued fields are meters;
// defaults(wavelength) fills them with the standard multiples of the carrier
// wavelength.
struct LobpoConfig {
    double initial_penalty = 1.0;  // alpha_0 on the barrier term
    double penalty_decay = 0.2;    // tau, multiplies alpha per outer round
    double displacement_tol = 0.0; // outer stop: layout moved less than this
    double initial_step = 0.0;     // epsilon_0 of the normalized ascent step
    double armijo_control = 1e-4;  // eta in the sufficient-increase test
    arma::uword inner_iters = 25;  // ascent steps per outer round
    arma::uword newton_iters = 20; // per rho solve
    arma::uword max_backtracks = 30;
    arma::uword max_outer_rounds = 50;
    double fd_step = 0.0;          // central-difference step, generic variant

    static LobpoConfig defaults(double wavelength);
};

struct OuterIterate {
    ArrayLayout layout;
    double rho_n = 0.0;       // full-load asymptotic gain at this layout
    double penalty = 0.0;     // alpha used for the round that produced it
    double displacement = 0.0; // stacked-coordinate 2-norm moved this round
};

struct OptimizationTrace {
    std::vector<OuterIterate> iterates; // entry 0 is the initial layout
};

struct LobpoResult {
    ArrayLayout layout;
    OptimizationTrace trace;
    bool degenerate = false; // initial spectrum cannot support N users
};

// Interior log-barrier of the placement constraints: pairwise spacing terms
// weighted 1/N^2, region wall terms 1/N. Returns -inf outside the strict
// interior (a valid value for feasibility tests, not an error).
double log_barrier(const ArrayLayout& layout);

// Gradient of the barrier per antenna, split by axis. Errors on layouts at
// or outside the constraint boundary, where the barrier is not differentiable.
std::pair<arma::vec, arma::vec> barrier_gradient(const ArrayLayout& layout);

// Skew-Hermitian position-derivative couplings of the covariance.
std::pair<arma::cx_mat, arma::cx_mat> s_matrices(const AngularGrid& grid,
                                                 const ArrayLayout& layout, const Aps& aps);

// Analytic gradient of the full-load gain rho_N with respect to the stacked
// antenna coordinates, with the gain itself. Errors when rho_N is degenerate
// (zero), where the gradient is undefined.
struct RhoGradient {
    arma::vec dx;
    arma::vec dy;
    double rho_n = 0.0;
};
RhoGradient rho_gradient(const AngularGrid& grid, const ArrayLayout& layout, const Aps& aps);

// One inner round: normalized-gradient ascent on rho_N + penalty * barrier
// with backtracking on the joint step length (halved until the candidate is
// strictly interior and passes the sufficient-increase test). A round with an
// exhausted backtrack keeps the current point. Errors when init is not
// strictly interior.
ArrayLayout gradient_ascent(const AngularGrid& grid, const Aps& aps, const ArrayLayout& init,
                            double penalty, const LobpoConfig& config);

// Outer loop: run gradient_ascent, shrink the penalty by penalty_decay,
// stop when the round displacement falls below displacement_tol. The trace
// records every outer iterate starting with init.
LobpoResult lobpo(const AngularGrid& grid, const Aps& aps, const LobpoConfig& config,
                  const ArrayLayout& init);

// Same outer loop for a black-box layout objective; the objective gradient is
// taken by central differences (config.fd_step), the barrier gradient stays
// analytic. FD evaluations run in parallel, so the objective must be pure.
using LayoutObjective = std::function<double(const ArrayLayout&)>;
LobpoResult lobpo_generic(const LayoutObjective& objective, const ArrayLayout& init,
                          const LobpoConfig& config);
LobpoResult lobpo_generic(const LayoutObjective& objective, double region_x, double region_y,
                          double min_spacing, arma::uword rows, arma::uword cols,
                          const LobpoConfig& config);

// CSV with header outer_iter,alpha,rho_n,displacement_m.
void save_trace_csv(const OptimizationTrace& trace, const std::string& path);

} // namespace cebap
