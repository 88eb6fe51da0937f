#pragma once

#include <armadillo>
#include <vector>

namespace cebap {

// Solve report for the fixed-point gain rho_K. iterate_trace starts at the
// initial point 0 and appends one value per accepted Newton update; iterates
// are nondecreasing and bounded by the solution. degenerate means
// xi_K(0) <= 1, where the fixed point collapses to rho = 0 (the asymptotic
// per-user gain vanishes).
struct RhoSolveReport {
    double rho = 0.0;
    arma::uword iterations = 0;
    double residual = 0.0;
    std::vector<double> iterate_trace;
    bool degenerate = false;
};

// xi_K(rho) = sum_n lambda_n / (rho + (K - 1) lambda_n). Terms with
// lambda_n = 0 contribute nothing (also at rho = 0). Requires K >= 2,
// rho >= 0, eigenvalues >= 0.
double xi(double rho, const arma::vec& eigenvalues, arma::uword k_users);

// d xi / d rho = -sum_n lambda_n / (rho + (K - 1) lambda_n)^2.
double xi_derivative(double rho, const arma::vec& eigenvalues, arma::uword k_users);

// Newton iteration for xi_K(rho) = 1 from rho = 0. xi is convex and
// decreasing, so the iterates climb monotonically to the root. After the
// residual first meets tol one more Newton step is taken: the residual
// tolerance alone leaves rho short by about tol * rho / (xi'(rho) * rho)
// while the extra quadratic step pins it to machine accuracy.
// K = 1 returns sum(lambda) directly.
RhoSolveReport solve_rho(const arma::vec& eigenvalues, arma::uword k_users,
                         arma::uword max_iter = 20, double tol = 1e-8);

} // namespace cebap
