#include "cebap/asymptotic.hpp"

#include <cmath>
#include <stdexcept>

namespace cebap {

namespace {

void check_args(double rho, const arma::vec& ev, arma::uword k_users) {
    if (k_users < 2)
        throw std::invalid_argument("xi: needs at least two users (K >= 2)");
    if (!(rho >= 0.0))
        throw std::invalid_argument("xi: rho must be nonnegative");
    if (ev.n_elem == 0)
        throw std::invalid_argument("xi: empty eigenvalue vector");
    for (arma::uword n = 0; n < ev.n_elem; ++n)
        if (!(ev(n) >= 0.0))
            throw std::invalid_argument("xi: eigenvalues must be nonnegative");
}

} // namespace

double xi(double rho, const arma::vec& eigenvalues, arma::uword k_users) {
    check_args(rho, eigenvalues, k_users);
    const double km1 = static_cast<double>(k_users - 1);
    double sum = 0.0;
    for (arma::uword n = 0; n < eigenvalues.n_elem; ++n) {
        const double ev = eigenvalues(n);
        if (ev > 0.0)
            sum += ev / (rho + km1 * ev);
    }
    return sum;
}

double xi_derivative(double rho, const arma::vec& eigenvalues, arma::uword k_users) {
    check_args(rho, eigenvalues, k_users);
    const double km1 = static_cast<double>(k_users - 1);
    double sum = 0.0;
    for (arma::uword n = 0; n < eigenvalues.n_elem; ++n) {
        const double ev = eigenvalues(n);
        if (ev > 0.0) {
            const double d = rho + km1 * ev;
            sum += ev / (d * d);
        }
    }
    return -sum;
}

RhoSolveReport solve_rho(const arma::vec& eigenvalues, arma::uword k_users, arma::uword max_iter,
                         double tol) {
    if (k_users == 0)
        throw std::invalid_argument("solve_rho: K must be positive");
    for (arma::uword n = 0; n < eigenvalues.n_elem; ++n)
        if (!(eigenvalues(n) >= 0.0))
            throw std::invalid_argument("solve_rho: eigenvalues must be nonnegative");

    RhoSolveReport report;
    if (k_users == 1) {
        // xi_1(rho) = sum(lambda) / rho, so the fixed point is explicit.
        report.rho = arma::accu(eigenvalues);
        report.residual = 0.0;
        report.iterate_trace = {report.rho};
        return report;
    }

    report.iterate_trace.push_back(0.0);
    const double xi0 = xi(0.0, eigenvalues, k_users);
    if (xi0 <= 1.0) {
        // Fewer than K positive directions: the balance equation has no
        // positive root and the gain collapses.
        report.degenerate = true;
        report.residual = std::abs(xi0 - 1.0);
        return report;
    }

    double rho = 0.0;
    bool polished = false;
    for (arma::uword it = 0; it < max_iter; ++it) {
        const double f = xi(rho, eigenvalues, k_users) - 1.0;
        if (f < 0.0)
            break; // at or past the root to within roundoff; keep monotone
        if (std::abs(f) <= tol) {
            if (polished)
                break;
            polished = true;
        }
        const double deriv = xi_derivative(rho, eigenvalues, k_users);
        rho -= f / deriv;
        report.iterate_trace.push_back(rho);
        ++report.iterations;
    }
    report.rho = rho;
    report.residual = std::abs(xi(rho, eigenvalues, k_users) - 1.0);
    return report;
}

} // namespace cebap
