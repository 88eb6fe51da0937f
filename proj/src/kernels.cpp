#include "cebap/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace cebap {

namespace {

void check_inputs(const AngularGrid& grid, const ArrayLayout& layout, const arma::vec& aps) {
    if (grid.size() == 0)
        throw std::invalid_argument("kernels: empty angular grid");
    if (layout.size() == 0)
        throw std::invalid_argument("kernels: empty layout");
    if (aps.n_elem != grid.size())
        throw std::invalid_argument("kernels: APS length does not match grid size");
}

} // namespace

namespace kernels {

arma::cx_mat frm(const AngularGrid& grid, const ArrayLayout& layout) {
    if (grid.size() == 0 || layout.size() == 0)
        throw std::invalid_argument("frm: empty grid or layout");

    const arma::uword l0 = grid.size();
    const arma::uword n_ant = layout.size();
    arma::cx_mat q(l0, n_ant);

    const double* kx = grid.wavevectors.colptr(0);
    const double* ky = grid.wavevectors.colptr(1);

#pragma omp parallel for schedule(static)
    for (arma::uword n = 0; n < n_ant; ++n) {
        const double x = layout.positions(n, 0);
        const double y = layout.positions(n, 1);
        std::complex<double>* col = q.colptr(n);
        for (arma::uword l = 0; l < l0; ++l) {
            double s, c;
            ::sincos(kx[l] * x + ky[l] * y, &s, &c);
            col[l] = {c, s};
        }
    }
    return q;
}

// Fills the upper triangle (n <= i) entry by entry; each entry is one serial
// sweep over the grid so the summation order never depends on threading.
void covariance_and_s(const AngularGrid& grid, const ArrayLayout& layout, const arma::vec& aps,
                      arma::cx_mat& g, arma::cx_mat& sx, arma::cx_mat& sy) {
    check_inputs(grid, layout, aps);

    const arma::uword l0 = grid.size();
    const arma::uword n_ant = layout.size();
    g.set_size(n_ant, n_ant);
    sx.set_size(n_ant, n_ant);
    sy.set_size(n_ant, n_ant);

    const double* kx = grid.wavevectors.colptr(0);
    const double* ky = grid.wavevectors.colptr(1);
    const double* b = aps.memptr();

    const arma::uword n_pairs = n_ant * (n_ant + 1) / 2;

#pragma omp parallel for schedule(static)
    for (arma::uword p = 0; p < n_pairs; ++p) {
        // Unrank p into (n, i) with n <= i, scanning rows of the triangle.
        arma::uword n = 0;
        arma::uword rem = p;
        while (rem >= n_ant - n) {
            rem -= n_ant - n;
            ++n;
        }
        const arma::uword i = n + rem;

        const double dx = layout.positions(n, 0) - layout.positions(i, 0);
        const double dy = layout.positions(n, 1) - layout.positions(i, 1);

        double g_re = 0.0, g_im = 0.0;
        double sx_re = 0.0, sx_im = 0.0;
        double sy_re = 0.0, sy_im = 0.0;
        for (arma::uword l = 0; l < l0; ++l) {
            double s, c;
            ::sincos(kx[l] * dx + ky[l] * dy, &s, &c);
            const double bl = b[l];
            // b * exp(-j phi)
            g_re += bl * c;
            g_im -= bl * s;
            // j kappa^t b exp(-j phi) = kappa^t b (sin phi + j cos phi)
            const double bx = kx[l] * bl;
            const double by = ky[l] * bl;
            sx_re += bx * s;
            sx_im += bx * c;
            sy_re += by * s;
            sy_im += by * c;
        }
        g(n, i) = {g_re, g_im};
        sx(n, i) = {sx_re, sx_im};
        sy(n, i) = {sy_re, sy_im};
        if (n != i) {
            // Hermitian and skew-Hermitian mirrors are exact by construction.
            g(i, n) = {g_re, -g_im};
            sx(i, n) = {-sx_re, sx_im};
            sy(i, n) = {-sy_re, sy_im};
        }
    }
}

arma::cx_mat covariance_matrix(const AngularGrid& grid, const ArrayLayout& layout,
                               const arma::vec& aps) {
    check_inputs(grid, layout, aps);

    const arma::uword l0 = grid.size();
    const arma::uword n_ant = layout.size();
    arma::cx_mat g(n_ant, n_ant);

    const double* kx = grid.wavevectors.colptr(0);
    const double* ky = grid.wavevectors.colptr(1);
    const double* b = aps.memptr();

    const arma::uword n_pairs = n_ant * (n_ant + 1) / 2;

#pragma omp parallel for schedule(static)
    for (arma::uword p = 0; p < n_pairs; ++p) {
        arma::uword n = 0;
        arma::uword rem = p;
        while (rem >= n_ant - n) {
            rem -= n_ant - n;
            ++n;
        }
        const arma::uword i = n + rem;

        const double dx = layout.positions(n, 0) - layout.positions(i, 0);
        const double dy = layout.positions(n, 1) - layout.positions(i, 1);

        double g_re = 0.0, g_im = 0.0;
        for (arma::uword l = 0; l < l0; ++l) {
            double s, c;
            ::sincos(kx[l] * dx + ky[l] * dy, &s, &c);
            g_re += b[l] * c;
            g_im -= b[l] * s;
        }
        g(n, i) = {g_re, g_im};
        if (n != i)
            g(i, n) = {g_re, -g_im};
    }
    return g;
}

void s_matrix_pair(const AngularGrid& grid, const ArrayLayout& layout, const arma::vec& aps,
                   arma::cx_mat& sx, arma::cx_mat& sy) {
    arma::cx_mat g;
    covariance_and_s(grid, layout, aps, g, sx, sy);
}

} // namespace kernels

namespace reference {

// Textbook loops over std::complex, no shared passes, no threading. These are
// the comparison baseline for the kernels above.

arma::cx_mat frm(const AngularGrid& grid, const ArrayLayout& layout) {
    const arma::uword l0 = grid.size();
    const arma::uword n_ant = layout.size();
    arma::cx_mat q(l0, n_ant);
    for (arma::uword n = 0; n < n_ant; ++n) {
        for (arma::uword l = 0; l < l0; ++l) {
            const double phase = grid.wavevectors(l, 0) * layout.positions(n, 0) +
                                 grid.wavevectors(l, 1) * layout.positions(n, 1);
            q(l, n) = std::polar(1.0, phase);
        }
    }
    return q;
}

arma::cx_mat covariance_matrix(const AngularGrid& grid, const ArrayLayout& layout,
                               const arma::vec& aps) {
    const arma::uword l0 = grid.size();
    const arma::uword n_ant = layout.size();
    arma::cx_mat g(n_ant, n_ant, arma::fill::zeros);
    for (arma::uword n = 0; n < n_ant; ++n) {
        for (arma::uword i = 0; i < n_ant; ++i) {
            std::complex<double> acc = 0.0;
            for (arma::uword l = 0; l < l0; ++l) {
                const double phase = grid.wavevectors(l, 0) *
                                         (layout.positions(n, 0) - layout.positions(i, 0)) +
                                     grid.wavevectors(l, 1) *
                                         (layout.positions(n, 1) - layout.positions(i, 1));
                acc += aps(l) * std::polar(1.0, -phase);
            }
            g(n, i) = acc;
        }
    }
    return g;
}

void s_matrix_pair(const AngularGrid& grid, const ArrayLayout& layout, const arma::vec& aps,
                   arma::cx_mat& sx, arma::cx_mat& sy) {
    const arma::uword l0 = grid.size();
    const arma::uword n_ant = layout.size();
    sx.zeros(n_ant, n_ant);
    sy.zeros(n_ant, n_ant);
    const std::complex<double> j(0.0, 1.0);
    for (arma::uword n = 0; n < n_ant; ++n) {
        for (arma::uword i = 0; i < n_ant; ++i) {
            std::complex<double> ax = 0.0, ay = 0.0;
            for (arma::uword l = 0; l < l0; ++l) {
                const double phase = grid.wavevectors(l, 0) *
                                         (layout.positions(n, 0) - layout.positions(i, 0)) +
                                     grid.wavevectors(l, 1) *
                                         (layout.positions(n, 1) - layout.positions(i, 1));
                const std::complex<double> w = aps(l) * std::polar(1.0, -phase);
                ax += j * grid.wavevectors(l, 0) * w;
                ay += j * grid.wavevectors(l, 1) * w;
            }
            sx(n, i) = ax;
            sy(n, i) = ay;
        }
    }
}

} // namespace reference

} // namespace cebap
