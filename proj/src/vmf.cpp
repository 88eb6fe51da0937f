#include "cebap/vmf.hpp"

#include <cmath>
#include <stdexcept>

namespace cebap {

namespace {

arma::vec3 unit_or_throw(const arma::vec3& v, const char* who) {
    const double norm = arma::norm(v);
    if (!(norm > 0.0))
        throw std::invalid_argument(std::string(who) + ": zero direction vector");
    return v / norm;
}

// beta * (c / sinh c) * sinc(k0 * d) for one antenna displacement. For large
// c the direct form overflows, so the entry is rewritten with every exponent
// nonpositive: Im(k0 d) <= c always holds, which keeps both exponentials in
// [0, 1].
std::complex<double> closed_form_entry(const arma::vec3& delta, const VmfParams& params) {
    const double k0 = params.wavenumber;
    const double c = k0 * params.concentration;
    const std::complex<double> z =
        k0 * complex_distance(delta, arma::vec3(params.concentration * params.direction));

    if (c <= 30.0) {
        double factor;
        if (c < 1e-4)
            factor = 1.0 - c * c / 6.0; // c / sinh c
        else
            factor = c / std::sinh(c);
        return params.total_power * factor * complex_sinc(z);
    }

    // c / sinh(c) * sin(z) / z with the e^c pulled inside:
    // (c / (j z)) * (e^{j zr - zi - c} - e^{-j zr + zi - c}) / (1 - e^{-2c}).
    const double zr = z.real();
    const double zi = z.imag();
    const std::complex<double> up = std::polar(std::exp(-zi - c), zr);
    const std::complex<double> down = std::polar(std::exp(zi - c), -zr);
    const std::complex<double> num = up - down;
    const double denom = 1.0 - std::exp(-2.0 * c);
    const std::complex<double> jz(-z.imag(), z.real());
    return params.total_power * c * num / (jz * denom);
}

} // namespace

VmfParams make_vmf(const arma::vec3& direction, double concentration, double total_power,
                   double wavenumber) {
    if (!(concentration >= 0.0))
        throw std::invalid_argument("make_vmf: concentration must be nonnegative");
    if (!(total_power > 0.0))
        throw std::invalid_argument("make_vmf: total power must be positive");
    if (!(wavenumber > 0.0))
        throw std::invalid_argument("make_vmf: wavenumber must be positive");

    VmfParams params;
    params.direction = unit_or_throw(direction, "make_vmf");
    params.concentration = concentration;
    params.total_power = total_power;
    params.wavenumber = wavenumber;
    if (concentration > 0.0 && !(params.direction(2) > 0.0))
        throw std::invalid_argument(
            "make_vmf: concentrated spectrum must point into the upper hemisphere");
    return params;
}

Aps vmf_aps(const AngularGrid& grid, const VmfParams& params) {
    if (grid.size() == 0)
        throw std::invalid_argument("vmf_aps: empty grid");
    if (std::abs(grid.wavenumber - params.wavenumber) > 1e-9 * grid.wavenumber)
        throw std::invalid_argument("vmf_aps: grid and parameters disagree on the wavenumber");

    const arma::vec3 nu = params.nu();
    arma::vec expo(grid.size());
    for (arma::uword l = 0; l < grid.size(); ++l)
        expo(l) = nu(0) * grid.wavevectors(l, 0) + nu(1) * grid.wavevectors(l, 1) +
                  nu(2) * grid.wavevectors(l, 2);

    // Shift before exponentiating; the normalization cancels the shift.
    expo -= expo.max();
    arma::vec w = grid.areas % arma::exp(expo);

    Aps aps;
    aps.values = params.total_power * (w / arma::accu(w));
    aps.total_power = params.total_power;
    return aps;
}

std::complex<double> complex_distance(const arma::vec3& delta, const arma::vec3& nu) {
    const double nu0_sq = arma::dot(nu, nu);
    const double a = arma::dot(delta, delta) - nu0_sq;
    const double b = 2.0 * arma::dot(delta, nu);
    const double r = std::hypot(a, b);
    if (r == 0.0)
        return {0.0, 0.0};

    // Principal sqrt of a + jb without cancellation in either component.
    if (a >= 0.0) {
        const double re = std::sqrt(0.5 * (r + a));
        const double im = re > 0.0 ? b / (2.0 * re) : 0.0;
        return {re, im};
    }
    const double im_mag = std::sqrt(0.5 * (r - a));
    const double im = std::copysign(im_mag, b);
    const double re = im_mag > 0.0 ? std::abs(b) / (2.0 * im_mag) : 0.0;
    return {re, im};
}

std::complex<double> complex_sinc(std::complex<double> z) {
    if (std::abs(z) < 1e-6) {
        const std::complex<double> z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

arma::cx_mat closed_form_covariance(const ArrayLayout& layout, const VmfParams& params) {
    if (layout.size() == 0)
        throw std::invalid_argument("closed_form_covariance: empty layout");
    if (!(params.wavenumber > 0.0))
        throw std::invalid_argument("closed_form_covariance: wavenumber must be positive");

    const arma::uword n_ant = layout.size();
    arma::cx_mat g(n_ant, n_ant);
    for (arma::uword n = 0; n < n_ant; ++n) {
        g(n, n) = params.total_power;
        for (arma::uword i = n + 1; i < n_ant; ++i) {
            const arma::vec3 delta = {layout.positions(n, 0) - layout.positions(i, 0),
                                      layout.positions(n, 1) - layout.positions(i, 1), 0.0};
            const std::complex<double> entry = closed_form_entry(delta, params);
            g(n, i) = entry;
            g(i, n) = std::conj(entry);
        }
    }
    return g;
}

SparseLimitReport sparse_limit_check(const VmfParams& params, const arma::vec3& direction_hat,
                                     const arma::vec& separations) {
    if (separations.n_elem < 2)
        throw std::invalid_argument("sparse_limit_check: need at least two separations");
    const arma::vec3 dir = unit_or_throw(direction_hat, "sparse_limit_check");

    SparseLimitReport report;
    report.separations = separations;
    report.magnitudes.set_size(separations.n_elem);
    for (arma::uword s = 0; s < separations.n_elem; ++s) {
        const arma::vec3 delta = separations(s) * dir;
        report.magnitudes(s) = std::abs(closed_form_entry(delta, params)) / params.total_power;
    }
    report.monotone_decay = true;
    for (arma::uword s = 1; s < separations.n_elem; ++s)
        if (!(report.magnitudes(s) < report.magnitudes(s - 1)))
            report.monotone_decay = false;
    return report;
}

ConcentratedLimitReport concentrated_limit_check(const ArrayLayout& layout,
                                                 const arma::vec3& direction_hat,
                                                 double total_power, double wavenumber,
                                                 const arma::vec& concentrations) {
    if (concentrations.n_elem < 2)
        throw std::invalid_argument("concentrated_limit_check: need at least two concentrations");
    const arma::vec3 dir = unit_or_throw(direction_hat, "concentrated_limit_check");
    if (!(dir(2) > 0.0))
        throw std::invalid_argument(
            "concentrated_limit_check: direction must point into the upper hemisphere");

    const arma::uword n_ant = layout.size();
    const double k0 = wavenumber;

    // Rank-1 target: beta v v^H with v_n the steering phase along dir.
    arma::cx_vec v(n_ant);
    for (arma::uword n = 0; n < n_ant; ++n) {
        const double phase =
            -k0 * (layout.positions(n, 0) * dir(0) + layout.positions(n, 1) * dir(1));
        v(n) = std::polar(1.0, phase);
    }
    const arma::cx_mat target = total_power * (v * v.t());

    ConcentratedLimitReport report;
    for (arma::uword s = 0; s < concentrations.n_elem; ++s) {
        const VmfParams params = make_vmf(dir, concentrations(s), total_power, k0);
        const arma::cx_mat g = closed_form_covariance(layout, params);

        ConcentratedLimitEntry entry;
        entry.concentration = concentrations(s);
        entry.residual = arma::norm(g - target, "fro") / arma::norm(g, "fro");

        arma::vec ev = arma::reverse(arma::eig_sym(g));
        entry.lambda2_over_lambda1 =
            ev(0) > 0.0 && ev.n_elem > 1 ? std::abs(ev(1)) / ev(0) : 0.0;

        double worst = 0.0;
        for (arma::uword n = 0; n < n_ant; ++n) {
            for (arma::uword i = 0; i < n_ant; ++i) {
                if (n == i)
                    continue;
                const double want = -k0 * ((layout.positions(n, 0) - layout.positions(i, 0)) * dir(0) +
                                           (layout.positions(n, 1) - layout.positions(i, 1)) * dir(1));
                double err = std::arg(g(n, i)) - want;
                err = std::remainder(err, 2.0 * M_PI);
                worst = std::max(worst, std::abs(err));
            }
        }
        entry.max_phase_error = worst;
        report.entries.push_back(entry);
    }

    report.residual_decreasing = true;
    for (std::size_t s = 1; s < report.entries.size(); ++s)
        if (!(report.entries[s].residual < report.entries[s - 1].residual))
            report.residual_decreasing = false;
    return report;
}

} // namespace cebap
