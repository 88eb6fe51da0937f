#include "cebap/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "cebap/kernels.hpp"

namespace cebap {

Aps compute_aps(const arma::mat& power_responses, const arma::vec& user_distribution) {
    if (power_responses.n_cols != user_distribution.n_elem)
        throw std::invalid_argument("compute_aps: response columns and distribution differ");
    if (power_responses.n_rows == 0 || power_responses.n_cols == 0)
        throw std::invalid_argument("compute_aps: empty response matrix");
    if (power_responses.min() < 0.0)
        throw std::invalid_argument("compute_aps: negative response power");
    if (user_distribution.min() < 0.0)
        throw std::invalid_argument("compute_aps: negative mixture weight");
    if (std::abs(arma::accu(user_distribution) - 1.0) > 1e-9)
        throw std::invalid_argument("compute_aps: user distribution must sum to 1");

    Aps aps;
    aps.values = power_responses * user_distribution;
    aps.total_power = arma::accu(aps.values);
    return aps;
}

std::pair<arma::vec, arma::cx_mat> eigen(const arma::cx_mat& hermitian) {
    if (hermitian.n_rows != hermitian.n_cols || hermitian.n_rows == 0)
        throw std::invalid_argument("eigen: matrix must be square and nonempty");

    const double scale = std::max(1.0, arma::abs(hermitian).max());
    const double asym = arma::abs(hermitian - hermitian.t()).max();
    if (asym > 1e-8 * scale)
        throw std::invalid_argument("eigen: matrix is not Hermitian");

    // Exact symmetrization so LAPACK sees one consistent triangle.
    const arma::cx_mat sym = 0.5 * (hermitian + hermitian.t());

    arma::vec ev;
    arma::cx_mat vec;
    if (!arma::eig_sym(ev, vec, sym))
        throw std::runtime_error("eigen: eigendecomposition failed");

    // Ascending from LAPACK; flip to descending with matching columns.
    ev = arma::reverse(ev);
    vec = arma::fliplr(vec);

    // PSD inputs can pick up negative noise of order eps * trace; clamp it.
    const double clamp = 1e-10 * std::abs(arma::trace(sym).real());
    for (arma::uword n = 0; n < ev.n_elem; ++n)
        if (ev(n) < 0.0 && -ev(n) < clamp)
            ev(n) = 0.0;
    return {ev, vec};
}

Covariance covariance(const AngularGrid& grid, const ArrayLayout& layout, const Aps& aps) {
    Covariance cov;
    cov.matrix = kernels::covariance_matrix(grid, layout, aps.values);
    auto [ev, vec] = eigen(cov.matrix);
    cov.eigenvalues = std::move(ev);
    cov.eigenvectors = std::move(vec);
    return cov;
}

arma::uword sample_user_count(const Scenario& scenario, RngStream& rng) {
    const arma::uword cap = scenario.max_users;
    if (cap == 0)
        throw std::invalid_argument("sample_user_count: max_users must be positive");
    if (!(scenario.user_count_param > 0.0))
        throw std::invalid_argument("sample_user_count: user count parameter must be positive");

    // Truncated Poisson on {1, ..., cap}: weights K0^n / n! built iteratively.
    arma::vec w(cap);
    double term = scenario.user_count_param;
    w(0) = term;
    for (arma::uword n = 2; n <= cap; ++n) {
        term *= scenario.user_count_param / static_cast<double>(n);
        w(n - 1) = term;
    }
    const double total = arma::accu(w);

    const double u = rng.next_unit() * total;
    double acc = 0.0;
    for (arma::uword n = 0; n < cap; ++n) {
        acc += w(n);
        if (u < acc)
            return n + 1;
    }
    return cap;
}

ChannelSampler::ChannelSampler(const Scenario& scenario, const AngularGrid& grid,
                               const ArrayLayout& layout) {
    if (scenario.power_responses.n_rows != grid.size())
        throw std::invalid_argument("ChannelSampler: response rows do not match grid size");
    if (scenario.power_responses.n_cols != scenario.user_distribution.n_elem)
        throw std::invalid_argument("ChannelSampler: response columns and distribution differ");

    frm_adjoint_ = kernels::frm(grid, layout).t();
    sqrt_responses_ = arma::sqrt(scenario.power_responses);
    mixture_cdf_ = arma::cumsum(scenario.user_distribution);
}

arma::cx_mat ChannelSampler::draw(arma::uword k_users, RngStream& rng) const {
    if (k_users == 0)
        throw std::invalid_argument("ChannelSampler: need at least one user");

    const arma::uword l0 = sqrt_responses_.n_rows;
    const arma::uword m_regions = mixture_cdf_.n_elem;
    arma::cx_mat h(frm_adjoint_.n_rows, k_users);
    arma::cx_vec psi(l0);

    for (arma::uword k = 0; k < k_users; ++k) {
        arma::uword m = 0;
        if (m_regions > 1) {
            const double u = rng.next_unit();
            while (m + 1 < m_regions && u >= mixture_cdf_(m))
                ++m;
        }
        const double* amp = sqrt_responses_.colptr(m);
        for (arma::uword l = 0; l < l0; ++l)
            psi(l) = amp[l] * rng.cnormal();
        h.col(k) = frm_adjoint_ * psi;
    }
    return h;
}

arma::cx_mat sample_channels(const Scenario& scenario, const AngularGrid& grid,
                             const ArrayLayout& layout, arma::uword k_users, RngStream& rng) {
    return ChannelSampler(scenario, grid, layout).draw(k_users, rng);
}

Scenario rescale_rician(const Scenario& scenario, double rician_factor_db) {
    if (scenario.los_grid_index.n_elem != scenario.power_responses.n_cols)
        throw std::invalid_argument("rescale_rician: scenario carries no LoS index per subregion");

    double los_power = 0.0;
    for (arma::uword m = 0; m < scenario.power_responses.n_cols; ++m) {
        const arma::sword l = scenario.los_grid_index(m);
        if (l < 0)
            continue;
        if (static_cast<arma::uword>(l) >= scenario.power_responses.n_rows)
            throw std::invalid_argument("rescale_rician: LoS grid index out of range");
        los_power += scenario.power_responses(static_cast<arma::uword>(l), m);
    }
    const double total = arma::accu(scenario.power_responses);
    const double nlos_power = total - los_power;
    if (!(los_power > 0.0))
        throw std::invalid_argument("rescale_rician: no LoS power to rescale");
    if (!(nlos_power > 0.0))
        throw std::invalid_argument("rescale_rician: no diffuse power to rescale");

    // Split the (unchanged) total so LoS/NLoS = R cell-wide.
    const double ratio = std::pow(10.0, rician_factor_db / 10.0);
    const double scale_los = ratio * total / ((1.0 + ratio) * los_power);
    const double scale_nlos = total / ((1.0 + ratio) * nlos_power);

    Scenario out = scenario;
    out.power_responses *= scale_nlos;
    for (arma::uword m = 0; m < out.power_responses.n_cols; ++m) {
        const arma::sword l = out.los_grid_index(m);
        if (l >= 0)
            out.power_responses(static_cast<arma::uword>(l), m) =
                scenario.power_responses(static_cast<arma::uword>(l), m) * scale_los;
    }
    return out;
}

arma::vec gaussian_user_distribution(const arma::mat& centers, const arma::vec2& focus,
                                     double spread) {
    if (centers.n_cols != 2 || centers.n_rows == 0)
        throw std::invalid_argument("gaussian_user_distribution: centers must be M x 2");
    if (!(spread > 0.0))
        throw std::invalid_argument("gaussian_user_distribution: spread must be positive");

    arma::vec log_w(centers.n_rows);
    for (arma::uword m = 0; m < centers.n_rows; ++m) {
        const double dx = centers(m, 0) - focus(0);
        const double dy = centers(m, 1) - focus(1);
        log_w(m) = -(dx * dx + dy * dy) / (2.0 * spread * spread);
    }
    // Shift before exponentiating so distant centers underflow to 0, not NaN.
    log_w -= log_w.max();
    arma::vec w = arma::exp(log_w);
    return w / arma::accu(w);
}

arma::vec2 traverse_point(const arma::vec2& sw, const arma::vec2& ne, double eta) {
    return (1.0 - eta) * sw + eta * ne;
}

double dbm_to_watts(double dbm) {
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watts_to_dbm(double watts) {
    if (!(watts > 0.0))
        throw std::invalid_argument("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(watts) + 30.0;
}

} // namespace cebap
