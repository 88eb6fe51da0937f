#include "cebap/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "cebap/asymptotic.hpp"
#include "cebap/kernels.hpp"

namespace cebap {

LobpoConfig LobpoConfig::defaults(double wavelength) {
    if (!(wavelength > 0.0))
        throw std::invalid_argument("LobpoConfig: wavelength must be positive");
    LobpoConfig config;
    config.initial_penalty = 1.0;
    config.penalty_decay = 0.2;
    config.displacement_tol = 0.01 * wavelength;
    config.initial_step = 0.2 * wavelength;
    config.armijo_control = 1e-4;
    config.inner_iters = 25;
    config.newton_iters = 20;
    config.max_backtracks = 30;
    config.max_outer_rounds = 50;
    config.fd_step = 1e-4 * wavelength;
    return config;
}

double log_barrier(const ArrayLayout& layout) {
    const arma::uword n_ant = layout.size();
    if (n_ant == 0)
        throw std::invalid_argument("log_barrier: empty layout");

    const double n = static_cast<double>(n_ant);
    const double wall_x = 0.25 * layout.region_x * layout.region_x; // (S_x / 2)^2
    const double wall_y = 0.25 * layout.region_y * layout.region_y;
    const double gap = layout.min_spacing * layout.min_spacing;
    const double neg_inf = -std::numeric_limits<double>::infinity();

    double sum = 0.0;
    for (arma::uword a = 0; a < n_ant; ++a) {
        const double x = layout.positions(a, 0);
        const double y = layout.positions(a, 1);
        const double mx = wall_x - x * x;
        const double my = wall_y - y * y;
        if (!(mx > 0.0) || !(my > 0.0))
            return neg_inf;
        sum += (std::log(mx) + std::log(my)) / n;
    }
    for (arma::uword a = 0; a < n_ant; ++a) {
        for (arma::uword b = a + 1; b < n_ant; ++b) {
            const double dx = layout.positions(a, 0) - layout.positions(b, 0);
            const double dy = layout.positions(a, 1) - layout.positions(b, 1);
            const double margin = dx * dx + dy * dy - gap;
            if (!(margin > 0.0))
                return neg_inf;
            sum += std::log(margin) / (n * n);
        }
    }
    return sum;
}

std::pair<arma::vec, arma::vec> barrier_gradient(const ArrayLayout& layout) {
    if (!strictly_interior(layout))
        throw std::domain_error("barrier_gradient: layout not strictly interior");

    const arma::uword n_ant = layout.size();
    const double n = static_cast<double>(n_ant);
    const double wall_x = 0.25 * layout.region_x * layout.region_x;
    const double wall_y = 0.25 * layout.region_y * layout.region_y;
    const double gap = layout.min_spacing * layout.min_spacing;

    arma::vec gx(n_ant), gy(n_ant);
    for (arma::uword a = 0; a < n_ant; ++a) {
        const double x = layout.positions(a, 0);
        const double y = layout.positions(a, 1);
        gx(a) = -2.0 * x / (n * (wall_x - x * x));
        gy(a) = -2.0 * y / (n * (wall_y - y * y));
    }
    for (arma::uword a = 0; a < n_ant; ++a) {
        for (arma::uword b = a + 1; b < n_ant; ++b) {
            const double dx = layout.positions(a, 0) - layout.positions(b, 0);
            const double dy = layout.positions(a, 1) - layout.positions(b, 1);
            const double margin = dx * dx + dy * dy - gap;
            const double fx = 2.0 * dx / (n * n * margin);
            const double fy = 2.0 * dy / (n * n * margin);
            gx(a) += fx;
            gy(a) += fy;
            gx(b) -= fx;
            gy(b) -= fy;
        }
    }
    return {gx, gy};
}

std::pair<arma::cx_mat, arma::cx_mat> s_matrices(const AngularGrid& grid,
                                                 const ArrayLayout& layout, const Aps& aps) {
    arma::cx_mat sx, sy;
    kernels::s_matrix_pair(grid, layout, aps.values, sx, sy);
    return {std::move(sx), std::move(sy)};
}

namespace {

// Gradient of rho_N from an already-solved eigensystem:
// grad_t = 2 rho Re diag(Y^-2 S^t) / tr(Y^-2 G) with
// Y^-2 = U Diag((rho / (rho + (N-1) lambda))^2) U^H and
// tr(Y^-2 G) = sum_n lambda_n (rho / (rho + (N-1) lambda_n))^2.
void rho_gradient_from_eigs(const arma::vec& ev, const arma::cx_mat& evec, double rho,
                            const arma::cx_mat& sx, const arma::cx_mat& sy, arma::vec& dx,
                            arma::vec& dy) {
    const arma::uword n_ant = ev.n_elem;
    const double n_minus_1 = static_cast<double>(n_ant - 1);

    arma::vec shrink(n_ant);
    double denom = 0.0;
    for (arma::uword m = 0; m < n_ant; ++m) {
        const double s = rho / (rho + n_minus_1 * ev(m));
        shrink(m) = s * s;
        denom += ev(m) * shrink(m);
    }
    const arma::cx_mat y2inv = evec * arma::diagmat(shrink) * evec.t();

    dx.set_size(n_ant);
    dy.set_size(n_ant);
    const double scale = 2.0 * rho / denom;
    for (arma::uword n = 0; n < n_ant; ++n) {
        std::complex<double> ax = 0.0, ay = 0.0;
        for (arma::uword m = 0; m < n_ant; ++m) {
            ax += y2inv(n, m) * sx(m, n);
            ay += y2inv(n, m) * sy(m, n);
        }
        dx(n) = scale * ax.real();
        dy(n) = scale * ay.real();
    }
}

struct GradEval {
    double value = 0.0; // objective part only, no barrier
    arma::vec dx;
    arma::vec dy;
    bool ok = true; // false: objective gradient undefined here, stop ascending
};

using GradFn = std::function<GradEval(const ArrayLayout&)>;
using ValueFn = std::function<double(const ArrayLayout&)>;

ArrayLayout ascent_round(const ArrayLayout& init, double penalty, const LobpoConfig& config,
                         const GradFn& grad_fn, const ValueFn& value_fn) {
    if (!strictly_interior(init))
        throw std::invalid_argument("gradient_ascent: init layout not strictly interior");

    ArrayLayout cur = init;
    for (arma::uword it = 0; it < config.inner_iters; ++it) {
        const GradEval eval = grad_fn(cur);
        if (!eval.ok)
            break;

        auto [bx, by] = barrier_gradient(cur);
        const arma::vec gx = eval.dx + penalty * bx;
        const arma::vec gy = eval.dy + penalty * by;
        const double gnorm = std::sqrt(arma::dot(gx, gx) + arma::dot(gy, gy));
        if (gnorm < 1e-14)
            break;

        const double f_cur = eval.value + penalty * log_barrier(cur);

        double step = config.initial_step;
        bool accepted = false;
        ArrayLayout cand = cur;
        for (arma::uword bt = 0; bt < config.max_backtracks; ++bt) {
            const double scale = step / gnorm;
            cand.positions.col(0) = cur.positions.col(0) + scale * gx;
            cand.positions.col(1) = cur.positions.col(1) + scale * gy;
            if (strictly_interior(cand)) {
                const double f_new = value_fn(cand) + penalty * log_barrier(cand);
                if (f_new >= f_cur + config.armijo_control * step * gnorm) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted)
            break; // no acceptable step at this penalty; the point is kept
        cur = cand;
    }
    return cur;
}

LobpoResult outer_loop(const ArrayLayout& init, const LobpoConfig& config, const GradFn& grad_fn,
                       const ValueFn& value_fn) {
    if (!strictly_interior(init))
        throw std::invalid_argument("lobpo: init layout not strictly interior");

    LobpoResult result;
    result.trace.iterates.push_back({init, value_fn(init), config.initial_penalty, 0.0});

    const GradEval probe = grad_fn(init);
    if (!probe.ok) {
        result.layout = init;
        result.degenerate = true;
        return result;
    }

    ArrayLayout cur = init;
    double penalty = config.initial_penalty;
    for (arma::uword round = 0; round < config.max_outer_rounds; ++round) {
        const ArrayLayout next = ascent_round(cur, penalty, config, grad_fn, value_fn);
        const double disp =
            std::sqrt(arma::accu(arma::square(next.positions - cur.positions)));
        result.trace.iterates.push_back({next, value_fn(next), penalty, disp});
        cur = next;
        penalty *= config.penalty_decay;
        if (disp < config.displacement_tol)
            break;
    }
    result.layout = cur;
    return result;
}

} // namespace

RhoGradient rho_gradient(const AngularGrid& grid, const ArrayLayout& layout, const Aps& aps) {
    arma::cx_mat g, sx, sy;
    kernels::covariance_and_s(grid, layout, aps.values, g, sx, sy);
    auto [ev, evec] = eigen(g);

    const RhoSolveReport report = solve_rho(ev, layout.size());
    if (report.degenerate || !(report.rho > 0.0))
        throw std::domain_error("rho_gradient: rho_N is degenerate, gradient undefined");

    RhoGradient out;
    out.rho_n = report.rho;
    rho_gradient_from_eigs(ev, evec, report.rho, sx, sy, out.dx, out.dy);
    return out;
}

namespace {

GradFn make_rho_grad_fn(const AngularGrid& grid, const Aps& aps, const LobpoConfig& config) {
    return [&grid, &aps, &config](const ArrayLayout& layout) {
        GradEval eval;
        arma::cx_mat g, sx, sy;
        kernels::covariance_and_s(grid, layout, aps.values, g, sx, sy);
        auto [ev, evec] = eigen(g);
        const RhoSolveReport report = solve_rho(ev, layout.size(), config.newton_iters);
        if (report.degenerate || !(report.rho > 0.0)) {
            eval.ok = false;
            return eval;
        }
        eval.value = report.rho;
        rho_gradient_from_eigs(ev, evec, report.rho, sx, sy, eval.dx, eval.dy);
        return eval;
    };
}

ValueFn make_rho_value_fn(const AngularGrid& grid, const Aps& aps, const LobpoConfig& config) {
    return [&grid, &aps, &config](const ArrayLayout& layout) {
        const arma::cx_mat g = kernels::covariance_matrix(grid, layout, aps.values);
        auto [ev, evec] = eigen(g);
        (void)evec;
        return solve_rho(ev, layout.size(), config.newton_iters).rho;
    };
}

GradFn make_fd_grad_fn(const LayoutObjective& objective, double fd_step) {
    return [&objective, fd_step](const ArrayLayout& layout) {
        const arma::uword n_ant = layout.size();
        GradEval eval;
        eval.value = objective(layout);
        eval.dx.set_size(n_ant);
        eval.dy.set_size(n_ant);

        const arma::uword coords = 2 * n_ant;
#pragma omp parallel for schedule(dynamic)
        for (arma::uword c = 0; c < coords; ++c) {
            const arma::uword n = c / 2;
            const arma::uword axis = c % 2;
            ArrayLayout shifted = layout;
            shifted.positions(n, axis) = layout.positions(n, axis) + fd_step;
            const double up = objective(shifted);
            shifted.positions(n, axis) = layout.positions(n, axis) - fd_step;
            const double down = objective(shifted);
            const double deriv = (up - down) / (2.0 * fd_step);
            if (axis == 0)
                eval.dx(n) = deriv;
            else
                eval.dy(n) = deriv;
        }
        return eval;
    };
}

} // namespace

ArrayLayout gradient_ascent(const AngularGrid& grid, const Aps& aps, const ArrayLayout& init,
                            double penalty, const LobpoConfig& config) {
    return ascent_round(init, penalty, config, make_rho_grad_fn(grid, aps, config),
                        make_rho_value_fn(grid, aps, config));
}

LobpoResult lobpo(const AngularGrid& grid, const Aps& aps, const LobpoConfig& config,
                  const ArrayLayout& init) {
    return outer_loop(init, config, make_rho_grad_fn(grid, aps, config),
                      make_rho_value_fn(grid, aps, config));
}

LobpoResult lobpo_generic(const LayoutObjective& objective, const ArrayLayout& init,
                          const LobpoConfig& config) {
    if (!(config.fd_step > 0.0))
        throw std::invalid_argument("lobpo_generic: config.fd_step must be positive");
    return outer_loop(init, config, make_fd_grad_fn(objective, config.fd_step),
                      [&objective](const ArrayLayout& layout) { return objective(layout); });
}

LobpoResult lobpo_generic(const LayoutObjective& objective, double region_x, double region_y,
                          double min_spacing, arma::uword rows, arma::uword cols,
                          const LobpoConfig& config) {
    ArrayLayout init = upa_sparse(rows, cols, region_x, region_y, min_spacing);
    return lobpo_generic(objective, init, config);
}

void save_trace_csv(const OptimizationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_trace_csv: cannot open " + path);
    out << "outer_iter,alpha,rho_n,displacement_m\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        const OuterIterate& it = trace.iterates[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g\n", i, it.penalty, it.rho_n,
                      it.displacement);
        out << buf;
    }
    if (!out)
        throw std::runtime_error("save_trace_csv: write failed for " + path);
}

} // namespace cebap
