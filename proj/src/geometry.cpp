#include "cebap/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cebap/kernels.hpp"

namespace cebap {

AngularGrid build_grid(arma::uword n_elevation, arma::uword n_azimuth, double wavelength) {
    if (n_elevation == 0 || n_azimuth == 0)
        throw std::invalid_argument("build_grid: grid dimensions must be positive");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("build_grid: wavelength must be positive");

    AngularGrid grid;
    grid.n_elevation = n_elevation;
    grid.n_azimuth = n_azimuth;
    grid.wavelength = wavelength;
    grid.wavenumber = 2.0 * M_PI / wavelength;

    const arma::uword total = n_elevation * n_azimuth;
    grid.wavevectors.set_size(total, 3);
    grid.areas.set_size(total);

    const double k0 = grid.wavenumber;
    const double d_theta = (M_PI / 2.0) / static_cast<double>(n_elevation);
    const double d_phi = (2.0 * M_PI) / static_cast<double>(n_azimuth);

    for (arma::uword i = 0; i < n_elevation; ++i) {
        const double theta = (static_cast<double>(i) + 0.5) * d_theta;
        // Exact area of one cell in the elevation band: the integral of
        // cos(theta) over the band times the azimuth width, scaled to the
        // radius-k0 sphere.
        const double band = std::sin(theta + 0.5 * d_theta) - std::sin(theta - 0.5 * d_theta);
        const double area = k0 * k0 * band * d_phi;
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        for (arma::uword j = 0; j < n_azimuth; ++j) {
            const double phi = (static_cast<double>(j) + 0.5) * d_phi;
            const arma::uword l = i * n_azimuth + j;
            grid.wavevectors(l, 0) = k0 * ct * std::cos(phi);
            grid.wavevectors(l, 1) = k0 * ct * std::sin(phi);
            grid.wavevectors(l, 2) = k0 * st;
            grid.areas(l) = area;
        }
    }
    return grid;
}

arma::cx_mat frm(const AngularGrid& grid, const ArrayLayout& layout) {
    return kernels::frm(grid, layout);
}

namespace {

ArrayLayout make_lattice(arma::uword rows, arma::uword cols, double spacing_x, double spacing_y) {
    ArrayLayout layout;
    layout.positions.set_size(rows * cols, 2);
    const double cx = 0.5 * static_cast<double>(cols - 1);
    const double cy = 0.5 * static_cast<double>(rows - 1);
    for (arma::uword r = 0; r < rows; ++r) {
        for (arma::uword c = 0; c < cols; ++c) {
            const arma::uword n = r * cols + c;
            layout.positions(n, 0) = (static_cast<double>(c) - cx) * spacing_x;
            layout.positions(n, 1) = (static_cast<double>(r) - cy) * spacing_y;
        }
    }
    return layout;
}

} // namespace

ArrayLayout upa_dense(arma::uword rows, arma::uword cols, double spacing, double region_x,
                      double region_y, double min_spacing) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("upa_dense: lattice dimensions must be positive");
    if (!(spacing > 0.0))
        throw std::invalid_argument("upa_dense: spacing must be positive");

    ArrayLayout layout = make_lattice(rows, cols, spacing, spacing);
    layout.region_x = region_x > 0.0 ? region_x : static_cast<double>(cols) * spacing;
    layout.region_y = region_y > 0.0 ? region_y : static_cast<double>(rows) * spacing;
    layout.min_spacing = min_spacing > 0.0 ? min_spacing : spacing;
    return layout;
}

ArrayLayout upa_sparse(arma::uword rows, arma::uword cols, double region_x, double region_y,
                       double min_spacing) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("upa_sparse: lattice dimensions must be positive");
    if (!(region_x > 0.0) || !(region_y > 0.0))
        throw std::invalid_argument("upa_sparse: region must be positive");

    const double spacing_x = region_x / static_cast<double>(cols);
    const double spacing_y = region_y / static_cast<double>(rows);
    if (min_spacing > 0.0 && std::min(spacing_x, spacing_y) < min_spacing) {
        std::ostringstream msg;
        msg << "upa_sparse: infeasible spacing (< " << min_spacing << " m): lattice pitch "
            << std::min(spacing_x, spacing_y) << " m";
        throw std::invalid_argument(msg.str());
    }

    ArrayLayout layout = make_lattice(rows, cols, spacing_x, spacing_y);
    layout.region_x = region_x;
    layout.region_y = region_y;
    layout.min_spacing = min_spacing;
    return layout;
}

FeasibilityReport check_feasible(const ArrayLayout& layout) {
    FeasibilityReport report;
    const arma::uword n = layout.size();
    const double hx = 0.5 * layout.region_x;
    const double hy = 0.5 * layout.region_y;

    for (arma::uword a = 0; a < n; ++a) {
        const double x = layout.positions(a, 0);
        const double y = layout.positions(a, 1);
        if (std::abs(x) > hx)
            report.violations.push_back({FeasibilityViolation::Kind::region, a, 0, x});
        if (std::abs(y) > hy)
            report.violations.push_back({FeasibilityViolation::Kind::region, a, 0, y});
    }
    for (arma::uword a = 0; a < n; ++a) {
        for (arma::uword b = a + 1; b < n; ++b) {
            const double dx = layout.positions(a, 0) - layout.positions(b, 0);
            const double dy = layout.positions(a, 1) - layout.positions(b, 1);
            const double dist = std::hypot(dx, dy);
            if (dist < layout.min_spacing)
                report.violations.push_back({FeasibilityViolation::Kind::spacing, a, b, dist});
        }
    }
    report.ok = report.violations.empty();
    return report;
}

bool strictly_interior(const ArrayLayout& layout) {
    const arma::uword n = layout.size();
    const double hx = 0.5 * layout.region_x;
    const double hy = 0.5 * layout.region_y;
    for (arma::uword a = 0; a < n; ++a) {
        if (!(std::abs(layout.positions(a, 0)) < hx))
            return false;
        if (!(std::abs(layout.positions(a, 1)) < hy))
            return false;
    }
    for (arma::uword a = 0; a < n; ++a) {
        for (arma::uword b = a + 1; b < n; ++b) {
            const double dx = layout.positions(a, 0) - layout.positions(b, 0);
            const double dy = layout.positions(a, 1) - layout.positions(b, 1);
            if (!(std::hypot(dx, dy) > layout.min_spacing))
                return false;
        }
    }
    return true;
}

void save_layout_csv(const ArrayLayout& layout, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_layout_csv: cannot open " + path);
    out << "x_m,y_m\n";
    char buf[64];
    for (arma::uword n = 0; n < layout.size(); ++n) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", layout.positions(n, 0),
                      layout.positions(n, 1));
        out << buf;
    }
    if (!out)
        throw std::runtime_error("save_layout_csv: write failed for " + path);
}

ArrayLayout load_layout_csv(const std::string& path, double region_x, double region_y,
                            double min_spacing) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_layout_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line.rfind("x_m,y_m", 0) != 0)
        throw std::runtime_error("load_layout_csv: missing x_m,y_m header in " + path);

    std::vector<double> xs, ys;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        double x = 0.0, y = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) != 2)
            throw std::runtime_error("load_layout_csv: malformed row '" + line + "' in " + path);
        xs.push_back(x);
        ys.push_back(y);
    }
    if (xs.empty())
        throw std::runtime_error("load_layout_csv: no antenna rows in " + path);

    ArrayLayout layout;
    layout.positions.set_size(xs.size(), 2);
    for (std::size_t n = 0; n < xs.size(); ++n) {
        layout.positions(n, 0) = xs[n];
        layout.positions(n, 1) = ys[n];
    }
    layout.region_x = region_x;
    layout.region_y = region_y;
    layout.min_spacing = min_spacing;
    return layout;
}

} // namespace cebap
