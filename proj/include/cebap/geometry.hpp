#pragma once

#include <armadillo>
#include <string>
#include <vector>

namespace cebap {

// Midpoint discretization of the upper wavenumber hemisphere (the base
// station only sees arrivals from above its plane). Cell l carries the
// wavevector at its center, |kappa_l| = wavenumber, kappa_l^z > 0, and the
// exact spherical area of the cell on the radius-k0 sphere. Flattening is
// elevation-major: l = i_elevation * n_azimuth + i_azimuth.
struct AngularGrid {
    arma::uword n_elevation = 0;
    arma::uword n_azimuth = 0;
    double wavelength = 0.0; // meters
    double wavenumber = 0.0; // 2*pi / wavelength, rad/m
    arma::mat wavevectors;   // L0 x 3, rad/m
    arma::vec areas;         // L0, sums to 2*pi*k0^2

    arma::uword size() const { return wavevectors.n_rows; }
};

// Planar antenna positions inside a centered region_x by region_y rectangle
// with minimum pairwise spacing min_spacing. Positions are meters in the
// array plane z = 0.
struct ArrayLayout {
    arma::mat positions;      // N x 2
    double region_x = 0.0;    // S_x
    double region_y = 0.0;    // S_y
    double min_spacing = 0.0; // Delta

    arma::uword size() const { return positions.n_rows; }
};

struct FeasibilityViolation {
    enum class Kind { region, spacing };
    Kind kind = Kind::region;
    arma::uword a = 0; // antenna index
    arma::uword b = 0; // second antenna for spacing violations
    double value = 0.0; // offending |coordinate| or pair distance
};

struct FeasibilityReport {
    bool ok = true;
    std::vector<FeasibilityViolation> violations;
};

// n_elevation x n_azimuth midpoint grid over theta in (0, pi/2), phi in
// (0, 2*pi). Cell areas are exact band integrals, not midpoint products.
AngularGrid build_grid(arma::uword n_elevation, arma::uword n_azimuth, double wavelength);

// Field-response matrix: [Q]_{ln} = exp(j kappa_l . [x_n, y_n, 0]).
arma::cx_mat frm(const AngularGrid& grid, const ArrayLayout& layout);

// rows x cols lattice at the given spacing, centered on the origin.
// region/min_spacing default to the tight values (cols*spacing, rows*spacing,
// spacing) when left at zero.
ArrayLayout upa_dense(arma::uword rows, arma::uword cols, double spacing,
                      double region_x = 0.0, double region_y = 0.0, double min_spacing = 0.0);

// Lattice stretched to fill the region: spacings region_x/cols, region_y/rows.
// Throws std::invalid_argument when that spacing falls below min_spacing.
ArrayLayout upa_sparse(arma::uword rows, arma::uword cols, double region_x, double region_y,
                       double min_spacing = 0.0);

// Non-strict constraint check: |x| <= region_x/2, |y| <= region_y/2,
// pairwise distance >= min_spacing. Boundary contact is feasible here; the
// log-barrier has its own strict notion.
FeasibilityReport check_feasible(const ArrayLayout& layout);

// Strict interior of the same constraint set (barrier domain).
bool strictly_interior(const ArrayLayout& layout);

// CSV with header x_m,y_m, 12 significant digits per coordinate.
void save_layout_csv(const ArrayLayout& layout, const std::string& path);
ArrayLayout load_layout_csv(const std::string& path, double region_x, double region_y,
                            double min_spacing);

} // namespace cebap
