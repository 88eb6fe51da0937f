#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cebap/geometry.hpp"
#include "cebap/kernels.hpp"
#include "cebap/rng.hpp"

using namespace cebap;

namespace {

constexpr double wavelength = 0.06;

ArrayLayout free_layout(const arma::mat& positions, double sx, double sy, double delta) {
    ArrayLayout layout;
    layout.positions = positions;
    layout.region_x = sx;
    layout.region_y = sy;
    layout.min_spacing = delta;
    return layout;
}

} // namespace

TEST_CASE("single-cell grid carries the hemisphere midpoint and full area") {
    const AngularGrid grid = build_grid(1, 1, wavelength);
    const double k0 = 2.0 * M_PI / wavelength;

    REQUIRE(grid.size() == 1);
    CHECK(grid.wavenumber == doctest::Approx(k0).epsilon(1e-15));
    // theta = pi/4, phi = pi.
    CHECK(grid.wavevectors(0, 0) ==
          doctest::Approx(k0 * std::cos(M_PI / 4) * std::cos(M_PI)).epsilon(1e-14));
    CHECK(grid.wavevectors(0, 1) ==
          doctest::Approx(k0 * std::cos(M_PI / 4) * std::sin(M_PI)).epsilon(1e-12));
    CHECK(grid.wavevectors(0, 2) == doctest::Approx(k0 * std::sin(M_PI / 4)).epsilon(1e-14));
    CHECK(grid.areas(0) == doctest::Approx(2.0 * M_PI * k0 * k0).epsilon(1e-14));
}

TEST_CASE("grid cells live on the upper hemisphere and tile its area") {
    const AngularGrid grid = build_grid(50, 80, wavelength);
    const double k0 = grid.wavenumber;

    REQUIRE(grid.size() == 4000);
    for (arma::uword l = 0; l < grid.size(); ++l) {
        const double norm = arma::norm(grid.wavevectors.row(l));
        CHECK(norm == doctest::Approx(k0).epsilon(1e-12));
        CHECK(grid.wavevectors(l, 2) > 0.0);
        CHECK(grid.areas(l) > 0.0);
    }
    CHECK(arma::accu(grid.areas) == doctest::Approx(2.0 * M_PI * k0 * k0).epsilon(1e-12));
}

TEST_CASE("flattening is elevation-major") {
    const AngularGrid grid = build_grid(2, 3, wavelength);
    const double k0 = grid.wavenumber;

    // Cell (i=0, j=0): theta = pi/8, phi = pi/3; cell l=3 starts band i=1.
    const double theta0 = 0.5 * (M_PI / 2) / 2.0;
    const double phi0 = 0.5 * (2.0 * M_PI) / 3.0;
    CHECK(grid.wavevectors(0, 2) == doctest::Approx(k0 * std::sin(theta0)).epsilon(1e-14));
    CHECK(grid.wavevectors(0, 0) ==
          doctest::Approx(k0 * std::cos(theta0) * std::cos(phi0)).epsilon(1e-14));
    const double theta1 = 1.5 * (M_PI / 2) / 2.0;
    CHECK(grid.wavevectors(3, 2) == doctest::Approx(k0 * std::sin(theta1)).epsilon(1e-14));
    // Same azimuth sequence in each band.
    CHECK(grid.wavevectors(3, 0) / std::cos(theta1) ==
          doctest::Approx(grid.wavevectors(0, 0) / std::cos(theta0)).epsilon(1e-12));
}

TEST_CASE("build_grid rejects bad arguments") {
    CHECK_THROWS_AS(build_grid(0, 10, wavelength), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(10, 0, wavelength), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(10, 10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(10, 10, -1.0), std::invalid_argument);
}

TEST_CASE("field-response columns have unit modulus and mirror under negation") {
    const AngularGrid grid = build_grid(10, 16, wavelength);
    arma::mat positions = {{0.01, -0.004}, {-0.01, 0.004}, {0.0, 0.0}};
    const ArrayLayout layout = free_layout(positions, 0.1, 0.1, 0.0);

    const arma::cx_mat q = frm(grid, layout);
    REQUIRE(q.n_rows == grid.size());
    REQUIRE(q.n_cols == 3);

    CHECK(arma::abs(arma::abs(q) - 1.0).max() < 1e-14);
    // Antenna 1 sits at -r of antenna 0: conjugate column.
    CHECK(arma::abs(q.col(1) - arma::conj(q.col(0))).max() < 1e-13);
    // The origin sees no phase.
    CHECK(arma::abs(q.col(2) - 1.0).max() == 0.0);
}

TEST_CASE("frm matches one hand-computed entry") {
    const AngularGrid grid = build_grid(3, 4, wavelength);
    arma::mat positions = {{0.013, -0.007}};
    const ArrayLayout layout = free_layout(positions, 0.1, 0.1, 0.0);
    const arma::cx_mat q = frm(grid, layout);

    const arma::uword l = 7; // arbitrary cell
    const double phase =
        grid.wavevectors(l, 0) * positions(0, 0) + grid.wavevectors(l, 1) * positions(0, 1);
    CHECK(std::abs(q(l, 0) - std::polar(1.0, phase)) < 1e-15);
}

TEST_CASE("parallel kernels agree with the serial reference") {
    const AngularGrid grid = build_grid(12, 20, wavelength);
    RngStream rng(99);
    arma::mat positions(5, 2);
    for (arma::uword n = 0; n < 5; ++n) {
        positions(n, 0) = rng.uniform(-2.0 * wavelength, 2.0 * wavelength);
        positions(n, 1) = rng.uniform(-2.0 * wavelength, 2.0 * wavelength);
    }
    const ArrayLayout layout = free_layout(positions, 8 * wavelength, 8 * wavelength, 0.0);

    arma::vec b(grid.size());
    for (arma::uword l = 0; l < grid.size(); ++l)
        b(l) = rng.uniform(0.0, 1.0);

    const arma::cx_mat q_par = kernels::frm(grid, layout);
    const arma::cx_mat q_ser = reference::frm(grid, layout);
    CHECK(arma::abs(q_par - q_ser).max() < 1e-13);

    const arma::cx_mat g_par = kernels::covariance_matrix(grid, layout, b);
    const arma::cx_mat g_ser = reference::covariance_matrix(grid, layout, b);
    CHECK(arma::abs(g_par - g_ser).max() < 1e-11 * arma::abs(g_ser).max());

    arma::cx_mat sx_par, sy_par, sx_ser, sy_ser;
    kernels::s_matrix_pair(grid, layout, b, sx_par, sy_par);
    reference::s_matrix_pair(grid, layout, b, sx_ser, sy_ser);
    const double s_scale = arma::abs(sx_ser).max();
    CHECK(arma::abs(sx_par - sx_ser).max() < 1e-11 * s_scale);
    CHECK(arma::abs(sy_par - sy_ser).max() < 1e-11 * s_scale);

    // The shared-pass kernel must reproduce the standalone covariance.
    arma::cx_mat g2, sx2, sy2;
    kernels::covariance_and_s(grid, layout, b, g2, sx2, sy2);
    CHECK(arma::abs(g2 - g_par).max() < 1e-14 * arma::abs(g_par).max());
    CHECK(arma::abs(sx2 - sx_par).max() == 0.0);
    CHECK(arma::abs(sy2 - sy_par).max() == 0.0);
}

TEST_CASE("covariance kernel output is exactly Hermitian with real diagonal") {
    const AngularGrid grid = build_grid(8, 12, wavelength);
    arma::mat positions = {{0.0, 0.0}, {0.021, 0.002}, {-0.013, 0.017}};
    const ArrayLayout layout = free_layout(positions, 0.2, 0.2, 0.0);
    arma::vec b(grid.size(), arma::fill::value(0.25));

    const arma::cx_mat g = kernels::covariance_matrix(grid, layout, b);
    CHECK(arma::abs(g - g.t()).max() == 0.0);
    const double beta = arma::accu(b);
    for (arma::uword n = 0; n < 3; ++n) {
        CHECK(g(n, n).imag() == 0.0);
        CHECK(g(n, n).real() == doctest::Approx(beta).epsilon(1e-13));
    }

    arma::cx_mat sx, sy;
    kernels::s_matrix_pair(grid, layout, b, sx, sy);
    CHECK(arma::abs(sx + sx.t()).max() == 0.0); // skew-Hermitian exactly
    CHECK(arma::abs(sy + sy.t()).max() == 0.0);
}

TEST_CASE("dense lattice spans and defaults") {
    const ArrayLayout layout = upa_dense(4, 4, wavelength / 2);
    REQUIRE(layout.size() == 16);

    CHECK(layout.positions.col(0).max() == doctest::Approx(0.75 * wavelength).epsilon(1e-15));
    CHECK(layout.positions.col(0).min() == doctest::Approx(-0.75 * wavelength).epsilon(1e-15));
    CHECK(layout.positions.col(1).max() == doctest::Approx(0.75 * wavelength).epsilon(1e-15));
    CHECK(layout.region_x == doctest::Approx(2.0 * wavelength));
    CHECK(layout.min_spacing == doctest::Approx(wavelength / 2));
    CHECK(check_feasible(layout).ok);

    // Same lattice dropped into a roomier region: clear of the walls, but the
    // pitch still sits exactly on the spacing bound, so it is feasible without
    // being a valid barrier start.
    const ArrayLayout roomy =
        upa_dense(4, 4, wavelength / 2, 4 * wavelength, 4 * wavelength, wavelength / 2);
    CHECK(check_feasible(roomy).ok);
    CHECK(!strictly_interior(roomy));

    // With spacing slack it moves into the strict interior.
    const ArrayLayout slack =
        upa_dense(4, 4, wavelength / 2, 4 * wavelength, 4 * wavelength, 0.4 * wavelength);
    CHECK(check_feasible(slack).ok);
    CHECK(strictly_interior(slack));
}

TEST_CASE("sparse lattice fills the region and rejects infeasible pitch") {
    const ArrayLayout layout =
        upa_sparse(4, 4, 4 * wavelength, 4 * wavelength, wavelength / 2);
    REQUIRE(layout.size() == 16);
    // Pitch region / cols = wavelength; outermost at 1.5 wavelengths.
    CHECK(layout.positions.col(0).max() == doctest::Approx(1.5 * wavelength).epsilon(1e-15));
    CHECK(check_feasible(layout).ok);
    CHECK(strictly_interior(layout));

    CHECK_THROWS_WITH_AS(upa_sparse(4, 4, wavelength, wavelength, wavelength / 2),
                         doctest::Contains("infeasible spacing"), std::invalid_argument);
}

TEST_CASE("feasibility is non-strict at the boundary and flags violations") {
    SUBCASE("contact with the wall is feasible but not interior") {
        arma::mat positions = {{0.5, 0.0}};
        const ArrayLayout layout = free_layout(positions, 1.0, 1.0, 0.0);
        CHECK(check_feasible(layout).ok);
        CHECK(!strictly_interior(layout));
    }
    SUBCASE("outside the wall is infeasible") {
        arma::mat positions = {{0.5 + 1e-9, 0.0}};
        const ArrayLayout layout = free_layout(positions, 1.0, 1.0, 0.0);
        const FeasibilityReport report = check_feasible(layout);
        REQUIRE(!report.ok);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == FeasibilityViolation::Kind::region);
        CHECK(report.violations[0].a == 0);
    }
    SUBCASE("pair at half the minimum spacing is infeasible") {
        arma::mat positions = {{-0.0075, 0.0}, {0.0075, 0.0}};
        const ArrayLayout layout = free_layout(positions, 1.0, 1.0, wavelength / 2);
        const FeasibilityReport report = check_feasible(layout);
        REQUIRE(!report.ok);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == FeasibilityViolation::Kind::spacing);
        CHECK(report.violations[0].a == 0);
        CHECK(report.violations[0].b == 1);
        CHECK(report.violations[0].value == doctest::Approx(0.015));
    }
    SUBCASE("pair exactly at the minimum spacing is feasible, not interior") {
        arma::mat positions = {{-0.0075, 0.0}, {0.0075, 0.0}};
        const ArrayLayout layout = free_layout(positions, 1.0, 1.0, 0.015);
        CHECK(check_feasible(layout).ok);
        CHECK(!strictly_interior(layout));
    }
}

TEST_CASE("layout CSV round-trips and re-saves byte-identically") {
    namespace fs = std::filesystem;
    fs::create_directories("tmp_geometry");
    const std::string path = "tmp_geometry/layout.csv";

    const ArrayLayout layout =
        upa_sparse(3, 5, 4 * wavelength, 3 * wavelength, wavelength / 2);
    save_layout_csv(layout, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x_m,y_m");

    const ArrayLayout loaded =
        load_layout_csv(path, layout.region_x, layout.region_y, layout.min_spacing);
    REQUIRE(loaded.size() == layout.size());
    CHECK(arma::abs(loaded.positions - layout.positions).max() < 1e-11 * wavelength);

    const std::string path2 = "tmp_geometry/layout2.csv";
    save_layout_csv(loaded, path2);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("layout CSV loader rejects malformed files") {
    namespace fs = std::filesystem;
    fs::create_directories("tmp_geometry");
    {
        std::ofstream out("tmp_geometry/bad_header.csv");
        out << "a,b\n0,0\n";
    }
    CHECK_THROWS_AS(load_layout_csv("tmp_geometry/bad_header.csv", 1, 1, 0), std::runtime_error);
    {
        std::ofstream out("tmp_geometry/bad_row.csv");
        out << "x_m,y_m\n0.1,oops\n";
    }
    CHECK_THROWS_AS(load_layout_csv("tmp_geometry/bad_row.csv", 1, 1, 0), std::runtime_error);
    CHECK_THROWS_AS(load_layout_csv("tmp_geometry/absent.csv", 1, 1, 0), std::runtime_error);
}
