#include "cebap/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cebap {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw std::runtime_error("scenario " + path + ": " + why);
}

const json& need(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end())
        bad(path, std::string("missing key '") + key + "'");
    return *it;
}

arma::vec to_vec(const json& j, const std::string& path, const char* key) {
    if (!j.is_array())
        bad(path, std::string(key) + " must be an array");
    arma::vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            bad(path, std::string(key) + " must hold numbers");
        v(i) = j[i].get<double>();
    }
    return v;
}

} // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        bad(path, "cannot open file");

    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        bad(path, std::string("parse error: ") + e.what());
    }

    Scenario scenario;

    const json& grid = need(j, "grid", path);
    const arma::uword n_el = need(grid, "n_elevation", path).get<arma::uword>();
    const arma::uword n_az = need(grid, "n_azimuth", path).get<arma::uword>();
    const double wavelength = need(grid, "wavelength_m", path).get<double>();
    try {
        scenario.grid = build_grid(n_el, n_az, wavelength);
    } catch (const std::invalid_argument& e) {
        bad(path, e.what());
    }
    const arma::uword l0 = scenario.grid.size();

    if (j.contains("power_responses")) {
        const arma::vec flat = to_vec(j["power_responses"], path, "power_responses");
        const arma::vec mu = to_vec(need(j, "user_distribution", path), path, "user_distribution");
        const arma::uword m_regions = mu.n_elem;
        if (m_regions == 0)
            bad(path, "user_distribution is empty");
        if (flat.n_elem != l0 * m_regions)
            bad(path, "power_responses length must be L0 * M");
        // Row-major rows are grid cells; Armadillo stores column-major.
        scenario.power_responses.set_size(l0, m_regions);
        for (arma::uword l = 0; l < l0; ++l)
            for (arma::uword m = 0; m < m_regions; ++m)
                scenario.power_responses(l, m) = flat(l * m_regions + m);
        scenario.user_distribution = mu;
    } else if (j.contains("aps")) {
        const arma::vec aps = to_vec(j["aps"], path, "aps");
        if (aps.n_elem != l0)
            bad(path, "aps length must match the grid size");
        scenario.power_responses = aps;
        scenario.user_distribution = arma::vec{1.0};
    } else {
        bad(path, "needs either power_responses or aps");
    }
    if (scenario.power_responses.min() < 0.0)
        bad(path, "negative response power");
    if (scenario.user_distribution.min() < 0.0)
        bad(path, "negative user_distribution weight");
    if (std::abs(arma::accu(scenario.user_distribution) - 1.0) > 1e-9)
        bad(path, "user_distribution must sum to 1");

    const json& count = need(j, "user_count", path);
    scenario.user_count_param = need(count, "k0", path).get<double>();
    scenario.max_users = need(count, "max", path).get<arma::uword>();
    if (!(scenario.user_count_param > 0.0) || scenario.max_users == 0)
        bad(path, "user_count must have k0 > 0 and max >= 1");

    scenario.noise_power_dbm = need(j, "noise_power_dbm", path).get<double>();
    scenario.tx_power_dbm = need(j, "tx_power_dbm", path).get<double>();
    scenario.noise_power = dbm_to_watts(scenario.noise_power_dbm);
    scenario.tx_power = dbm_to_watts(scenario.tx_power_dbm);

    if (j.contains("subregion_centers_m")) {
        const json& centers = j["subregion_centers_m"];
        if (!centers.is_array() || centers.size() != scenario.user_distribution.n_elem)
            bad(path, "subregion_centers_m must list one [x, y] per subregion");
        scenario.subregion_centers.set_size(centers.size(), 2);
        for (std::size_t m = 0; m < centers.size(); ++m) {
            if (!centers[m].is_array() || centers[m].size() != 2)
                bad(path, "subregion_centers_m entries must be [x, y]");
            scenario.subregion_centers(m, 0) = centers[m][0].get<double>();
            scenario.subregion_centers(m, 1) = centers[m][1].get<double>();
        }
    }

    if (j.contains("los_grid_index")) {
        const json& los = j["los_grid_index"];
        if (!los.is_array() || los.size() != scenario.user_distribution.n_elem)
            bad(path, "los_grid_index must list one entry per subregion");
        scenario.los_grid_index.set_size(los.size());
        for (std::size_t m = 0; m < los.size(); ++m) {
            const arma::sword l = los[m].get<arma::sword>();
            if (l < -1 || l >= static_cast<arma::sword>(l0))
                bad(path, "los_grid_index entries must be -1 or a grid cell index");
            scenario.los_grid_index(m) = l;
        }
    }

    return scenario;
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    json j;
    j["grid"] = {{"n_elevation", scenario.grid.n_elevation},
                 {"n_azimuth", scenario.grid.n_azimuth},
                 {"wavelength_m", scenario.grid.wavelength}};

    const arma::uword l0 = scenario.power_responses.n_rows;
    const arma::uword m_regions = scenario.power_responses.n_cols;
    const bool plain_aps = m_regions == 1 && scenario.subregion_centers.n_rows == 0 &&
                           scenario.los_grid_index.n_elem == 0;
    if (plain_aps) {
        json aps = json::array();
        for (arma::uword l = 0; l < l0; ++l)
            aps.push_back(scenario.power_responses(l, 0));
        j["aps"] = std::move(aps);
    } else {
        json flat = json::array();
        for (arma::uword l = 0; l < l0; ++l)
            for (arma::uword m = 0; m < m_regions; ++m)
                flat.push_back(scenario.power_responses(l, m));
        j["power_responses"] = std::move(flat);
        json mu = json::array();
        for (arma::uword m = 0; m < m_regions; ++m)
            mu.push_back(scenario.user_distribution(m));
        j["user_distribution"] = std::move(mu);
        if (scenario.subregion_centers.n_rows > 0) {
            json centers = json::array();
            for (arma::uword m = 0; m < scenario.subregion_centers.n_rows; ++m)
                centers.push_back(
                    {scenario.subregion_centers(m, 0), scenario.subregion_centers(m, 1)});
            j["subregion_centers_m"] = std::move(centers);
        }
        if (scenario.los_grid_index.n_elem > 0) {
            json los = json::array();
            for (arma::uword m = 0; m < scenario.los_grid_index.n_elem; ++m)
                los.push_back(scenario.los_grid_index(m));
            j["los_grid_index"] = std::move(los);
        }
    }

    j["user_count"] = {{"k0", scenario.user_count_param}, {"max", scenario.max_users}};
    j["noise_power_dbm"] = scenario.noise_power_dbm;
    j["tx_power_dbm"] = scenario.tx_power_dbm;

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_scenario: cannot open " + path);
    out << j.dump() << '\n';
    if (!out)
        throw std::runtime_error("save_scenario: write failed for " + path);
}

} // namespace cebap
