#pragma once

#include <string>

#include "cebap/channel.hpp"

namespace cebap {

// JSON scenario files. Required keys: grid {n_elevation, n_azimuth,
// wavelength_m}, user_count {k0, max}, noise_power_dbm, tx_power_dbm, and
// either aps (flat length-L0 array, single implicit subregion) or
// power_responses (flat row-major L0 x M array, row = grid cell) together
// with user_distribution (length M). Optional: subregion_centers_m (M pairs),
// los_grid_index (M entries, -1 = none). Powers are converted to watts at
// load; doubles round-trip bit-exactly.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

} // namespace cebap
