#pragma once

// Sectorized hexagonal uplink scenario with aerial users.
//
// Sites sit on a hexagonal lattice; each site carries three sectors. One UAV
// is dropped per sector ("cell") and transmits to that sector. Link gains
// combine log-distance path loss with the sector antenna pattern; UAV
// antennas are omnidirectional.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "sinrgp/power_control.hpp"

namespace sinrgp {

struct PathLossModel {
  double exponent = 2.2;
  double frequency_hz = 2.0e9;
  double reference_m = 1.0;
  /// Loss at the reference distance; NaN means free-space loss at frequency_hz.
  double intercept_db = std::numeric_limits<double>::quiet_NaN();

  double resolved_intercept_db() const;
};

struct NetworkConfig {
  int site_rows = 4;
  int site_cols = 4;
  int sectors_per_site = 3;
  double bs_spacing_m = 2000.0;
  double bs_height_m = 35.0;
  double hpbw_az_deg = 120.0;
  double hpbw_el_deg = 13.0;
  double downtilt_deg = 8.5;
  double max_attenuation_db = 25.0;
  double peak_gain_dbi = 14.0;
  double uav_height_m = 60.0;
  double max_ue_power_dbm = 23.0;
  double min_ue_power_w = kDefaultMinPower;
  double temperature_k = 290.0;
  double bandwidth_hz = 18.0e6;
  double olpc_p0_dbm = -90.8;
  double olpc_alpha = 0.8;
  PathLossModel pathloss;

  int sites() const noexcept { return site_rows * site_cols; }
  int cells() const noexcept { return sites() * sectors_per_site; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Cell {
  int site = 0;
  double azimuth_deg = 0.0;
};

struct Scenario {
  NetworkConfig config;
  std::vector<Position> sites;  // antenna positions, z = bs height
  std::vector<Cell> cells;      // cell c = site * sectors_per_site + sector
};

struct Realization {
  std::uint64_t seed = 0;
  std::vector<Position> uavs;  // uavs[c] is served by cell c
};

Scenario build_hex_network(const NetworkConfig& cfg);

/// Sector antenna gain in dBi for offsets from boresight (degrees).
double antenna_gain(double azimuth_off_deg, double elevation_off_deg, const NetworkConfig& cfg);

/// Log-distance path loss in dB. Throws std::invalid_argument for coincident points.
double path_loss(const Position& tx, const Position& rx, const PathLossModel& model);

/// Linear gain from a UAV at `uav` to cell `cell` (antenna gain minus path loss).
double link_gain(const Scenario& scenario, const Position& uav, int cell);

/// k_B T B in watts.
double thermal_noise(double bandwidth_hz, double temperature_k);

/// Fractional path-loss compensation: min(p_max, p0 + alpha * PL), all in dB/dBm.
double olpc_power(double coupling_loss_db, double p0_dbm, double alpha, double p_max_dbm);

/// One UAV per cell, uniform over the cell's dominance area (points within
/// one site spacing of the serving site whose strongest cell is the serving
/// cell). Deterministic in (scenario, seed).
Realization draw_realization(const Scenario& scenario, std::uint64_t seed);

/// Uplink problem: UAV i transmits to cell i. Equal weights, p_max from the
/// UAV power class, thermal noise, no QoS floors.
PowerControlProblem gain_matrix(const Scenario& scenario, const Realization& realization);

/// OLPC allocation in watts using each UAV's coupling loss to its serving cell.
Eigen::VectorXd olpc_allocation(const NetworkConfig& cfg, const PowerControlProblem& prob);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

NetworkConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const NetworkConfig& cfg);
NetworkConfig load_config(const std::filesystem::path& path);

}  // namespace sinrgp
