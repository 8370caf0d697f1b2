#include "sinrgp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "sinrgp/problem_io.hpp"
#include "sinrgp/rng.hpp"

namespace sinrgp {

using Eigen::Index;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

constexpr double kBoltzmann = 1.380649e-23;
constexpr double kSpeedOfLight = 299792458.0;
constexpr int kMaxDrawAttempts = 1'000'000;

constexpr double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// (-180, 180]
double wrap_degrees(double a) {
  double r = std::fmod(a, 360.0);
  if (r > 180.0) r -= 360.0;
  if (r <= -180.0) r += 360.0;
  return r;
}

int strongest_cell(const Scenario& sc, const Position& uav) {
  int best = 0;
  double best_gain = -1.0;
  for (int c = 0; c < static_cast<int>(sc.cells.size()); ++c) {
    const double g = link_gain(sc, uav, c);
    if (g > best_gain) {
      best_gain = g;
      best = c;
    }
  }
  return best;
}

}  // namespace

double PathLossModel::resolved_intercept_db() const {
  if (!std::isnan(intercept_db)) return intercept_db;
  return 20.0 * std::log10(4.0 * std::numbers::pi * frequency_hz * reference_m / kSpeedOfLight);
}

void NetworkConfig::validate() const {
  require(site_rows >= 1 && site_cols >= 1, "site_grid: need at least one site");
  require(sectors_per_site >= 1, "sectors_per_site must be >= 1");
  require(bs_spacing_m > 0.0, "bs_spacing_m must be positive");
  require(bs_height_m > 0.0, "bs_height_m must be positive");
  require(uav_height_m > 0.0, "uav_height_m must be positive");
  require(hpbw_az_deg > 0.0 && hpbw_el_deg > 0.0, "antenna: beam widths must be positive");
  require(max_attenuation_db >= 0.0, "antenna.max_attenuation_db must be >= 0");
  require(temperature_k > 0.0, "temperature_k must be positive");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(min_ue_power_w > 0.0 && min_ue_power_w < dbm_to_watts(max_ue_power_dbm),
          "min_ue_power_w must be positive and below max_ue_power_dbm");
  require(olpc_alpha >= 0.0 && olpc_alpha <= 1.0, "olpc.alpha must be in [0, 1]");
  require(pathloss.exponent > 0.0, "pathloss.exponent must be positive");
  require(pathloss.frequency_hz > 0.0, "pathloss.frequency_hz must be positive");
  require(pathloss.reference_m > 0.0, "pathloss.reference_m must be positive");
}

Scenario build_hex_network(const NetworkConfig& cfg) {
  cfg.validate();
  Scenario sc;
  sc.config = cfg;
  const double d = cfg.bs_spacing_m;
  const double row_pitch = d * std::sqrt(3.0) / 2.0;
  for (int r = 0; r < cfg.site_rows; ++r) {
    for (int c = 0; c < cfg.site_cols; ++c) {
      const double shift = r % 2 == 1 ? 0.5 * d : 0.0;
      sc.sites.push_back({c * d + shift, r * row_pitch, cfg.bs_height_m});
    }
  }
  const double step = 360.0 / cfg.sectors_per_site;
  for (int s = 0; s < cfg.sites(); ++s) {
    for (int k = 0; k < cfg.sectors_per_site; ++k) sc.cells.push_back({s, k * step});
  }
  return sc;
}

double antenna_gain(double azimuth_off_deg, double elevation_off_deg, const NetworkConfig& cfg) {
  const double az = wrap_degrees(azimuth_off_deg);
  const double el = wrap_degrees(elevation_off_deg);
  const double am = cfg.max_attenuation_db;
  const double a_h = std::min(12.0 * (az / cfg.hpbw_az_deg) * (az / cfg.hpbw_az_deg), am);
  const double a_v = std::min(12.0 * (el / cfg.hpbw_el_deg) * (el / cfg.hpbw_el_deg), am);
  return cfg.peak_gain_dbi - std::min(a_h + a_v, am);
}

double path_loss(const Position& tx, const Position& rx, const PathLossModel& model) {
  const double dist = std::hypot(tx.x - rx.x, tx.y - rx.y, tx.z - rx.z);
  require(dist > 0.0, "path loss: transmitter and receiver coincide");
  return model.resolved_intercept_db() + 10.0 * model.exponent * std::log10(dist / model.reference_m);
}

double link_gain(const Scenario& sc, const Position& uav, int cell) {
  const Cell& c = sc.cells.at(static_cast<std::size_t>(cell));
  const Position& site = sc.sites[static_cast<std::size_t>(c.site)];
  const double dx = uav.x - site.x, dy = uav.y - site.y;
  const double azimuth = deg(std::atan2(dy, dx)) - c.azimuth_deg;
  // Boresight points downtilt_deg below the horizon.
  const double elevation = deg(std::atan2(uav.z - site.z, std::hypot(dx, dy))) + sc.config.downtilt_deg;
  const double db = antenna_gain(azimuth, elevation, sc.config) - path_loss(uav, site, sc.config.pathloss);
  return std::pow(10.0, db / 10.0);
}

double thermal_noise(double bandwidth_hz, double temperature_k) {
  require(bandwidth_hz > 0.0 && temperature_k > 0.0, "noise: bandwidth and temperature must be positive");
  return kBoltzmann * temperature_k * bandwidth_hz;
}

double olpc_power(double coupling_loss_db, double p0_dbm, double alpha, double p_max_dbm) {
  require(alpha >= 0.0 && alpha <= 1.0, "olpc: alpha must be in [0, 1]");
  return std::min(p_max_dbm, p0_dbm + alpha * coupling_loss_db);
}

Realization draw_realization(const Scenario& sc, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Realization out;
  out.seed = seed;
  const double radius = sc.config.bs_spacing_m;
  for (int c = 0; c < static_cast<int>(sc.cells.size()); ++c) {
    const Position& site = sc.sites[static_cast<std::size_t>(sc.cells[static_cast<std::size_t>(c)].site)];
    bool placed = false;
    for (int attempt = 0; attempt < kMaxDrawAttempts && !placed; ++attempt) {
      const double r = radius * std::sqrt(uniform01(rng));
      const double phi = 2.0 * std::numbers::pi * uniform01(rng);
      const Position p{site.x + r * std::cos(phi), site.y + r * std::sin(phi), sc.config.uav_height_m};
      if (strongest_cell(sc, p) == c) {
        out.uavs.push_back(p);
        placed = true;
      }
    }
    if (!placed) throw std::runtime_error("could not place a UAV in cell " + std::to_string(c));
  }
  return out;
}

PowerControlProblem gain_matrix(const Scenario& sc, const Realization& rz) {
  const Index n = static_cast<Index>(sc.cells.size());
  require(static_cast<Index>(rz.uavs.size()) == n, "realization must place one UAV per cell");
  PowerControlProblem prob;
  prob.gain.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      prob.gain(i, j) = link_gain(sc, rz.uavs[static_cast<std::size_t>(i)], static_cast<int>(j));
    }
  }
  const auto& cfg = sc.config;
  prob.noise = VectorXd::Constant(n, thermal_noise(cfg.bandwidth_hz, cfg.temperature_k));
  prob.weights = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  prob.p_min = VectorXd::Constant(n, cfg.min_ue_power_w);
  prob.p_max = VectorXd::Constant(n, dbm_to_watts(cfg.max_ue_power_dbm));
  prob.gamma_min = VectorXd::Zero(n);
  prob.validate();
  return prob;
}

VectorXd olpc_allocation(const NetworkConfig& cfg, const PowerControlProblem& prob) {
  VectorXd p(prob.size());
  for (Index i = 0; i < prob.size(); ++i) {
    const double coupling_loss = -10.0 * std::log10(prob.gain(i, i));
    const double dbm = olpc_power(coupling_loss, cfg.olpc_p0_dbm, cfg.olpc_alpha, cfg.max_ue_power_dbm);
    p(i) = std::clamp(dbm_to_watts(dbm), prob.p_min(i), prob.p_max(i));
  }
  return p;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

double num(const json& obj, const char* key, double fallback, const std::string& prefix = {}) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ParseError(prefix + key, "expected a number");
  return it->get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ParseError(field, "expected an integer");
  return v.get<int>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& prefix) {
  const std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!names.contains(key)) throw ParseError(prefix + key, "unknown field");
  }
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  const auto it = doc.find(key);
  if (it == doc.end()) return empty;
  if (!it->is_object()) throw ParseError(key, "expected an object");
  return *it;
}

}  // namespace

NetworkConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("", "scenario config must be a JSON object");
  reject_unknown(doc,
                 {"site_grid", "sectors_per_site", "bs_spacing_m", "bs_height_m", "uav_height_m",
                  "max_ue_power_dbm", "min_ue_power_w", "temperature_k", "bandwidth_hz", "antenna",
                  "pathloss", "olpc"},
                 "");
  NetworkConfig cfg;
  if (const auto it = doc.find("site_grid"); it != doc.end()) {
    if (!it->is_array() || it->size() != 2) throw ParseError("site_grid", "expected [rows, cols]");
    cfg.site_rows = integer((*it)[0], "site_grid[0]");
    cfg.site_cols = integer((*it)[1], "site_grid[1]");
  }
  if (const auto it = doc.find("sectors_per_site"); it != doc.end()) {
    cfg.sectors_per_site = integer(*it, "sectors_per_site");
  }
  cfg.bs_spacing_m = num(doc, "bs_spacing_m", cfg.bs_spacing_m);
  cfg.bs_height_m = num(doc, "bs_height_m", cfg.bs_height_m);
  cfg.uav_height_m = num(doc, "uav_height_m", cfg.uav_height_m);
  cfg.max_ue_power_dbm = num(doc, "max_ue_power_dbm", cfg.max_ue_power_dbm);
  cfg.min_ue_power_w = num(doc, "min_ue_power_w", cfg.min_ue_power_w);
  cfg.temperature_k = num(doc, "temperature_k", cfg.temperature_k);
  cfg.bandwidth_hz = num(doc, "bandwidth_hz", cfg.bandwidth_hz);

  const json& ant = section(doc, "antenna");
  reject_unknown(ant, {"hpbw_az_deg", "hpbw_el_deg", "downtilt_deg", "max_attenuation_db", "peak_gain_dbi"},
                 "antenna.");
  cfg.hpbw_az_deg = num(ant, "hpbw_az_deg", cfg.hpbw_az_deg, "antenna.");
  cfg.hpbw_el_deg = num(ant, "hpbw_el_deg", cfg.hpbw_el_deg, "antenna.");
  cfg.downtilt_deg = num(ant, "downtilt_deg", cfg.downtilt_deg, "antenna.");
  cfg.max_attenuation_db = num(ant, "max_attenuation_db", cfg.max_attenuation_db, "antenna.");
  cfg.peak_gain_dbi = num(ant, "peak_gain_dbi", cfg.peak_gain_dbi, "antenna.");

  const json& pl = section(doc, "pathloss");
  reject_unknown(pl, {"exponent", "frequency_hz", "reference_m", "intercept_db"}, "pathloss.");
  cfg.pathloss.exponent = num(pl, "exponent", cfg.pathloss.exponent, "pathloss.");
  cfg.pathloss.frequency_hz = num(pl, "frequency_hz", cfg.pathloss.frequency_hz, "pathloss.");
  cfg.pathloss.reference_m = num(pl, "reference_m", cfg.pathloss.reference_m, "pathloss.");
  cfg.pathloss.intercept_db = num(pl, "intercept_db", cfg.pathloss.intercept_db, "pathloss.");

  const json& olpc = section(doc, "olpc");
  reject_unknown(olpc, {"p0_dbm", "alpha"}, "olpc.");
  cfg.olpc_p0_dbm = num(olpc, "p0_dbm", cfg.olpc_p0_dbm, "olpc.");
  cfg.olpc_alpha = num(olpc, "alpha", cfg.olpc_alpha, "olpc.");

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("", e.what());
  }
  return cfg;
}

json config_to_json(const NetworkConfig& cfg) {
  json pl = {{"exponent", cfg.pathloss.exponent},
             {"frequency_hz", cfg.pathloss.frequency_hz},
             {"reference_m", cfg.pathloss.reference_m}};
  if (!std::isnan(cfg.pathloss.intercept_db)) pl["intercept_db"] = cfg.pathloss.intercept_db;
  return {{"site_grid", {cfg.site_rows, cfg.site_cols}},
          {"sectors_per_site", cfg.sectors_per_site},
          {"bs_spacing_m", cfg.bs_spacing_m},
          {"bs_height_m", cfg.bs_height_m},
          {"uav_height_m", cfg.uav_height_m},
          {"max_ue_power_dbm", cfg.max_ue_power_dbm},
          {"min_ue_power_w", cfg.min_ue_power_w},
          {"temperature_k", cfg.temperature_k},
          {"bandwidth_hz", cfg.bandwidth_hz},
          {"antenna",
           {{"hpbw_az_deg", cfg.hpbw_az_deg},
            {"hpbw_el_deg", cfg.hpbw_el_deg},
            {"downtilt_deg", cfg.downtilt_deg},
            {"max_attenuation_db", cfg.max_attenuation_db},
            {"peak_gain_dbi", cfg.peak_gain_dbi}}},
          {"pathloss", pl},
          {"olpc", {{"p0_dbm", cfg.olpc_p0_dbm}, {"alpha", cfg.olpc_alpha}}}};
}

NetworkConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("", path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

}  // namespace sinrgp
