#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "georelay/coding.hpp"
#include "georelay/downlink.hpp"
#include "georelay/geometry.hpp"
#include "georelay/repair.hpp"
#include "georelay/uplink.hpp"

namespace georelay {

/// Gain offset applied to both links in the default scenario.
inline constexpr double kDefaultCalibrationDb = 91.6;

struct LeoConfig {
  double altitude_m = 0.0;
  double velocity_mps = 0.0;
  double phase_offset_deg = 0.0;
};

struct ConstellationConfig {
  double earth_radius_m = 6371e3;
  double geos_altitude_m = 35786e3;
  double geos_coverage_angle_deg = 12.0;
  double entry_boundary_angle_deg = -41.06;
  std::vector<LeoConfig> leos = {
      {500e3, 7200.0, 12.0}, {700e3, 7300.0, 9.0}, {900e3, 7400.0, 6.0},
      {1100e3, 7500.0, 3.0}, {1300e3, 7600.0, 0.0}};
};

struct CodeConfig {
  /// "msr" or "mbr"; fixes alpha/beta when they are not given and selects the repair rule.
  std::string point = "msr";
  int n_files = 30;
  int n_nodes = 5;
  int reconstruct_k = 3;
  int repair_d = 4;
  int per_node_files = 0;    // 0 = derive from the point
  int per_helper_files = 0;  // 0 = derive from the point
  double file_bits = 20e6 * 8.0;
};

struct DownlinkConfig {
  double carrier_hz = 19.7e9;
  double bandwidth_hz = 40e6;
  double tx_gain_db = 40.0;
  double rx_gain_db = 10.0;
  std::vector<double> attenuation_db = {10.0, 8.0, 6.0, 4.0, 2.0};
  double noise_level_db = -126.56;
  double calibration_db = kDefaultCalibrationDb;
  double pmax_w = 40.0;
  double emax_j = 3.7e4;
  double t_start_s = 0.0;
  double horizon_s = 600.0;
};

struct UplinkConfig {
  std::vector<double> carriers_hz = {29.5e9, 29.875e9, 30.25e9, 30.625e9, 31.0e9};
  double bandwidth_hz = 20e6;
  double tx_gain_db = 20.0;
  double rx_gain_db = 20.0;
  std::vector<double> attenuation_db = {10.0, 8.0, 6.0, 4.0, 2.0};
  double noise_level_db = -129.08;
  double calibration_db = kDefaultCalibrationDb;
  double pmax_w = 900.0;
  double emax_j = 5.8e5;
  /// Fixed file splits used by the uplink baselines.
  std::vector<int> baseline_mu_energy = {10, 10, 10, 0, 0};
  std::vector<int> baseline_mu_time = {0, 0, 10, 10, 10};
  double t_start_s = 0.0;
  double horizon_s = 600.0;
};

struct RepairConfig {
  /// 1-based index of the failed LEOS.
  int failed_node = 5;
  /// Inter-LEOS link, shared by every helper; no atmospheric attenuation in space.
  double carrier_hz = 30.25e9;
  double bandwidth_hz = 2e6;
  double tx_gain_db = 20.0;
  double rx_gain_db = 20.0;
  double attenuation_db = 0.0;
  double noise_level_db = -129.08;
  double calibration_db = kDefaultCalibrationDb;
  double pmax_w = 900.0;
  double emax_j = 3.1e4;
  double t_start_s = 0.0;
  double horizon_s = 600.0;
  bool greedy = false;
};

struct SolverConfig {
  double dt_s = 1.0;
  double epsilon_rel = 1e-6;
  int max_iterations = 50;
  double energy_rel_tol = 1e-3;
  double t_upper_factor = 4.0;
  int max_bisections = 60;
  std::uint64_t seed = 1;
  std::uint32_t field_order = 256;
  std::uint32_t min_field_order = 256;
};

struct Scenario {
  ConstellationConfig constellation;
  CodeConfig code;
  DownlinkConfig downlink;
  UplinkConfig uplink;
  RepairConfig repair;
  SolverConfig solver;
};

/// Parses a JSON scenario; absent keys keep their defaults. Throws ConfigError.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
/// Cross-field checks run by parse_scenario; throws ConfigError.
void validate_scenario(const Scenario& s);
/// Fully resolved scenario as pretty-printed JSON.
std::string to_json(const Scenario& scenario);

ConstellationScenario build_constellation(const Scenario& s, Geos reference);
RegenParams build_regen_params(const Scenario& s);
RegenPoint build_point(const Scenario& s);
std::vector<LinkParams> downlink_links(const Scenario& s);
std::vector<LinkParams> uplink_links(const Scenario& s);
/// One inter-LEOS link per LEOS (all identical).
std::vector<LinkParams> repair_links(const Scenario& s);

DownlinkRequest build_downlink_request(const Scenario& s);
UplinkRequest build_uplink_request(const Scenario& s);
RepairRequest build_repair_request(const Scenario& s);

}  // namespace georelay
