#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "georelay/allocation.hpp"
#include "georelay/geometry.hpp"
#include "georelay/link.hpp"
#include "georelay/waterfill.hpp"

namespace georelay {

inline constexpr double kUnlimitedEnergy = std::numeric_limits<double>::infinity();

struct DownlinkRequest {
  ConstellationScenario scenario = ConstellationScenario::standard(Geos::kGeos1);
  /// One entry per LEOS.
  std::vector<LinkParams> links;
  int alpha = 10;
  double file_bits = 1.6e8;
  double t_start_s = 0.0;
  double horizon_s = 600.0;
  double pmax_w = 40.0;
  double emax_j = kUnlimitedEnergy;
  double dt_s = 1.0;
  /// T_ub = factor * T_0 for the time search.
  double t_upper_factor = 4.0;
  double energy_rel_tol = 1e-3;
  int max_bisections = 60;
};

/// [max(t_s, t_0n), t_s + T] for each LEOS.
std::vector<TimeWindow> downlink_windows(const DownlinkRequest& req, double horizon_s);
std::vector<Channel> downlink_channels(const DownlinkRequest& req, double horizon_s);

AllocationResult min_energy_downlink(const DownlinkRequest& req);

/// Constant power on every cell, bisected so that exactly `target_bits` are delivered.
WaterfillResult constant_power_solve(const Channel& channel, double target_bits, double pmax);

AllocationResult constant_power_baseline(const DownlinkRequest& req);

struct TimeMinResult {
  AllocationResult allocation;
  double t_star_s = 0.0;
  double t0_s = 0.0;
  double e0_j = 0.0;
  /// True when the energy budget, not the power cap, set the duration.
  bool budget_bound = false;
  int bisections = 0;
};

/// Smallest T such that LEOS n carries alpha files at full power.
double min_duration_at_pmax(const DownlinkRequest& req, std::size_t n);

TimeMinResult min_time_downlink(const DownlinkRequest& req);
/// Same search with a constant power per LEOS instead of waterfilling.
TimeMinResult min_time_downlink_constant_power(const DownlinkRequest& req);

// Fixed per-node bit targets over channels that depend on the horizon T.
struct TargetTimeProblem {
  std::function<std::vector<Channel>(double horizon_s)> channels;
  std::vector<double> target_bits;
  double file_bits = 1.0;
  double pmax_w = 0.0;
  double emax_j = kUnlimitedEnergy;
  double t_upper_factor = 4.0;
  int max_bisections = 60;
  bool constant_power = false;
  double horizon_limit_s = 1e7;
};

/// Per-node energy-optimal (or constant-power) solution at a given horizon.
AllocationResult energy_for_targets(const TargetTimeProblem& problem, double horizon_s);

/// T_0 = max_n T_n0 at full power; bisection on T against the budget when E(T_0) > E_max.
TimeMinResult min_time_for_targets(const TargetTimeProblem& problem);

}  // namespace georelay
