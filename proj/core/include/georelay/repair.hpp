#pragma once

#include <cstddef>
#include <vector>

#include "georelay/allocation.hpp"
#include "georelay/coding.hpp"
#include "georelay/downlink.hpp"
#include "georelay/geometry.hpp"
#include "georelay/link.hpp"
#include "georelay/uplink.hpp"

namespace georelay {

struct RepairRequest {
  ConstellationScenario scenario = ConstellationScenario::standard(Geos::kGeos2);
  /// Transmit parameters of each LEOS when it acts as a helper.
  std::vector<LinkParams> links;
  RegenParams params = RegenParams::standard();
  RegenPoint point = RegenPoint::kMsr;
  std::size_t failed_node = 4;
  double t_start_s = 0.0;
  double horizon_s = 600.0;
  double pmax_w = 900.0;
  double emax_j = kUnlimitedEnergy;
  double dt_s = 1.0;
  double epsilon_rel = 1e-6;
  int max_iterations = 50;
  /// Pick the D individually cheapest helpers instead of searching all subsets.
  bool greedy = false;
  TimeSearchOptions time_search;
};

std::vector<std::size_t> helper_candidates(const RepairRequest& req);
/// Inter-LEOS channel from each candidate to the failed node over [t_s, t_s + T].
std::vector<Channel> helper_channels(const RepairRequest& req, double horizon_s);

struct RepairResult {
  std::vector<std::size_t> helpers;
  AllocationResult allocation;
  int per_helper_files = 0;
  int total_files = 0;
  std::size_t subsets_evaluated = 0;
};

RepairResult repair_min_energy(const RepairRequest& req);

struct MdsRepairResult {
  OAResult solution;
  int total_files = 0;
};

/// All M files spread over the N-1 survivors, at most alpha each.
FileAllocationProblem mds_repair_problem(const RepairRequest& req, double horizon_s);

MdsRepairResult mds_repair_baseline(const RepairRequest& req);

struct RepairTimeResult {
  RepairResult repair;
  double t_star_s = 0.0;
  double t0_s = 0.0;
  double e0_j = 0.0;
  bool budget_bound = false;
  int bisections = 0;
};

RepairTimeResult repair_min_time(const RepairRequest& req);

/// Time minimization for the MDS baseline (uplink-style search over helpers).
FileTimeResult mds_repair_min_time(const RepairRequest& req);

}  // namespace georelay
