#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "georelay/allocation.hpp"
#include "georelay/downlink.hpp"
#include "georelay/geometry.hpp"
#include "georelay/link.hpp"

namespace georelay {

// Split M files across nodes (at most cap files each) and choose power
// profiles so every node delivers its share at minimum total energy.
struct FileAllocationProblem {
  std::vector<Channel> channels;
  int n_files = 0;
  int cap = 0;
  double file_bits = 0.0;
  double pmax_w = 0.0;
  /// Termination gap relative to the first upper bound.
  double epsilon_rel = 1e-6;
  int max_iterations = 50;
  /// Original node indices, used for reporting; defaults to 0..N-1.
  std::vector<std::size_t> node_ids;

  /// Per-node upper bound on files: cap, or what fits at full power, or 0 for empty windows.
  std::vector<int> file_limits() const;
  std::size_t node_id(std::size_t i) const { return node_ids.empty() ? i : node_ids[i]; }
};

struct NlprResult {
  std::vector<double> mu;
  std::vector<WaterfillResult> solutions;
  double energy_j = 0.0;
  /// Common marginal energy per file dE/dmu on unclamped nodes.
  double marginal_j_per_file = 0.0;
};

NlprResult solve_nlpr(const FileAllocationProblem& problem);

struct FixedMuResult {
  std::vector<WaterfillResult> solutions;
  double energy_j = 0.0;
};

FixedMuResult solve_nlp_fixed_mu(const FileAllocationProblem& problem, const std::vector<int>& mu);

/// Fixed file split with constant power on each node.
FixedMuResult constant_power_fixed_mu(const FileAllocationProblem& problem, const std::vector<int>& mu);

struct OAPoint {
  std::vector<std::vector<double>> power;
  std::vector<double> mu;
};

struct OAIteration {
  int iteration = 0;
  double master_value = 0.0;
  double nlp_energy = 0.0;
  double z_lower = 0.0;
  double z_upper = 0.0;
  std::vector<int> mu;
};

struct OAState {
  double z_lower = -std::numeric_limits<double>::infinity();
  double z_upper = std::numeric_limits<double>::infinity();
  double epsilon = 0.0;
  std::vector<OAPoint> points;
  std::vector<OAIteration> log;
};

struct MasterResult {
  std::vector<int> mu;
  std::vector<std::vector<double>> power;
  double value = 0.0;
  int lp_solves = 0;
  int milp_nodes = 0;
};

/// Linearized master: minimum energy over integer mu and powers subject to all cuts in `state`.
MasterResult solve_oa_master(const FileAllocationProblem& problem, const OAState& state);

/// Gradient of the node-n bit shortfall f_n(P, mu) = mu u / W - sum w log2(1 + g P) with respect to P.
std::vector<double> cut_gradient(const Channel& channel, const std::vector<double>& power);

struct OAResult {
  AllocationResult allocation;
  std::vector<int> mu;
  OAState state;
  NlprResult relaxation;
  int iterations = 0;
};

/// Packs per-node waterfilling solutions into an allocation with file counts mu.
AllocationResult file_allocation(const FileAllocationProblem& problem, const std::vector<WaterfillResult>& sols,
                                 const std::vector<int>& mu);

OAResult oa_min_energy(const FileAllocationProblem& problem);

struct DpResult {
  std::vector<int> mu;
  double energy_j = 0.0;
  /// energy_table[n][k] = E_n(k), infinite when infeasible.
  std::vector<std::vector<double>> energy_table;
};

DpResult dp_oracle(const FileAllocationProblem& problem);
/// DP over a precomputed table; lexicographically smallest optimal mu.
DpResult dp_over_table(const std::vector<std::vector<double>>& table, int n_files);

/// f(T): files that fit at full power, each node capped.
int files_at_full_power(const FileAllocationProblem& problem);

struct FileTimeResult {
  OAResult solution;
  double t_star_s = 0.0;
  double t0_s = 0.0;
  double e0_j = 0.0;
  bool budget_bound = false;
  int bisections = 0;
};

struct TimeSearchOptions {
  double t_upper_factor = 4.0;
  double energy_rel_tol = 1e-3;
  int max_bisections = 60;
  double horizon_limit_s = 1e7;
  double time_tol_s = 1e-9;
};

using ProblemFactory = std::function<FileAllocationProblem(double horizon_s)>;

/// Smallest horizon with f(T) >= M, then bisection on the OA energy against the budget.
FileTimeResult min_time_file_allocation(const ProblemFactory& factory, double emax_j,
                                        const TimeSearchOptions& options = {});

struct UplinkRequest {
  ConstellationScenario scenario = ConstellationScenario::standard(Geos::kGeos2);
  std::vector<LinkParams> links;
  int n_files = 30;
  int alpha = 10;
  double file_bits = 1.6e8;
  double t_start_s = 0.0;
  double horizon_s = 600.0;
  double pmax_w = 900.0;
  double emax_j = kUnlimitedEnergy;
  double dt_s = 1.0;
  double epsilon_rel = 1e-6;
  int max_iterations = 50;
  TimeSearchOptions time_search;
};

std::vector<TimeWindow> uplink_windows(const UplinkRequest& req, double horizon_s);
FileAllocationProblem uplink_problem(const UplinkRequest& req, double horizon_s);
FileAllocationProblem uplink_problem(const UplinkRequest& req);

OAResult oa_min_energy_uplink(const UplinkRequest& req);
DpResult dp_oracle(const UplinkRequest& req);
FileTimeResult min_time_uplink(const UplinkRequest& req);

}  // namespace georelay
