#include "georelay/repair.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "georelay/errors.hpp"

namespace georelay {

std::vector<std::size_t> helper_candidates(const RepairRequest& req) {
  const std::size_t n = req.scenario.n_leos();
  if (req.failed_node >= n) throw std::out_of_range("failed node index out of range");
  if (req.links.size() != n) throw std::invalid_argument("one link parameter set per LEOS is required");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != req.failed_node) out.push_back(i);
  }
  return out;
}

std::vector<Channel> helper_channels(const RepairRequest& req, double horizon_s) {
  if (!(req.dt_s > 0.0)) throw std::invalid_argument("grid step must be positive");
  const TimeWindow window{req.t_start_s, req.t_start_s + horizon_s};
  std::vector<Channel> out;
  for (std::size_t h : helper_candidates(req)) {
    const ConstellationScenario& sc = req.scenario;
    const std::size_t f = req.failed_node;
    out.push_back(Channel::sample(window, req.dt_s, aggregate_gain(req.links[h]), req.links[h].bandwidth_hz,
                                  [&sc, h, f](double t) { return inter_leos_distance(sc, h, f, t); }));
  }
  return out;
}

namespace {

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
  if (i == 0) return false;
  ++idx[i - 1];
  for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

RepairResult repair_at(const RepairRequest& req, double horizon_s) {
  const RepairRequirement need = repair_requirement(req.point, req.params);
  const auto candidates = helper_candidates(req);
  if (need.helpers < 1 || static_cast<std::size_t>(need.helpers) > candidates.size()) {
    throw InfeasibleError("not enough candidate helpers for the repair degree D");
  }
  const auto channels = helper_channels(req, horizon_s);
  const double target = need.per_helper * req.params.file_bits;

  // Per-helper cost is independent of the rest of the subset.
  std::vector<double> cost(channels.size());
  std::vector<WaterfillResult> sols(channels.size());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].empty() || channels[i].max_bits(req.pmax_w) < target) {
      cost[i] = kInfeasibleEnergy;
      continue;
    }
    sols[i] = constrained_waterfill(channels[i], target, req.pmax_w);
    cost[i] = sols[i].energy_j;
  }

  RepairResult r;
  r.per_helper_files = need.per_helper;
  r.total_files = need.total;
  std::vector<std::size_t> best;
  double best_cost = kInfeasibleEnergy;
  const auto d = static_cast<std::size_t>(need.helpers);
  if (req.greedy) {
    std::vector<std::size_t> order(channels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
    best.assign(order.begin(), order.begin() + static_cast<long>(d));
    std::sort(best.begin(), best.end());
    best_cost = 0.0;
    for (std::size_t i : best) best_cost += cost[i];
    r.subsets_evaluated = 1;
  } else {
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    do {
      double c = 0.0;
      for (std::size_t i : idx) c += cost[i];
      ++r.subsets_evaluated;
      if (c < best_cost) {
        best_cost = c;
        best = idx;
      }
    } while (next_combination(idx, channels.size()));
  }
  if (!std::isfinite(best_cost)) throw InfeasibleError("no helper subset can deliver the repair traffic");

  for (std::size_t i : best) {
    r.helpers.push_back(candidates[i]);
    r.allocation.nodes.push_back(make_node_allocation(candidates[i], channels[i], sols[i], req.params.file_bits));
    r.allocation.mu.push_back(need.per_helper);
  }
  r.allocation.horizon_s = horizon_s;
  r.allocation.finalize();
  return r;
}

}  // namespace

FileAllocationProblem mds_repair_problem(const RepairRequest& req, double horizon_s) {
  FileAllocationProblem p;
  p.channels = helper_channels(req, horizon_s);
  p.node_ids = helper_candidates(req);
  p.n_files = req.params.n_files;
  p.cap = req.params.per_node_files;
  p.file_bits = req.params.file_bits;
  p.pmax_w = req.pmax_w;
  p.epsilon_rel = req.epsilon_rel;
  p.max_iterations = req.max_iterations;
  return p;
}

RepairResult repair_min_energy(const RepairRequest& req) { return repair_at(req, req.horizon_s); }

MdsRepairResult mds_repair_baseline(const RepairRequest& req) {
  MdsRepairResult r;
  r.solution = oa_min_energy(mds_repair_problem(req, req.horizon_s));
  r.solution.allocation.horizon_s = req.horizon_s;
  r.total_files = req.params.n_files;
  return r;
}

RepairTimeResult repair_min_time(const RepairRequest& req) {
  if (!(req.emax_j > 0.0)) throw std::invalid_argument("energy budget must be positive");
  const RepairRequirement need = repair_requirement(req.point, req.params);
  const double target = need.per_helper * req.params.file_bits;
  // Feasible once at least D helpers can each carry beta files at full power.
  auto enough = [&](double horizon) {
    int ok = 0;
    for (const auto& ch : helper_channels(req, horizon)) {
      if (!ch.empty() && ch.max_bits(req.pmax_w) >= target) ++ok;
    }
    return ok >= need.helpers;
  };
  const TimeSearchOptions& opt = req.time_search;
  double lo = 0.0;
  double hi = 1.0;
  while (!enough(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opt.horizon_limit_s) throw InfeasibleError("repair traffic never fits at full power");
  }
  for (int i = 0; i < 200 && hi - lo > opt.time_tol_s * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (enough(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  RepairTimeResult out;
  out.t0_s = hi;
  RepairResult at_t0 = repair_at(req, out.t0_s);
  out.e0_j = at_t0.allocation.total_energy_j;
  if (req.emax_j >= out.e0_j) {
    out.t_star_s = out.t0_s;
    out.repair = std::move(at_t0);
    return out;
  }
  out.budget_bound = true;
  lo = out.t0_s;
  hi = opt.t_upper_factor * out.t0_s;
  RepairResult best = repair_at(req, hi);
  if (best.allocation.total_energy_j > req.emax_j) {
    throw InfeasibleError("energy budget is below the repair energy at the search bound T_ub");
  }
  for (; out.bisections < opt.max_bisections; ++out.bisections) {
    const double mid = 0.5 * (lo + hi);
    RepairResult trial = repair_at(req, mid);
    if (trial.allocation.total_energy_j <= req.emax_j) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  out.t_star_s = hi;
  out.repair = std::move(best);
  return out;
}

FileTimeResult mds_repair_min_time(const RepairRequest& req) {
  FileTimeResult r = min_time_file_allocation([&req](double horizon) { return mds_repair_problem(req, horizon); },
                                              req.emax_j, req.time_search);
  r.solution.allocation.horizon_s = r.t_star_s;
  return r;
}

}  // namespace georelay
