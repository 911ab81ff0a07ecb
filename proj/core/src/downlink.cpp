#include "georelay/downlink.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "georelay/errors.hpp"

namespace georelay {

void AllocationResult::finalize() {
  total_energy_j = 0.0;
  diagnostics.kkt_residual_max = 0.0;
  for (const auto& n : nodes) {
    total_energy_j += n.energy_j;
    diagnostics.kkt_residual_max = std::max(diagnostics.kkt_residual_max, n.kkt_residual);
  }
}

NodeAllocation make_node_allocation(std::size_t node, const Channel& channel,
                                    const WaterfillResult& solution, double file_bits) {
  NodeAllocation a;
  a.node = node;
  a.window = channel.grid().window();
  a.profile = solution.profile;
  a.energy_j = solution.energy_j;
  a.bits = solution.delivered_bits;
  a.files = file_bits > 0.0 ? solution.delivered_bits / file_bits : 0.0;
  a.water_level = solution.water_level;
  a.iterations = solution.outer_iterations;
  a.kkt_residual = solution.kkt_residual;
  return a;
}

std::vector<TimeWindow> downlink_windows(const DownlinkRequest& req, double horizon_s) {
  std::vector<TimeWindow> w(req.scenario.n_leos());
  for (std::size_t n = 0; n < w.size(); ++n) {
    w[n].start_s = std::max(req.t_start_s, coverage_entry_time(req.scenario, n));
    w[n].end_s = req.t_start_s + horizon_s;
  }
  return w;
}

namespace {

void check_request(const DownlinkRequest& req) {
  if (req.links.size() != req.scenario.n_leos()) {
    throw std::invalid_argument("one link parameter set per LEOS is required");
  }
  if (!(req.pmax_w > 0.0)) throw std::invalid_argument("P_max must be positive");
  if (!(req.dt_s > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (req.alpha < 0) throw std::invalid_argument("alpha must be non-negative");
  if (req.t_start_s < 0.0) throw std::invalid_argument("start time must be non-negative");
}

Channel channel_for(const DownlinkRequest& req, std::size_t n, TimeWindow window) {
  const double gain = aggregate_gain(req.links[n]);
  return Channel::sample(window, req.dt_s, gain, req.links[n].bandwidth_hz,
                         [&](double t) { return geos_distance(req.scenario, n, t); });
}

double target_bits(const DownlinkRequest& req) { return req.alpha * req.file_bits; }

AllocationResult energy_at(const DownlinkRequest& req, double horizon_s, bool constant_power) {
  AllocationResult result;
  result.horizon_s = horizon_s;
  const auto channels = downlink_channels(req, horizon_s);
  for (std::size_t n = 0; n < channels.size(); ++n) {
    try {
      const WaterfillResult sol = constant_power
                                      ? constant_power_solve(channels[n], target_bits(req), req.pmax_w)
                                      : constrained_waterfill(channels[n], target_bits(req), req.pmax_w);
      result.nodes.push_back(make_node_allocation(n, channels[n], sol, req.file_bits));
    } catch (const InfeasibleTargetError& e) {
      throw InfeasibleTargetError("LEOS " + std::to_string(n + 1) + ": " + e.what(), e.max_bits());
    }
  }
  result.finalize();
  return result;
}

}  // namespace

std::vector<Channel> downlink_channels(const DownlinkRequest& req, double horizon_s) {
  check_request(req);
  const auto windows = downlink_windows(req, horizon_s);
  std::vector<Channel> channels;
  channels.reserve(windows.size());
  for (std::size_t n = 0; n < windows.size(); ++n) channels.push_back(channel_for(req, n, windows[n]));
  return channels;
}

AllocationResult min_energy_downlink(const DownlinkRequest& req) {
  return energy_at(req, req.horizon_s, false);
}

WaterfillResult constant_power_solve(const Channel& channel, double target_bits, double pmax) {
  WaterfillResult r;
  if (target_bits <= 0.0) {
    r.profile = PowerProfile::zeros(channel.grid());
    return r;
  }
  const double max_bits = channel.max_bits(pmax);
  if (target_bits > max_bits) {
    throw InfeasibleTargetError("constant power cannot reach the bit target at the cap", max_bits);
  }
  double lo = 0.0;
  double hi = pmax;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (channel.max_bits(mid) >= target_bits) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  r.profile = PowerProfile::constant(channel.grid(), hi);
  r.energy_j = r.profile.energy();
  r.delivered_bits = channel.max_bits(hi);
  r.outer_iterations = 1;
  return r;
}

AllocationResult constant_power_baseline(const DownlinkRequest& req) {
  return energy_at(req, req.horizon_s, true);
}

namespace {

TargetTimeProblem target_problem(const DownlinkRequest& req, bool constant_power) {
  check_request(req);
  if (!(req.emax_j > 0.0)) throw std::invalid_argument("energy budget must be positive");
  TargetTimeProblem p;
  p.channels = [req](double horizon) { return downlink_channels(req, horizon); };
  p.target_bits.assign(req.scenario.n_leos(), target_bits(req));
  p.file_bits = req.file_bits;
  p.pmax_w = req.pmax_w;
  p.emax_j = req.emax_j;
  p.t_upper_factor = req.t_upper_factor;
  p.max_bisections = req.max_bisections;
  p.constant_power = constant_power;
  return p;
}

// Smallest horizon at which node n carries its target at full power.
double node_min_duration(const TargetTimeProblem& p, std::size_t n) {
  const double target = p.target_bits[n];
  if (target <= 0.0) return 0.0;
  auto carries = [&](double horizon) {
    const std::vector<Channel> ch = p.channels(horizon);
    return !ch[n].empty() && ch[n].max_bits(p.pmax_w) >= target;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (!carries(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > p.horizon_limit_s) {
      throw InfeasibleError("node " + std::to_string(n + 1) + " cannot deliver its target in any window");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (carries(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

AllocationResult energy_for_targets(const TargetTimeProblem& problem, double horizon_s) {
  const std::vector<Channel> channels = problem.channels(horizon_s);
  if (channels.size() != problem.target_bits.size()) {
    throw std::invalid_argument("one bit target per channel is required");
  }
  AllocationResult result;
  result.horizon_s = horizon_s;
  for (std::size_t n = 0; n < channels.size(); ++n) {
    const double target = problem.target_bits[n];
    try {
      const WaterfillResult sol = problem.constant_power ? constant_power_solve(channels[n], target, problem.pmax_w)
                                                         : constrained_waterfill(channels[n], target, problem.pmax_w);
      result.nodes.push_back(make_node_allocation(n, channels[n], sol, problem.file_bits));
    } catch (const InfeasibleTargetError& e) {
      throw InfeasibleTargetError("node " + std::to_string(n + 1) + ": " + e.what(), e.max_bits());
    }
  }
  result.finalize();
  return result;
}

TimeMinResult min_time_for_targets(const TargetTimeProblem& problem) {
  if (!(problem.emax_j > 0.0)) throw std::invalid_argument("energy budget must be positive");
  TimeMinResult out;
  for (std::size_t n = 0; n < problem.target_bits.size(); ++n) {
    out.t0_s = std::max(out.t0_s, node_min_duration(problem, n));
  }
  AllocationResult at_t0 = energy_for_targets(problem, out.t0_s);
  out.e0_j = at_t0.total_energy_j;
  if (problem.emax_j >= out.e0_j) {
    out.t_star_s = out.t0_s;
    out.allocation = std::move(at_t0);
    return out;
  }

  out.budget_bound = true;
  double lo = out.t0_s;
  double hi = problem.t_upper_factor * out.t0_s;
  AllocationResult best = energy_for_targets(problem, hi);
  if (best.total_energy_j > problem.emax_j) {
    throw InfeasibleError("energy budget is below the optimal energy at the search bound T_ub");
  }
  for (; out.bisections < problem.max_bisections; ++out.bisections) {
    const double mid = 0.5 * (lo + hi);
    AllocationResult trial = energy_for_targets(problem, mid);
    if (trial.total_energy_j <= problem.emax_j) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  out.t_star_s = hi;
  out.allocation = std::move(best);
  out.allocation.diagnostics.iterations = out.bisections;
  return out;
}

double min_duration_at_pmax(const DownlinkRequest& req, std::size_t n) {
  return node_min_duration(target_problem(req, false), n);
}

TimeMinResult min_time_downlink(const DownlinkRequest& req) {
  return min_time_for_targets(target_problem(req, false));
}

TimeMinResult min_time_downlink_constant_power(const DownlinkRequest& req) {
  return min_time_for_targets(target_problem(req, true));
}

}  // namespace georelay
