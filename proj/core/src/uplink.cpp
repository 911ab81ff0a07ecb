#include "georelay/uplink.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "georelay/errors.hpp"
#include "georelay/lp.hpp"

namespace georelay {

std::vector<int> FileAllocationProblem::file_limits() const {
  std::vector<int> limits(channels.size(), 0);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].empty()) continue;
    const double max_bits = channels[i].max_bits(pmax_w);
    // Largest k with k * u <= max_bits, matching the waterfilling feasibility check.
    auto k = static_cast<long long>(std::floor(max_bits / file_bits));
    while (static_cast<double>(k + 1) * file_bits <= max_bits) ++k;
    while (k > 0 && static_cast<double>(k) * file_bits > max_bits) --k;
    limits[i] = static_cast<int>(std::min<long long>(cap, k));
  }
  return limits;
}

namespace {

void check_problem(const FileAllocationProblem& p) {
  if (p.n_files < 0) throw std::invalid_argument("file count must be non-negative");
  if (p.cap < 0) throw std::invalid_argument("per-node cap must be non-negative");
  if (!(p.file_bits > 0.0)) throw std::invalid_argument("file size must be positive");
  if (!(p.pmax_w > 0.0)) throw std::invalid_argument("P_max must be positive");
  if (!p.node_ids.empty() && p.node_ids.size() != p.channels.size()) {
    throw std::invalid_argument("node id list does not match channel count");
  }
}

void check_integer_feasible(const FileAllocationProblem& p) {
  const auto limits = p.file_limits();
  long long total = 0;
  for (int l : limits) total += l;
  if (total < p.n_files) {
    throw InfeasibleError("only " + std::to_string(total) + " of " + std::to_string(p.n_files) +
                          " files fit at full power");
  }
}

double level_for_marginal(const Channel& ch, double marginal, double file_bits) {
  // dE/dmu = u lambda / W and lambda = level ln2.
  return marginal * ch.bandwidth_hz() / (file_bits * std::numbers::ln2);
}

}  // namespace

NlprResult solve_nlpr(const FileAllocationProblem& problem) {
  check_problem(problem);
  const std::size_t n = problem.channels.size();
  const double u = problem.file_bits;
  std::vector<double> limit(n, 0.0);
  std::vector<double> max_bits(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (problem.channels[i].empty()) continue;
    max_bits[i] = problem.channels[i].max_bits(problem.pmax_w);
    limit[i] = std::min(static_cast<double>(problem.cap), max_bits[i] / u);
    total += limit[i];
  }
  if (total < problem.n_files) throw InfeasibleError("relaxation infeasible: too few files fit at full power");

  auto files_at = [&](double marginal, std::size_t i) {
    if (limit[i] <= 0.0) return 0.0;
    const Channel& ch = problem.channels[i];
    const double level = level_for_marginal(ch, marginal, u);
    return std::min(limit[i], bits_at_level(ch, level, problem.pmax_w) / u);
  };
  auto sum_at = [&](double marginal) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += files_at(marginal, i);
    return s;
  };

  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (limit[i] <= 0.0) continue;
    const Channel& ch = problem.channels[i];
    hi = std::max(hi, saturation_level(ch, problem.pmax_w) * u * std::numbers::ln2 / ch.bandwidth_hz());
  }
  double lo = 0.0;
  const double m = problem.n_files;
  for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sum_at(mid) >= m) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  NlprResult r;
  r.marginal_j_per_file = hi;
  r.mu.assign(n, 0.0);
  std::vector<double> mu_lo(n);
  std::vector<double> mu_hi(n);
  double s_lo = 0.0;
  double s_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu_lo[i] = files_at(lo, i);
    mu_hi[i] = files_at(hi, i);
    s_lo += mu_lo[i];
    s_hi += mu_hi[i];
  }
  const double theta = s_hi > s_lo ? std::clamp((m - s_lo) / (s_hi - s_lo), 0.0, 1.0) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.mu[i] = mu_lo[i] + theta * (mu_hi[i] - mu_lo[i]);
    const double target = std::min(r.mu[i] * u, max_bits[i]);
    r.solutions.push_back(constrained_waterfill(problem.channels[i], target, problem.pmax_w));
    r.energy_j += r.solutions.back().energy_j;
  }
  return r;
}

namespace {

void check_mu(const FileAllocationProblem& problem, const std::vector<int>& mu) {
  if (mu.size() != problem.channels.size()) throw std::invalid_argument("mu length does not match node count");
  long long sum = 0;
  for (int k : mu) {
    if (k < 0 || k > problem.cap) throw std::invalid_argument("mu entry outside [0, cap]");
    sum += k;
  }
  if (sum != problem.n_files) throw std::invalid_argument("mu does not sum to the file count");
}

template <typename Solve>
FixedMuResult solve_each(const FileAllocationProblem& problem, const std::vector<int>& mu, Solve solve) {
  check_problem(problem);
  check_mu(problem, mu);
  FixedMuResult r;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    try {
      r.solutions.push_back(solve(problem.channels[i], mu[i] * problem.file_bits, problem.pmax_w));
    } catch (const InfeasibleTargetError& e) {
      throw InfeasibleTargetError("node " + std::to_string(problem.node_id(i) + 1) + ": " + e.what(),
                                  e.max_bits());
    }
    r.energy_j += r.solutions.back().energy_j;
  }
  return r;
}

}  // namespace

FixedMuResult solve_nlp_fixed_mu(const FileAllocationProblem& problem, const std::vector<int>& mu) {
  return solve_each(problem, mu, [](const Channel& ch, double target, double pmax) {
    return constrained_waterfill(ch, target, pmax);
  });
}

FixedMuResult constant_power_fixed_mu(const FileAllocationProblem& problem, const std::vector<int>& mu) {
  return solve_each(problem, mu, [](const Channel& ch, double target, double pmax) {
    return constant_power_solve(ch, target, pmax);
  });
}

std::vector<double> cut_gradient(const Channel& channel, const std::vector<double>& power) {
  std::vector<double> grad(channel.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const double g = channel.gain(k);
    grad[k] = -(channel.weight(k) / std::numbers::ln2) * g / (1.0 + g * power[k]);
  }
  return grad;
}

MasterResult solve_oa_master(const FileAllocationProblem& problem, const OAState& state) {
  check_problem(problem);
  if (state.points.empty()) throw std::invalid_argument("the master problem needs at least one linearization point");
  const std::size_t n = problem.channels.size();
  const auto limits = problem.file_limits();
  const double inf = std::numeric_limits<double>::infinity();

  MasterResult out;
  // value[i][k] and argmin power of the per-node LP with mu_i = k fixed.
  std::vector<std::vector<double>> value(n);
  std::vector<std::vector<std::vector<double>>> argmin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Channel& ch = problem.channels[i];
    const std::size_t cells = ch.size();
    value[i].assign(static_cast<std::size_t>(limits[i]) + 1, inf);
    argmin[i].resize(value[i].size());
    value[i][0] = 0.0;
    argmin[i][0].assign(cells, 0.0);
    if (limits[i] == 0) continue;

    // Cut s: sum_j a_j P_j >= k u / W - B(Pbar) + sum_j a_j Pbar_j.
    std::vector<std::vector<double>> coeffs;
    std::vector<double> offset;
    for (const auto& point : state.points) {
      const auto& pbar = point.power[i];
      std::vector<double> a = cut_gradient(ch, pbar);
      double shift = -ch.bits(pbar) / ch.bandwidth_hz();
      for (std::size_t j = 0; j < cells; ++j) {
        a[j] = -a[j];
        shift += a[j] * pbar[j];
      }
      coeffs.push_back(std::move(a));
      offset.push_back(shift);
    }

    lp::LinearProgram prog;
    for (std::size_t j = 0; j < cells; ++j) prog.add_variable(ch.weight(j), 0.0, problem.pmax_w);
    for (std::size_t s = 0; s < coeffs.size(); ++s) prog.add_row(coeffs[s], lp::Sense::kGreaterEqual, 0.0);
    for (int k = 1; k <= limits[i]; ++k) {
      const double need = k * problem.file_bits / ch.bandwidth_hz();
      for (std::size_t s = 0; s < coeffs.size(); ++s) prog.rows[s].rhs = need + offset[s];
      const lp::LpResult res = lp::solve_lp(prog);
      ++out.lp_solves;
      if (res.status == lp::Status::kOptimal) {
        value[i][static_cast<std::size_t>(k)] = res.objective;
        argmin[i][static_cast<std::size_t>(k)] = res.x;
      } else if (res.status != lp::Status::kInfeasible) {
        throw InvariantError(std::string("master subproblem LP ended with status ") + lp::to_string(res.status));
      }
    }
  }

  // Choose one k per node with sum k = M.
  lp::MilpSpec spec;
  std::vector<std::pair<std::size_t, int>> var_of;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < value[i].size(); ++k) {
      if (!std::isfinite(value[i][k])) continue;
      spec.integer_vars.push_back(spec.lp.add_variable(value[i][k], 0.0, 1.0));
      var_of.emplace_back(i, static_cast<int>(k));
    }
  }
  const std::size_t nv = var_of.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
      if (var_of[v].first == i) row[v] = 1.0;
    }
    spec.lp.add_row(std::move(row), lp::Sense::kEqual, 1.0);
  }
  std::vector<double> count(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) count[v] = var_of[v].second;
  spec.lp.add_row(std::move(count), lp::Sense::kEqual, problem.n_files);

  const lp::MilpResult milp = lp::solve_milp(spec);
  out.milp_nodes = milp.nodes;
  if (milp.status == lp::Status::kInfeasible) throw InfeasibleError("OA master problem is infeasible");
  if (milp.status != lp::Status::kOptimal) {
    throw InvariantError(std::string("OA master MILP ended with status ") + lp::to_string(milp.status));
  }
  out.mu.assign(n, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (milp.x[v] > 0.5) out.mu[var_of[v].first] = var_of[v].second;
  }
  out.power.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(out.mu[i]);
    out.value += value[i][k];
    out.power[i] = argmin[i][k];
  }
  return out;
}

AllocationResult file_allocation(const FileAllocationProblem& problem, const std::vector<WaterfillResult>& sols,
                                 const std::vector<int>& mu) {
  AllocationResult a;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    a.nodes.push_back(make_node_allocation(problem.node_id(i), problem.channels[i], sols[i], problem.file_bits));
  }
  a.mu = mu;
  a.finalize();
  return a;
}

namespace {

std::vector<std::vector<double>> powers_of(const std::vector<WaterfillResult>& sols) {
  std::vector<std::vector<double>> p;
  for (const auto& s : sols) p.emplace_back(s.profile.values().begin(), s.profile.values().end());
  return p;
}

}  // namespace

OAResult oa_min_energy(const FileAllocationProblem& problem) {
  check_problem(problem);
  check_integer_feasible(problem);
  OAResult out;
  out.relaxation = solve_nlpr(problem);

  bool integral = true;
  std::vector<int> rounded;
  for (double m : out.relaxation.mu) {
    const double r = std::round(m);
    if (std::abs(m - r) > 1e-9) integral = false;
    rounded.push_back(static_cast<int>(r));
  }
  OAState& st = out.state;
  if (integral) {
    const FixedMuResult nlp = solve_nlp_fixed_mu(problem, rounded);
    st.z_lower = st.z_upper = nlp.energy_j;
    st.epsilon = problem.epsilon_rel * nlp.energy_j;
    out.mu = rounded;
    out.allocation = file_allocation(problem, nlp.solutions, rounded);
  } else {
    st.points.push_back(OAPoint{powers_of(out.relaxation.solutions), out.relaxation.mu});
    std::vector<WaterfillResult> best;
    for (int it = 1; it <= problem.max_iterations; ++it) {
      const MasterResult master = solve_oa_master(problem, st);
      st.z_lower = std::max(st.z_lower, master.value);
      const FixedMuResult nlp = solve_nlp_fixed_mu(problem, master.mu);
      if (nlp.energy_j < st.z_upper) {
        if (!std::isfinite(st.z_upper)) st.epsilon = problem.epsilon_rel * nlp.energy_j;
        st.z_upper = nlp.energy_j;
        out.mu = master.mu;
        best = nlp.solutions;
      }
      st.points.push_back(OAPoint{powers_of(nlp.solutions), std::vector<double>(master.mu.begin(), master.mu.end())});
      st.log.push_back(OAIteration{it, master.value, nlp.energy_j, st.z_lower, st.z_upper, master.mu});
      out.iterations = it;
      if (st.z_upper - st.z_lower <= st.epsilon) break;
    }
    out.allocation = file_allocation(problem, best, out.mu);
  }
  out.allocation.diagnostics.iterations = out.iterations;
  out.allocation.diagnostics.z_lower = st.z_lower;
  out.allocation.diagnostics.z_upper = st.z_upper;
  return out;
}

DpResult dp_over_table(const std::vector<std::vector<double>>& table, int n_files) {
  const std::size_t n = table.size();
  const auto m = static_cast<std::size_t>(n_files);
  const double inf = std::numeric_limits<double>::infinity();
  // suffix[i][s]: cheapest way for nodes i..n-1 to carry s files.
  std::vector<std::vector<double>> suffix(n + 1, std::vector<double>(m + 1, inf));
  suffix[n][0] = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t s = 0; s <= m; ++s) {
      for (std::size_t k = 0; k < table[i].size() && k <= s; ++k) {
        suffix[i][s] = std::min(suffix[i][s], table[i][k] + suffix[i + 1][s - k]);
      }
    }
  }
  if (!std::isfinite(suffix[0][m])) throw InfeasibleError("no file split is feasible");

  DpResult r;
  std::size_t s = m;
  for (std::size_t i = 0; i < n; ++i) {
    const double goal = suffix[i][s];
    const double slack = 1e-12 * std::max(1.0, std::abs(goal));
    for (std::size_t k = 0; k < table[i].size() && k <= s; ++k) {
      if (table[i][k] + suffix[i + 1][s - k] <= goal + slack) {
        r.mu.push_back(static_cast<int>(k));
        r.energy_j += table[i][k];
        s -= k;
        break;
      }
    }
  }
  return r;
}

DpResult dp_oracle(const FileAllocationProblem& problem) {
  check_problem(problem);
  std::vector<std::vector<double>> table(problem.channels.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (int k = 0; k <= problem.cap; ++k) {
      table[i].push_back(min_energy_for_files(problem.channels[i], k, problem.file_bits, problem.pmax_w));
    }
  }
  DpResult r = dp_over_table(table, problem.n_files);
  r.energy_table = std::move(table);
  return r;
}

int files_at_full_power(const FileAllocationProblem& problem) {
  int total = 0;
  for (int l : problem.file_limits()) total += l;
  return total;
}

FileTimeResult min_time_file_allocation(const ProblemFactory& factory, double emax_j,
                                        const TimeSearchOptions& options) {
  if (!(emax_j > 0.0)) throw std::invalid_argument("energy budget must be positive");
  FileTimeResult out;
  const int m = factory(0.0).n_files;
  auto enough = [&](double horizon) { return files_at_full_power(factory(horizon)) >= m; };

  double lo = 0.0;
  double hi = 1.0;
  if (m > 0) {
    while (!enough(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > options.horizon_limit_s) throw InfeasibleError("the file count never fits at full power");
    }
    for (int i = 0; i < 200 && hi - lo > options.time_tol_s * std::max(1.0, hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      if (enough(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  } else {
    hi = 0.0;
  }
  out.t0_s = hi;
  OAResult at_t0 = oa_min_energy(factory(out.t0_s));
  out.e0_j = at_t0.allocation.total_energy_j;
  if (emax_j >= out.e0_j) {
    out.t_star_s = out.t0_s;
    out.solution = std::move(at_t0);
    return out;
  }

  out.budget_bound = true;
  lo = out.t0_s;
  hi = options.t_upper_factor * out.t0_s;
  OAResult best = oa_min_energy(factory(hi));
  if (best.allocation.total_energy_j > emax_j) {
    throw InfeasibleError("energy budget is below the optimal energy at the search bound T_ub");
  }
  for (; out.bisections < options.max_bisections; ++out.bisections) {
    if (emax_j - best.allocation.total_energy_j <= options.energy_rel_tol * emax_j) break;
    const double mid = 0.5 * (lo + hi);
    OAResult trial = oa_min_energy(factory(mid));
    if (trial.allocation.total_energy_j <= emax_j) {
      hi = mid;
      best = std::move(trial);
    } else {
      lo = mid;
    }
  }
  out.t_star_s = hi;
  out.solution = std::move(best);
  return out;
}

std::vector<TimeWindow> uplink_windows(const UplinkRequest& req, double horizon_s) {
  std::vector<TimeWindow> w(req.scenario.n_leos());
  for (std::size_t n = 0; n < w.size(); ++n) {
    w[n].start_s = std::max(req.t_start_s, coverage_entry_time(req.scenario, n));
    w[n].end_s = req.t_start_s + horizon_s;
  }
  return w;
}

FileAllocationProblem uplink_problem(const UplinkRequest& req, double horizon_s) {
  if (req.links.size() != req.scenario.n_leos()) {
    throw std::invalid_argument("one link parameter set per LEOS is required");
  }
  if (!(req.dt_s > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (req.t_start_s < 0.0) throw std::invalid_argument("start time must be non-negative");
  FileAllocationProblem p;
  p.n_files = req.n_files;
  p.cap = req.alpha;
  p.file_bits = req.file_bits;
  p.pmax_w = req.pmax_w;
  p.epsilon_rel = req.epsilon_rel;
  p.max_iterations = req.max_iterations;
  const auto windows = uplink_windows(req, horizon_s);
  for (std::size_t n = 0; n < windows.size(); ++n) {
    const ConstellationScenario& sc = req.scenario;
    p.channels.push_back(Channel::sample(windows[n], req.dt_s, aggregate_gain(req.links[n]),
                                         req.links[n].bandwidth_hz,
                                         [&sc, n](double t) { return geos_distance(sc, n, t); }));
  }
  return p;
}

FileAllocationProblem uplink_problem(const UplinkRequest& req) { return uplink_problem(req, req.horizon_s); }

OAResult oa_min_energy_uplink(const UplinkRequest& req) {
  OAResult r = oa_min_energy(uplink_problem(req));
  r.allocation.horizon_s = req.horizon_s;
  return r;
}

DpResult dp_oracle(const UplinkRequest& req) { return dp_oracle(uplink_problem(req)); }

FileTimeResult min_time_uplink(const UplinkRequest& req) {
  FileTimeResult r = min_time_file_allocation(
      [&req](double horizon) { return uplink_problem(req, horizon); }, req.emax_j, req.time_search);
  r.solution.allocation.horizon_s = r.t_star_s;
  return r;
}

}  // namespace georelay
