#include "georelay/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include "georelay/errors.hpp"

namespace georelay {

std::optional<Experiment> parse_experiment(const std::string& name) {
  if (name == "downlink-energy") return Experiment::kDownlinkEnergy;
  if (name == "downlink-time") return Experiment::kDownlinkTime;
  if (name == "uplink-energy") return Experiment::kUplinkEnergy;
  if (name == "uplink-time") return Experiment::kUplinkTime;
  if (name == "repair") return Experiment::kRepair;
  return std::nullopt;
}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kDownlinkEnergy: return "downlink-energy";
    case Experiment::kDownlinkTime: return "downlink-time";
    case Experiment::kUplinkEnergy: return "uplink-energy";
    case Experiment::kUplinkTime: return "uplink-time";
    case Experiment::kRepair: return "repair";
  }
  return "unknown";
}

std::vector<std::string> summary_header() {
  return {"experiment", "t_start_s", "method", "node", "mu", "energy_j", "bits", "horizon_s",
          "window_start_s", "window_end_s", "water_level", "t0_s", "e0_j", "budget_bound",
          "iterations", "z_lower", "z_upper", "kkt_residual_max", "reconstructable", "status"};
}

std::vector<std::string> profile_header() {
  return {"experiment", "t_start_s", "method", "node", "cell", "t_mid_s", "width_s", "power_w"};
}

double experiment_start_time(const Scenario& s, Experiment e) {
  switch (e) {
    case Experiment::kDownlinkEnergy:
    case Experiment::kDownlinkTime: return s.downlink.t_start_s;
    case Experiment::kUplinkEnergy:
    case Experiment::kUplinkTime: return s.uplink.t_start_s;
    case Experiment::kRepair: return s.repair.t_start_s;
  }
  return 0.0;
}

void set_experiment_start_time(Scenario& s, Experiment e, double t_start_s) {
  switch (e) {
    case Experiment::kDownlinkEnergy:
    case Experiment::kDownlinkTime: s.downlink.t_start_s = t_start_s; break;
    case Experiment::kUplinkEnergy:
    case Experiment::kUplinkTime: s.uplink.t_start_s = t_start_s; break;
    case Experiment::kRepair: s.repair.t_start_s = t_start_s; break;
  }
}

namespace {

constexpr double kOracleRelTol = 1e-6;

struct TimeInfo {
  double t0_s = std::nan("");
  double e0_j = std::nan("");
  std::optional<bool> budget_bound;
};

class Recorder {
 public:
  Recorder(Experiment e, double t_start_s) : experiment_(experiment_name(e)), ts_(format_number(t_start_s)) {
    out.summary.header = summary_header();
    out.profiles.header = profile_header();
  }

  void allocation(const std::string& method, const AllocationResult& a, const TimeInfo& time = {},
                  const std::string& reconstructable = "") {
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      const NodeAllocation& n = a.nodes[i];
      const std::string mu = i < a.mu.size() ? std::to_string(a.mu[i]) : format_number(n.files);
      out.summary.rows.push_back({experiment_, ts_, method, std::to_string(n.node + 1), mu,
                                  format_number(n.energy_j), format_number(n.bits), format_number(a.horizon_s),
                                  format_number(n.window.start_s), format_number(n.window.end_s),
                                  format_number(n.water_level), "", "", "", std::to_string(n.iterations), "", "",
                                  format_number(n.kkt_residual), "", "ok"});
      const TimeGrid& g = n.profile.grid();
      for (std::size_t k = 0; k < n.profile.size(); ++k) {
        out.profiles.rows.push_back({experiment_, ts_, method, std::to_string(n.node + 1), std::to_string(k),
                                     format_number(g.cell_mid(k)), format_number(g.cell_width(k)),
                                     format_number(n.profile[k])});
      }
    }
    double bits = 0.0;
    for (const auto& n : a.nodes) bits += n.bits;
    const std::string budget = time.budget_bound ? (*time.budget_bound ? "1" : "0") : "";
    out.summary.rows.push_back({experiment_, ts_, method, "all", format_vector(a.mu), format_number(a.total_energy_j),
                                format_number(bits), format_number(a.horizon_s), "", "", "",
                                format_number(time.t0_s), format_number(time.e0_j), budget,
                                std::to_string(a.diagnostics.iterations), format_number(a.diagnostics.z_lower),
                                format_number(a.diagnostics.z_upper), format_number(a.diagnostics.kkt_residual_max),
                                reconstructable, "ok"});
  }

  void failure(const std::string& method, const std::string& status) {
    std::vector<std::string> row(summary_header().size());
    row[0] = experiment_;
    row[1] = ts_;
    row[2] = method;
    row[3] = "all";
    row.back() = status;
    out.summary.rows.push_back(std::move(row));
  }

  // Runs one method; infeasibility becomes a status row, and is fatal for the main method.
  void guarded(const std::string& method, bool primary, const std::function<void()>& body) {
    try {
      body();
    } catch (const InfeasibleError& e) {
      failure(method, std::string("infeasible: ") + e.what());
      if (primary && !out.infeasible) {
        out.infeasible = true;
        out.infeasible_message = e.what();
      }
    }
  }

  void invariant(bool ok, const std::string& message) {
    if (ok || out.invariant_failed) return;
    out.invariant_failed = true;
    out.invariant_message = message;
  }

  ExperimentOutput out;

 private:
  std::string experiment_;
  std::string ts_;
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string reconstructable(const CodedStore& store, const std::vector<int>& mu) {
  return check_mu_reconstructable(store, mu) ? "1" : "0";
}

CodedStore seeded_store(const Scenario& s) {
  EncodeOptions options;
  options.min_field_order = static_cast<std::uint32_t>(s.solver.min_field_order);
  return encode(build_regen_params(s), FiniteField::with_order(s.solver.field_order), s.solver.seed, options);
}

TargetTimeProblem fixed_mu_time_problem(const UplinkRequest& req, const std::vector<int>& mu, bool constant) {
  TargetTimeProblem p;
  p.channels = [req](double horizon) { return uplink_problem(req, horizon).channels; };
  for (int k : mu) p.target_bits.push_back(k * req.file_bits);
  p.file_bits = req.file_bits;
  p.pmax_w = req.pmax_w;
  p.emax_j = req.emax_j;
  p.t_upper_factor = req.time_search.t_upper_factor;
  p.max_bisections = req.time_search.max_bisections;
  p.constant_power = constant;
  return p;
}

AllocationResult fixed_allocation(const FileAllocationProblem& problem, const std::vector<int>& mu, bool constant) {
  const FixedMuResult r = constant ? constant_power_fixed_mu(problem, mu) : solve_nlp_fixed_mu(problem, mu);
  return file_allocation(problem, r.solutions, mu);
}

AllocationResult with_mu(AllocationResult a, const std::vector<int>& mu) {
  a.mu = mu;
  return a;
}

void downlink_energy(Recorder& rec, const Scenario& s) {
  const DownlinkRequest req = build_downlink_request(s);
  rec.guarded("opt", true, [&] { rec.allocation("opt", min_energy_downlink(req)); });
  rec.guarded("constant", false, [&] { rec.allocation("constant", constant_power_baseline(req)); });
}

void downlink_time(Recorder& rec, const Scenario& s) {
  const DownlinkRequest req = build_downlink_request(s);
  auto record = [&](const std::string& method, const TimeMinResult& r) {
    rec.allocation(method, r.allocation, TimeInfo{r.t0_s, r.e0_j, r.budget_bound});
  };
  rec.guarded("opt", true, [&] { record("opt", min_time_downlink(req)); });
  rec.guarded("constant", false, [&] { record("constant", min_time_downlink_constant_power(req)); });
}

void uplink_energy(Recorder& rec, const Scenario& s, const ExperimentOptions& opt, const CodedStore& store) {
  const UplinkRequest req = build_uplink_request(s);
  const FileAllocationProblem problem = uplink_problem(req);
  rec.guarded("opt", true, [&] {
    const OAResult oa = oa_min_energy_uplink(req);
    rec.allocation("opt", oa.allocation, {}, reconstructable(store, oa.mu));
    rec.invariant(check_mu_reconstructable(store, oa.mu), "optimizer file split is not reconstructable");
    if (opt.oracle) {
      const DpResult dp = dp_oracle(problem);
      AllocationResult a = fixed_allocation(problem, dp.mu, false);
      a.horizon_s = req.horizon_s;
      rec.allocation("dp", a, {}, reconstructable(store, dp.mu));
      rec.invariant(close_rel(dp.energy_j, oa.allocation.total_energy_j, kOracleRelTol),
                    "OA energy differs from the DP oracle");
    }
  });
  const std::vector<int>& mu = s.uplink.baseline_mu_energy;
  for (bool constant : {false, true}) {
    const std::string method = constant ? "fixed_mu_constant" : "fixed_mu";
    rec.guarded(method, false, [&] {
      AllocationResult a = fixed_allocation(problem, mu, constant);
      a.horizon_s = req.horizon_s;
      rec.allocation(method, a, {}, reconstructable(store, mu));
    });
  }
}

void uplink_time(Recorder& rec, const Scenario& s, const ExperimentOptions& opt, const CodedStore& store) {
  const UplinkRequest req = build_uplink_request(s);
  rec.guarded("opt", true, [&] {
    const FileTimeResult r = min_time_uplink(req);
    rec.allocation("opt", r.solution.allocation, TimeInfo{r.t0_s, r.e0_j, r.budget_bound},
                   reconstructable(store, r.solution.mu));
    rec.invariant(check_mu_reconstructable(store, r.solution.mu), "optimizer file split is not reconstructable");
    if (opt.oracle) {
      const FileAllocationProblem problem = uplink_problem(req, r.t_star_s);
      const DpResult dp = dp_oracle(problem);
      AllocationResult a = fixed_allocation(problem, dp.mu, false);
      a.horizon_s = r.t_star_s;
      rec.allocation("dp", a, {}, reconstructable(store, dp.mu));
      rec.invariant(close_rel(dp.energy_j, r.solution.allocation.total_energy_j, kOracleRelTol),
                    "OA energy differs from the DP oracle at the optimal horizon");
    }
  });
  const std::vector<int>& mu = s.uplink.baseline_mu_time;
  for (bool constant : {false, true}) {
    const std::string method = constant ? "fixed_mu_constant" : "fixed_mu";
    rec.guarded(method, false, [&] {
      const TimeMinResult r = min_time_for_targets(fixed_mu_time_problem(req, mu, constant));
      rec.allocation(method, with_mu(r.allocation, mu), TimeInfo{r.t0_s, r.e0_j, r.budget_bound},
                     reconstructable(store, mu));
    });
  }
}

void repair(Recorder& rec, const Scenario& s, const ExperimentOptions& opt) {
  const RepairRequest req = build_repair_request(s);
  rec.guarded("regenerating", true, [&] {
    const RepairResult r = repair_min_energy(req);
    rec.allocation("regenerating", r.allocation);
  });
  rec.guarded("mds", false, [&] {
    const MdsRepairResult r = mds_repair_baseline(req);
    rec.allocation("mds", r.solution.allocation);
    if (opt.oracle) {
      const DpResult dp = dp_oracle(mds_repair_problem(req, req.horizon_s));
      rec.invariant(close_rel(dp.energy_j, r.solution.allocation.total_energy_j, kOracleRelTol),
                    "MDS repair OA energy differs from the DP oracle");
    }
  });
  rec.guarded("regenerating_time", false, [&] {
    const RepairTimeResult r = repair_min_time(req);
    rec.allocation("regenerating_time", r.repair.allocation, TimeInfo{r.t0_s, r.e0_j, r.budget_bound});
  });
  rec.guarded("mds_time", false, [&] {
    const FileTimeResult r = mds_repair_min_time(req);
    rec.allocation("mds_time", r.solution.allocation, TimeInfo{r.t0_s, r.e0_j, r.budget_bound});
  });
}

}  // namespace

ExperimentOutput run_experiment(Experiment e, const Scenario& s, const ExperimentOptions& options) {
  Recorder rec(e, experiment_start_time(s, e));
  switch (e) {
    case Experiment::kDownlinkEnergy: downlink_energy(rec, s); break;
    case Experiment::kDownlinkTime: downlink_time(rec, s); break;
    case Experiment::kUplinkEnergy: uplink_energy(rec, s, options, seeded_store(s)); break;
    case Experiment::kUplinkTime: uplink_time(rec, s, options, seeded_store(s)); break;
    case Experiment::kRepair: repair(rec, s, options); break;
  }
  return std::move(rec.out);
}

int thread_count_from_env() {
  if (const char* env = std::getenv("GEORELAY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentOutput run_sweep(Experiment e, const Scenario& s, double from, double to, double step,
                           const ExperimentOptions& options) {
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (!(to >= from)) throw ConfigError("sweep range is empty");
  std::vector<double> points;
  for (long long i = 0;; ++i) {
    const double t = from + static_cast<double>(i) * step;
    if (t > to + 1e-9 * std::max(1.0, std::abs(to))) break;
    points.push_back(t);
  }

  std::vector<ExperimentOutput> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        Scenario local = s;
        set_experiment_start_time(local, e, points[i]);
        results[i] = run_experiment(e, local, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads > 0 ? options.threads : thread_count_from_env(),
                                                static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ExperimentOutput out;
  out.summary.header = summary_header();
  out.profiles.header = profile_header();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    ExperimentOutput& r = results[i];
    for (auto& row : r.summary.rows) out.summary.rows.push_back(std::move(row));
    for (auto& row : r.profiles.rows) out.profiles.rows.push_back(std::move(row));
    if (r.infeasible && !out.infeasible) {
      out.infeasible = true;
      out.infeasible_message = r.infeasible_message;
    }
    if (r.invariant_failed && !out.invariant_failed) {
      out.invariant_failed = true;
      out.invariant_message = r.invariant_message;
    }
  }
  return out;
}

CodeCheckReport run_code_check(const Scenario& s) {
  CodeCheckReport rep;
  rep.table.header = {"check", "value", "expected", "ok"};
  auto add = [&](const std::string& check, const std::string& value, const std::string& expected, bool ok) {
    rep.table.rows.push_back({check, value, expected, ok ? "1" : "0"});
    rep.lines.push_back(check + ": " + value + (expected.empty() ? "" : " (expected " + expected + ")") +
                        (ok ? "" : " FAIL"));
    rep.ok = rep.ok && ok;
  };
  auto str = [](const Rational& r) {
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  };

  const RegenParams p = build_regen_params(s);
  const RegenPoint point = build_point(s);
  const OperatingPoint op = point == RegenPoint::kMsr ? msr_point(p.n_files, p.reconstruct_k, p.repair_d)
                                                      : mbr_point(p.n_files, p.reconstruct_k, p.repair_d);
  add("point", point == RegenPoint::kMsr ? "msr" : "mbr", "", true);
  add("alpha", str(op.alpha), std::to_string(p.per_node_files), op.alpha == Rational(p.per_node_files));
  add("beta", str(op.beta), std::to_string(p.per_helper_files), op.beta == Rational(p.per_helper_files));
  add("gamma", str(op.gamma), std::to_string(p.repair_d * p.per_helper_files),
      op.gamma == Rational(p.repair_d * p.per_helper_files));

  const ParamReport pr = validate_params(p);
  add("storage_sum", std::to_string(pr.storage_sum), ">= " + std::to_string(p.n_files), pr.ok);
  if (!pr.ok) rep.lines.push_back("violation: " + pr.violation);

  const RepairRequirement rr = repair_requirement(point, p);
  add("repair_helpers", std::to_string(rr.helpers), std::to_string(p.repair_d), rr.helpers == p.repair_d);
  add("repair_per_helper", std::to_string(rr.per_helper), std::to_string(p.per_helper_files),
      rr.per_helper == p.per_helper_files);
  add("repair_total", std::to_string(rr.total), std::to_string(p.repair_d * p.per_helper_files),
      rr.total == p.repair_d * p.per_helper_files);
  add("mds_repair_total", std::to_string(p.n_files), "", true);
  if (!pr.ok) return rep;

  const CodedStore store = seeded_store(s);
  add("field_order", std::to_string(store.field.order()), ">= " + std::to_string(s.solver.min_field_order),
      store.field.order() >= static_cast<std::uint32_t>(s.solver.min_field_order));
  add("encode_attempts", std::to_string(store.attempts), "", true);

  // Any K whole nodes must reconstruct.
  const int n = p.n_nodes;
  std::vector<int> pick(static_cast<std::size_t>(n), 0);
  std::fill(pick.end() - p.reconstruct_k, pick.end(), 1);
  int subsets = 0;
  int good = 0;
  do {
    std::vector<int> mu(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) mu[static_cast<std::size_t>(i)] = pick[static_cast<std::size_t>(i)] * p.per_node_files;
    ++subsets;
    if (check_mu_reconstructable(store, mu)) ++good;
  } while (std::next_permutation(pick.begin(), pick.end()));
  add("any_k_nodes_rank_full", std::to_string(good) + "/" + std::to_string(subsets), std::to_string(subsets) + "/" + std::to_string(subsets),
      good == subsets);

  for (const auto& [name, mu] : {std::pair{std::string("baseline_mu_energy"), s.uplink.baseline_mu_energy},
                                 std::pair{std::string("baseline_mu_time"), s.uplink.baseline_mu_time}}) {
    if (static_cast<int>(mu.size()) != n) continue;
    const bool ok = check_mu_reconstructable(store, mu);
    add(name + "_rank_full", ok ? "1" : "0", "1", ok);
  }

  std::vector<int> full(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < p.reconstruct_k; ++i) full[static_cast<std::size_t>(i)] = p.per_node_files;
  const Selectors sel = prefix_selectors(full);
  const bool roundtrip = reconstruct(store, download(store, sel)) == store.source;
  add("decode_roundtrip", roundtrip ? "1" : "0", "1", roundtrip);
  return rep;
}

}  // namespace georelay
