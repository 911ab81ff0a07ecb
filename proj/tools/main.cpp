#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "georelay/errors.hpp"
#include "georelay/experiments.hpp"
#include "georelay/scenario.hpp"

namespace fs = std::filesystem;
using georelay::Experiment;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInvariant = 4;

struct Flags {
  std::string scenario;
  std::optional<double> ts;
  std::optional<double> horizon;
  std::optional<double> emax;
  std::optional<double> pmax;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::string out = ".";
  bool oracle = false;
  bool gnuplot = false;
};

struct SweepFlags {
  std::string param = "ts";
  double from = 0.0;
  double to = 600.0;
  double step = 50.0;
  std::string experiment = "uplink-energy";
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file (defaults when omitted)");
  cmd->add_option("--ts", f.ts, "Start time t_s [s]");
  cmd->add_option("--horizon", f.horizon, "Horizon T [s]");
  cmd->add_option("--emax", f.emax, "Energy budget [J]");
  cmd->add_option("--pmax", f.pmax, "Peak power [W]");
  cmd->add_option("--seed", f.seed, "Seed for the coding matrices");
  cmd->add_option("--dt", f.dt, "Time grid step [s]");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--oracle", f.oracle, "Cross-check OA solutions against the DP oracle");
  cmd->add_flag("--gnuplot", f.gnuplot, "Also write a gnuplot script for the power profiles");
}

// Applies flag overrides to the block the experiment reads.
georelay::Scenario resolve(const Flags& f, std::optional<Experiment> e) {
  georelay::Scenario s = f.scenario.empty() ? georelay::parse_scenario("{}") : georelay::load_scenario_file(f.scenario);
  if (f.seed) s.solver.seed = *f.seed;
  if (f.dt) s.solver.dt_s = *f.dt;
  if (e) {
    double* ts = nullptr;
    double* horizon = nullptr;
    double* emax = nullptr;
    double* pmax = nullptr;
    switch (*e) {
      case Experiment::kDownlinkEnergy:
      case Experiment::kDownlinkTime:
        ts = &s.downlink.t_start_s, horizon = &s.downlink.horizon_s;
        emax = &s.downlink.emax_j, pmax = &s.downlink.pmax_w;
        break;
      case Experiment::kUplinkEnergy:
      case Experiment::kUplinkTime:
        ts = &s.uplink.t_start_s, horizon = &s.uplink.horizon_s;
        emax = &s.uplink.emax_j, pmax = &s.uplink.pmax_w;
        break;
      case Experiment::kRepair:
        ts = &s.repair.t_start_s, horizon = &s.repair.horizon_s;
        emax = &s.repair.emax_j, pmax = &s.repair.pmax_w;
        break;
    }
    if (f.ts) *ts = *f.ts;
    if (f.horizon) *horizon = *f.horizon;
    if (f.emax) *emax = *f.emax;
    if (f.pmax) *pmax = *f.pmax;
  }
  georelay::validate_scenario(s);
  return s;
}

// Write to a temporary file, then rename, so readers never see a partial file.
void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string csv_text(const georelay::CsvTable& t) {
  std::ostringstream os;
  georelay::write_csv(os, t);
  return os.str();
}

std::string gnuplot_script(const std::string& stem) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key outside\n"
     << "set xlabel 'time [s]'\n"
     << "set ylabel 'power [W]'\n"
     << "set terminal pngcairo size 1000,600\n"
     << "set output '" << stem << "_profiles.png'\n"
     << "plot for [n=1:5] '" << stem << "_profiles.csv' "
     << "using ((strcol(3) eq 'opt' && strcol(4) eq sprintf('%d', n)) ? $6 : 1/0):8 "
     << "with steps title sprintf('LEOS %d', n)\n";
  return os.str();
}

void write_outputs(const Flags& f, const std::string& stem, const georelay::ExperimentOutput& r,
                   const nlohmann::ordered_json& manifest) {
  const fs::path dir(f.out);
  fs::create_directories(dir);
  write_atomic(dir / (stem + ".csv"), csv_text(r.summary));
  write_atomic(dir / (stem + "_profiles.csv"), csv_text(r.profiles));
  write_atomic(dir / (stem + "_manifest.json"), manifest.dump(2) + "\n");
  if (f.gnuplot) write_atomic(dir / (stem + ".gp"), gnuplot_script(stem));
}

nlohmann::ordered_json manifest_for(const std::string& command, const georelay::Scenario& s, const Flags& f,
                                    const georelay::ExperimentOutput& r) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["seed"] = s.solver.seed;
  m["oracle"] = f.oracle;
  m["status"] = r.invariant_failed ? "invariant_failed" : r.infeasible ? "infeasible" : "ok";
  if (r.infeasible) m["infeasible_message"] = r.infeasible_message;
  if (r.invariant_failed) m["invariant_message"] = r.invariant_message;
  m["scenario"] = nlohmann::ordered_json::parse(georelay::to_json(s));
  return m;
}

int exit_code(const georelay::ExperimentOutput& r) {
  if (r.invariant_failed) {
    std::cerr << "invariant failure: " << r.invariant_message << "\n";
    return kExitInvariant;
  }
  if (r.infeasible) {
    std::cerr << "infeasible: " << r.infeasible_message << "\n";
    return kExitInfeasible;
  }
  return 0;
}

void print_summary(const georelay::ExperimentOutput& r) {
  for (const auto& row : r.summary.rows) {
    if (row[3] != "all") continue;
    std::cout << row[0] << " t_s=" << row[1] << " " << row[2] << ": mu=[" << row[4] << "] energy_j=" << row[5]
              << " horizon_s=" << row[7] << " status=" << row.back() << "\n";
  }
}

int run_single(Experiment e, const Flags& f) {
  const georelay::Scenario s = resolve(f, e);
  georelay::ExperimentOptions opt;
  opt.oracle = f.oracle;
  const georelay::ExperimentOutput r = georelay::run_experiment(e, s, opt);
  const std::string stem = georelay::experiment_name(e);
  nlohmann::ordered_json m = manifest_for(stem, s, f, r);
  write_outputs(f, stem, r, m);
  print_summary(r);
  return exit_code(r);
}

int run_sweep_cmd(const Flags& f, const SweepFlags& sw) {
  if (sw.param != "ts") throw georelay::ConfigError("sweep: only --param ts is supported");
  const auto e = georelay::parse_experiment(sw.experiment);
  if (!e) throw georelay::ConfigError("sweep: unknown experiment " + sw.experiment);
  const georelay::Scenario s = resolve(f, e);
  georelay::ExperimentOptions opt;
  opt.oracle = f.oracle;
  const georelay::ExperimentOutput r = georelay::run_sweep(*e, s, sw.from, sw.to, sw.step, opt);
  const std::string stem = std::string("sweep_") + georelay::experiment_name(*e);
  nlohmann::ordered_json m = manifest_for("sweep", s, f, r);
  m["sweep"] = {{"experiment", sw.experiment}, {"param", sw.param}, {"from", sw.from}, {"to", sw.to}, {"step", sw.step}};
  write_outputs(f, stem, r, m);
  print_summary(r);
  return exit_code(r);
}

int run_code_check_cmd(const Flags& f) {
  const georelay::Scenario s = resolve(f, std::nullopt);
  const georelay::CodeCheckReport rep = georelay::run_code_check(s);
  for (const auto& line : rep.lines) std::cout << line << "\n";
  const fs::path dir(f.out);
  fs::create_directories(dir);
  write_atomic(dir / "code-check.csv", csv_text(rep.table));
  nlohmann::ordered_json m;
  m["command"] = "code-check";
  m["seed"] = s.solver.seed;
  m["status"] = rep.ok ? "ok" : "invariant_failed";
  m["scenario"] = nlohmann::ordered_json::parse(georelay::to_json(s));
  write_atomic(dir / "code-check_manifest.json", m.dump(2) + "\n");
  std::cout << (rep.ok ? "rank checks pass" : "rank checks FAIL") << "\n";
  return rep.ok ? 0 : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy- and time-optimal relaying of coded files through a LEO constellation"};
  app.require_subcommand(1);
  Flags flags;
  SweepFlags sweep;

  const Experiment experiments[] = {Experiment::kDownlinkEnergy, Experiment::kDownlinkTime, Experiment::kUplinkEnergy,
                                    Experiment::kUplinkTime, Experiment::kRepair};
  std::optional<Experiment> chosen;
  for (Experiment e : experiments) {
    CLI::App* cmd = app.add_subcommand(georelay::experiment_name(e), "Run the " + std::string(georelay::experiment_name(e)) + " experiment");
    add_common(cmd, flags);
    cmd->callback([&chosen, e] { chosen = e; });
  }
  CLI::App* check = app.add_subcommand("code-check", "Check code parameters and rank conditions");
  add_common(check, flags);
  CLI::App* sw = app.add_subcommand("sweep", "Run an experiment over a range of start times");
  add_common(sw, flags);
  sw->add_option("--param", sweep.param, "Swept parameter (ts)");
  sw->add_option("--from", sweep.from, "First value");
  sw->add_option("--to", sweep.to, "Last value (inclusive)");
  sw->add_option("--step", sweep.step, "Step");
  sw->add_option("--experiment", sweep.experiment, "Experiment to sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  try {
    if (chosen) return run_single(*chosen, flags);
    if (check->parsed()) return run_code_check_cmd(flags);
    return run_sweep_cmd(flags, sweep);
  } catch (const georelay::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const georelay::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
