#pragma once

#include <optional>
#include <string>
#include <vector>

#include "georelay/csv.hpp"
#include "georelay/scenario.hpp"

namespace georelay {

enum class Experiment { kDownlinkEnergy, kDownlinkTime, kUplinkEnergy, kUplinkTime, kRepair };

std::optional<Experiment> parse_experiment(const std::string& name);
const char* experiment_name(Experiment e);

struct ExperimentOptions {
  /// Cross-check every OA solution against the DP oracle.
  bool oracle = false;
  /// Worker threads for sweeps; 0 reads GEORELAY_THREADS.
  int threads = 0;
};

struct ExperimentOutput {
  CsvTable summary;
  CsvTable profiles;
  /// The main method had no feasible solution.
  bool infeasible = false;
  std::string infeasible_message;
  /// An oracle or post-condition check failed.
  bool invariant_failed = false;
  std::string invariant_message;
};

std::vector<std::string> summary_header();
std::vector<std::string> profile_header();

/// Start time of the block an experiment reads.
double experiment_start_time(const Scenario& s, Experiment e);
void set_experiment_start_time(Scenario& s, Experiment e, double t_start_s);

ExperimentOutput run_experiment(Experiment e, const Scenario& s, const ExperimentOptions& options = {});

/// Runs the experiment for t_s = from, from + step, ..., <= to; rows follow the t_s order.
ExperimentOutput run_sweep(Experiment e, const Scenario& s, double from, double to, double step,
                           const ExperimentOptions& options = {});

struct CodeCheckReport {
  CsvTable table;
  std::vector<std::string> lines;
  bool ok = true;
};

CodeCheckReport run_code_check(const Scenario& s);

/// GEORELAY_THREADS if set and positive, else the hardware concurrency.
int thread_count_from_env();

}  // namespace georelay
