#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace georelay::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Row {
  std::vector<double> coeffs;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// min c^T x subject to rows and lower <= x <= upper. Bounds may be infinite.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t n_vars() const { return objective.size(); }
  /// Adds a variable and returns its index.
  std::size_t add_variable(double cost, double lo, double hi);
  void add_row(std::vector<double> coeffs, Sense sense, double rhs);
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kLimit };

const char* to_string(Status status);

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  /// Degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_switch = 50;
  int max_iterations = 200000;
};

struct LpResult {
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
  double max_row_violation = 0.0;
};

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

struct MilpSpec {
  LinearProgram lp;
  std::vector<std::size_t> integer_vars;
};

struct MilpOptions {
  LpOptions lp;
  double integrality_tol = 1e-7;
  /// Relative gap under which a node cannot improve the incumbent.
  double prune_tol = 1e-12;
  int max_nodes = 200000;
};

struct MilpResult {
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  double root_bound = 0.0;
  int nodes = 0;
};

MilpResult solve_milp(const MilpSpec& spec, const MilpOptions& options = {});

}  // namespace georelay::lp
