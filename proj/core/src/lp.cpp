#include "georelay/lp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace georelay::lp {

std::size_t LinearProgram::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  for (auto& r : rows) r.coeffs.push_back(0.0);
  return objective.size() - 1;
}

void LinearProgram::add_row(std::vector<double> coeffs, Sense sense, double rhs) {
  if (coeffs.size() != n_vars()) throw std::invalid_argument("row length does not match variable count");
  rows.push_back(Row{std::move(coeffs), sense, rhs});
}

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kLimit: return "limit";
  }
  return "unknown";
}

namespace {

// Dense bounded-variable tableau simplex. Columns: structurals, one slack per
// row, then artificials. Every row reads a x + s (+ art) = b after scaling.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& opt) : opt_(opt), n_(lp.n_vars()), m_(lp.rows.size()) {
    validate(lp);
    std::vector<double> scale(m_, 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double big = 0.0;
      for (double a : lp.rows[i].coeffs) big = std::max(big, std::abs(a));
      if (big > 0.0) scale[i] = 1.0 / big;
    }

    lo_ = lp.lower;
    hi_ = lp.upper;
    for (std::size_t i = 0; i < m_; ++i) {
      switch (lp.rows[i].sense) {
        case Sense::kLessEqual: lo_.push_back(0.0); hi_.push_back(kInf); break;
        case Sense::kGreaterEqual: lo_.push_back(-kInf); hi_.push_back(0.0); break;
        case Sense::kEqual: lo_.push_back(0.0); hi_.push_back(0.0); break;
      }
    }
    x_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) x_[j] = initial_value(lo_[j], hi_[j]);

    // Decide which rows need an artificial.
    std::vector<double> resid(m_);
    std::vector<int> art_sign(m_, 0);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      double r = lp.rows[i].rhs * scale[i];
      for (std::size_t j = 0; j < n_; ++j) r -= lp.rows[i].coeffs[j] * scale[i] * x_[j];
      resid[i] = r;
      const std::size_t s = n_ + i;
      if (r >= lo_[s] - opt_.feasibility_tol && r <= hi_[s] + opt_.feasibility_tol) continue;
      const double sb = std::clamp(r, lo_[s], hi_[s]);
      x_[s] = sb;
      art_sign[i] = r - sb > 0.0 ? 1 : -1;
      ++n_art;
    }
    nt_ = n_ + m_ + n_art;
    art_begin_ = n_ + m_;
    lo_.resize(nt_, 0.0);
    hi_.resize(nt_, kInf);
    x_.resize(nt_, 0.0);
    t_.assign(m_ * nt_, 0.0);
    beta_.assign(m_, 0.0);
    basis_.assign(m_, 0);
    row_of_.assign(nt_, -1);

    std::size_t a = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = art_sign[i] == 0 ? 1.0 : static_cast<double>(art_sign[i]);
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * lp.rows[i].coeffs[j] * scale[i];
      at(i, n_ + i) = sign;
      std::size_t b = n_ + i;
      if (art_sign[i] != 0) {
        b = a++;
        at(i, b) = 1.0;
        beta_[i] = std::abs(resid[i] - x_[n_ + i]);
      } else {
        beta_[i] = resid[i];
      }
      basis_[i] = b;
      row_of_[b] = static_cast<long>(i);
    }
  }

  Status run() {
    if (art_begin_ < nt_) {
      std::vector<double> c1(nt_, 0.0);
      for (std::size_t j = art_begin_; j < nt_; ++j) c1[j] = 1.0;
      set_costs(c1);
      const Status s = iterate();
      if (s == Status::kLimit) return s;
      double infeas = 0.0;
      for (std::size_t j = art_begin_; j < nt_; ++j) infeas += value(j);
      if (infeas > 1e-7) return Status::kInfeasible;
      for (std::size_t j = art_begin_; j < nt_; ++j) {
        hi_[j] = 0.0;
        if (row_of_[j] < 0) x_[j] = 0.0;
      }
      drive_out_artificials();
    }
    std::vector<double> c2(nt_, 0.0);
    double cmax = 0.0;
    for (std::size_t j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(objective_[j]));
    for (std::size_t j = 0; j < n_; ++j) c2[j] = cmax > 0.0 ? objective_[j] / cmax : 0.0;
    set_costs(c2);
    bland_ = false;
    degenerate_ = 0;
    return iterate();
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = std::clamp(value(j), lo_[j], hi_[j]);
    return x;
  }

  int iterations() const { return iterations_; }
  void set_objective(const std::vector<double>& c) { objective_ = c; }

 private:
  static void validate(const LinearProgram& lp) {
    const std::size_t n = lp.n_vars();
    if (lp.lower.size() != n || lp.upper.size() != n) {
      throw std::invalid_argument("bound vectors do not match variable count");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) || lp.lower[j] > lp.upper[j]) {
        throw std::invalid_argument("variable bounds are inconsistent");
      }
    }
    for (const auto& r : lp.rows) {
      if (r.coeffs.size() != n) throw std::invalid_argument("row length does not match variable count");
      if (!std::isfinite(r.rhs)) throw std::invalid_argument("row right-hand side must be finite");
    }
  }

  static double initial_value(double lo, double hi) {
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
  }

  double& at(std::size_t i, std::size_t j) { return t_[i * nt_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * nt_ + j]; }

  double value(std::size_t j) const {
    return row_of_[j] >= 0 ? beta_[static_cast<std::size_t>(row_of_[j])] : x_[j];
  }

  void set_costs(const std::vector<double>& c) {
    d_ = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < nt_; ++j) d_[j] -= cb * at(i, j);
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  void pivot(std::size_t r, std::size_t j) {
    const double inv = 1.0 / at(r, j);
    double* row_r = &t_[r * nt_];
    for (std::size_t k = 0; k < nt_; ++k) row_r[k] *= inv;
    row_r[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row_i = &t_[i * nt_];
      const double f = row_i[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < nt_; ++k) row_i[k] -= f * row_r[k];
      row_i[j] = 0.0;
    }
    const double fd = d_[j];
    if (fd != 0.0) {
      for (std::size_t k = 0; k < nt_; ++k) d_[k] -= fd * row_r[k];
      d_[j] = 0.0;
    }
    row_of_[basis_[r]] = -1;
    basis_[r] = j;
    row_of_[j] = static_cast<long>(r);
  }

  // Returns the entering column and direction, or nt_ if optimal.
  std::pair<std::size_t, int> price() const {
    std::size_t best = nt_;
    int best_dir = 0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < nt_; ++j) {
      if (row_of_[j] >= 0 || lo_[j] == hi_[j]) continue;
      const double xj = x_[j];
      int dir = 0;
      if (d_[j] < -opt_.optimality_tol && xj < hi_[j]) {
        dir = 1;
      } else if (d_[j] > opt_.optimality_tol && xj > lo_[j]) {
        dir = -1;
      }
      if (dir == 0) continue;
      if (bland_) return {j, dir};
      const double score = std::abs(d_[j]);
      if (score > best_score) {
        best_score = score;
        best = j;
        best_dir = dir;
      }
    }
    return {best, best_dir};
  }

  Status iterate() {
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return Status::kLimit;
      const auto [j, dir] = price();
      if (j == nt_) return Status::kOptimal;
      ++iterations_;

      const double delta = opt_.feasibility_tol;
      double theta_max = kInf;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = dir * at(i, j);
        const std::size_t b = basis_[i];
        if (alpha > opt_.pivot_tol && std::isfinite(lo_[b])) {
          theta_max = std::min(theta_max, (beta_[i] - lo_[b] + delta) / alpha);
        } else if (alpha < -opt_.pivot_tol && std::isfinite(hi_[b])) {
          theta_max = std::min(theta_max, (hi_[b] - beta_[i] + delta) / -alpha);
        }
      }
      const double flip = hi_[j] - lo_[j];
      if (!std::isfinite(theta_max) && !std::isfinite(flip)) return Status::kUnbounded;

      std::size_t leave = m_;
      double theta = kInf;
      double best_alpha = 0.0;
      if (std::isfinite(theta_max)) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double alpha = dir * at(i, j);
          const std::size_t b = basis_[i];
          double ratio = kInf;
          if (alpha > opt_.pivot_tol && std::isfinite(lo_[b])) {
            ratio = (beta_[i] - lo_[b]) / alpha;
          } else if (alpha < -opt_.pivot_tol && std::isfinite(hi_[b])) {
            ratio = (hi_[b] - beta_[i]) / -alpha;
          } else {
            continue;
          }
          if (ratio > theta_max) continue;
          bool take;
          if (bland_) {
            take = leave == m_ || ratio < theta || (ratio == theta && b < basis_[leave]);
          } else {
            take = leave == m_ || std::abs(alpha) > best_alpha;
          }
          if (take) {
            leave = i;
            theta = ratio;
            best_alpha = std::abs(alpha);
          }
        }
        theta = std::max(theta, 0.0);
      }

      if (std::isfinite(flip) && (leave == m_ || flip <= theta)) {
        // Bound flip; the basis is unchanged.
        const double step = dir * flip;
        for (std::size_t i = 0; i < m_; ++i) beta_[i] -= step * at(i, j);
        x_[j] = dir > 0 ? hi_[j] : lo_[j];
        continue;
      }

      const double step = dir * theta;
      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= step * at(i, j);
      const std::size_t out = basis_[leave];
      const double alpha = dir * at(leave, j);
      x_[out] = alpha > 0.0 ? lo_[out] : hi_[out];
      const double entering_value = x_[j] + step;
      pivot(leave, j);
      beta_[leave] = entering_value;

      if (theta <= 1e-12) {
        if (++degenerate_ > opt_.degenerate_switch) bland_ = true;
      }
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < art_begin_) continue;
      std::size_t best = nt_;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (row_of_[j] >= 0) continue;
        if (std::abs(at(r, j)) > best_abs) {
          best_abs = std::abs(at(r, j));
          best = j;
        }
      }
      if (best == nt_) continue;  // redundant row
      // Near-degenerate pivot that moves the (tiny) artificial value to zero.
      const std::size_t out = basis_[r];
      const double step = beta_[r] / at(r, best);
      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= step * at(i, best);
      const double entering_value = x_[best] + step;
      x_[out] = 0.0;
      pivot(r, best);
      beta_[r] = entering_value;
    }
  }

  LpOptions opt_;
  std::size_t n_;
  std::size_t m_;
  std::size_t nt_ = 0;
  std::size_t art_begin_ = 0;
  std::vector<double> t_;
  std::vector<double> beta_;
  std::vector<double> x_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> d_;
  std::vector<double> objective_;
  std::vector<std::size_t> basis_;
  std::vector<long> row_of_;
  bool bland_ = false;
  int degenerate_ = 0;
  int iterations_ = 0;
};

double row_violation(const Row& r, const std::vector<double>& x) {
  double lhs = 0.0;
  double big = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    lhs += r.coeffs[j] * x[j];
    big = std::max(big, std::abs(r.coeffs[j]));
  }
  const double scale = big > 0.0 ? 1.0 / big : 1.0;
  const double diff = (lhs - r.rhs) * scale;
  switch (r.sense) {
    case Sense::kLessEqual: return std::max(0.0, diff);
    case Sense::kGreaterEqual: return std::max(0.0, -diff);
    case Sense::kEqual: return std::abs(diff);
  }
  return 0.0;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options) {
  Tableau tab(lp, options);
  tab.set_objective(lp.objective);
  LpResult result;
  result.status = tab.run();
  result.iterations = tab.iterations();
  if (result.status != Status::kOptimal) return result;
  result.x = tab.solution();
  for (std::size_t j = 0; j < lp.n_vars(); ++j) result.objective += lp.objective[j] * result.x[j];
  for (const auto& r : lp.rows) {
    result.max_row_violation = std::max(result.max_row_violation, row_violation(r, result.x));
  }
  return result;
}

MilpResult solve_milp(const MilpSpec& spec, const MilpOptions& options) {
  const LinearProgram& base = spec.lp;
  for (std::size_t v : spec.integer_vars) {
    if (v >= base.n_vars()) throw std::invalid_argument("integer variable index out of range");
    const double lo = base.lower[v];
    const double hi = base.upper[v];
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo != std::floor(lo) || hi != std::floor(hi)) {
      throw std::invalid_argument("integer variables need finite integer bounds");
    }
  }

  std::vector<std::size_t> int_vars = spec.integer_vars;
  std::sort(int_vars.begin(), int_vars.end());
  int_vars.erase(std::unique(int_vars.begin(), int_vars.end()), int_vars.end());

  struct Node {
    double bound;
    long id;
    std::vector<double> lower;
    std::vector<double> upper;
  };
  auto worse = [](const Node& a, const Node& b) {
    return std::tie(a.bound, a.id) > std::tie(b.bound, b.id);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  MilpResult result;
  long next_id = 0;
  open.push(Node{-kInf, next_id++, base.lower, base.upper});
  double incumbent = kInf;
  bool root = true;
  LinearProgram work = base;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - options.prune_tol * std::max(1.0, std::abs(incumbent))) continue;
    if (result.nodes >= options.max_nodes) {
      result.status = Status::kLimit;
      return result;
    }
    ++result.nodes;
    work.lower = node.lower;
    work.upper = node.upper;
    const LpResult relax = solve_lp(work, options.lp);
    if (root) {
      root = false;
      if (relax.status == Status::kUnbounded) {
        result.status = Status::kUnbounded;
        return result;
      }
      if (relax.status == Status::kOptimal) result.root_bound = relax.objective;
    }
    if (relax.status == Status::kLimit) {
      result.status = Status::kLimit;
      return result;
    }
    if (relax.status != Status::kOptimal) continue;
    if (relax.objective >= incumbent - options.prune_tol * std::max(1.0, std::abs(incumbent))) continue;

    // Most fractional variable; the lowest index wins ties.
    std::size_t branch = base.n_vars();
    double best_frac = options.integrality_tol;
    for (std::size_t v : int_vars) {
      const double f = std::abs(relax.x[v] - std::round(relax.x[v]));
      if (f > best_frac) {
        best_frac = f;
        branch = v;
      }
    }
    if (branch == base.n_vars()) {
      std::vector<double> x = relax.x;
      for (std::size_t v : int_vars) x[v] = std::round(x[v]);
      double obj = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) obj += base.objective[j] * x[j];
      if (obj < incumbent) {
        incumbent = obj;
        result.x = std::move(x);
        result.objective = obj;
        result.status = Status::kOptimal;
      }
      continue;
    }
    const double xv = relax.x[branch];
    Node down{relax.objective, next_id++, node.lower, node.upper};
    down.upper[branch] = std::floor(xv);
    Node up{relax.objective, next_id++, std::move(node.lower), std::move(node.upper)};
    up.lower[branch] = std::ceil(xv);
    open.push(std::move(down));
    open.push(std::move(up));
  }
  return result;
}

}  // namespace georelay::lp
