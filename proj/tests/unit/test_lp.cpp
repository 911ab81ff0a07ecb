#include <gtest/gtest.h>

#include <random>

#include "georelay/lp.hpp"
#include "oracles.hpp"

using namespace georelay::lp;

namespace {

LinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> sense(0, 2);
  LinearProgram lp;
  for (std::size_t i = 0; i < n; ++i) lp.add_variable(coef(rng), -3.0 + (rng() % 3), 2.0 + (rng() % 4));
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<double> a(n);
    for (auto& v : a) v = coef(rng);
    const int s = sense(rng);
    lp.add_row(a, s == 0 ? Sense::kLessEqual : s == 1 ? Sense::kGreaterEqual : Sense::kEqual,
               static_cast<double>(coef(rng)));
  }
  return lp;
}

}  // namespace

TEST(Lp, RandomBoundedProgramsMatchVertexEnumeration) {
  std::mt19937_64 rng(31);
  int feasible = 0;
  for (int i = 0; i < 400; ++i) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t m = 1 + rng() % 4;
    const LinearProgram lp = random_lp(rng, n, m);
    const LpResult r = solve_lp(lp);
    const oracle::LpSolution ref = oracle::vertex_enumeration(lp);
    if (!ref.feasible) {
      EXPECT_EQ(r.status, Status::kInfeasible) << "instance " << i;
      continue;
    }
    ++feasible;
    ASSERT_EQ(r.status, Status::kOptimal) << "instance " << i;
    EXPECT_NEAR(r.objective, ref.objective, 1e-7 * std::max(1.0, std::abs(ref.objective))) << "instance " << i;
    EXPECT_LE(r.max_row_violation, 1e-7);
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_GE(r.x[j], lp.lower[j] - 1e-9);
      EXPECT_LE(r.x[j], lp.upper[j] + 1e-9);
    }
  }
  EXPECT_GT(feasible, 100);
}

TEST(Lp, DetectsUnbounded) {
  LinearProgram lp;
  lp.add_variable(-1.0, 0.0, kInf);
  lp.add_variable(0.0, 0.0, kInf);
  lp.add_row({1.0, -1.0}, Sense::kLessEqual, 1.0);
  EXPECT_EQ(solve_lp(lp).status, Status::kUnbounded);
}

TEST(Lp, DetectsInfeasible) {
  LinearProgram lp;
  lp.add_variable(1.0, 0.0, 1.0);
  lp.add_variable(1.0, 0.0, 1.0);
  lp.add_row({1.0, 1.0}, Sense::kGreaterEqual, 3.0);
  EXPECT_EQ(solve_lp(lp).status, Status::kInfeasible);
}

TEST(Lp, FreeVariablesAndEqualities) {
  LinearProgram lp;
  lp.add_variable(1.0, -kInf, kInf);
  lp.add_variable(2.0, -kInf, kInf);
  lp.add_row({1.0, 1.0}, Sense::kEqual, 4.0);
  lp.add_row({1.0, -1.0}, Sense::kEqual, 2.0);
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.x[0], 3.0, 1e-9);
  EXPECT_NEAR(r.x[1], 1.0, 1e-9);
  EXPECT_NEAR(r.objective, 5.0, 1e-9);
}

TEST(Lp, BealeCyclingExampleTerminates) {
  // Classic degenerate instance on which textbook Dantzig pivoting cycles.
  LinearProgram lp;
  for (double c : {-0.75, 150.0, -0.02, 6.0}) lp.add_variable(c, 0.0, kInf);
  lp.add_row({0.25, -60.0, -0.04, 9.0}, Sense::kLessEqual, 0.0);
  lp.add_row({0.5, -90.0, -0.02, 3.0}, Sense::kLessEqual, 0.0);
  lp.add_row({0.0, 0.0, 1.0, 0.0}, Sense::kLessEqual, 1.0);
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, -0.05, 1e-9);
}

TEST(Lp, KleeMintyCube) {
  const int n = 6;
  LinearProgram lp;
  for (int j = 0; j < n; ++j) lp.add_variable(-std::pow(2.0, n - 1 - j), 0.0, kInf);
  for (int i = 0; i < n; ++i) {
    std::vector<double> a(n, 0.0);
    for (int j = 0; j < i; ++j) a[j] = std::pow(2.0, i - j + 1);
    a[i] = 1.0;
    lp.add_row(a, Sense::kLessEqual, std::pow(5.0, i + 1));
  }
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, -std::pow(5.0, n), 1e-6);
}

TEST(Milp, RandomIntegerProgramsMatchBruteForce) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 150; ++i) {
    const std::size_t n = 2 + rng() % 3;
    MilpSpec spec;
    spec.lp = random_lp(rng, n, 1 + rng() % 3);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0 || rng() % 3 != 0) spec.integer_vars.push_back(j);
    }
    const MilpResult r = solve_milp(spec);
    const oracle::LpSolution ref = oracle::brute_force_milp(spec);
    if (!ref.feasible) {
      EXPECT_EQ(r.status, Status::kInfeasible) << "instance " << i;
      continue;
    }
    ASSERT_EQ(r.status, Status::kOptimal) << "instance " << i;
    EXPECT_NEAR(r.objective, ref.objective, 1e-7 * std::max(1.0, std::abs(ref.objective))) << "instance " << i;
    for (std::size_t v : spec.integer_vars) EXPECT_NEAR(r.x[v], std::round(r.x[v]), 1e-7);
    EXPECT_LE(r.root_bound, r.objective + 1e-9);
  }
}

TEST(Milp, Knapsack) {
  const double value[] = {10, 13, 7, 8, 4};
  const double weight[] = {5, 7, 4, 4, 2};
  MilpSpec spec;
  std::vector<double> row;
  for (int i = 0; i < 5; ++i) {
    spec.lp.add_variable(-value[i], 0.0, 1.0);
    spec.integer_vars.push_back(static_cast<std::size_t>(i));
    row.push_back(weight[i]);
  }
  spec.lp.add_row(row, Sense::kLessEqual, 13.0);
  const MilpResult r = solve_milp(spec);
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, -25.0, 1e-9);  // items 0, 2, 3
}

TEST(Milp, StatusNames) {
  EXPECT_STREQ(to_string(Status::kOptimal), "optimal");
  EXPECT_STREQ(to_string(Status::kInfeasible), "infeasible");
}
