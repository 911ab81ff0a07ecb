#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "georelay/errors.hpp"
#include "georelay/scenario.hpp"
#include "georelay/uplink.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace georelay;
using testsupport::rel_diff;

namespace {

FileAllocationProblem random_problem(std::mt19937_64& rng, int n_nodes = 4) {
  FileAllocationProblem p;
  double pmax = 0;
  double cap_bits = 0;
  for (int i = 0; i < n_nodes; ++i) {
    p.channels.push_back(testsupport::random_channel(rng, &pmax));
  }
  p.pmax_w = 50.0;
  for (const auto& ch : p.channels) cap_bits += ch.max_bits(p.pmax_w);
  p.cap = 3 + static_cast<int>(rng() % 6);
  p.file_bits = cap_bits / (n_nodes * (p.cap + 2.0));
  const int limit = std::accumulate(p.channels.begin(), p.channels.end(), 0, [&](int acc, const Channel& ch) {
    return acc + std::min(p.cap, static_cast<int>(std::floor(ch.max_bits(p.pmax_w) / p.file_bits)));
  });
  p.n_files = std::max(1, static_cast<int>(limit * (0.3 + 0.6 * (rng() % 1000) / 1000.0)));
  return p;
}

}  // namespace

TEST(Uplink, OaMatchesDpOnRandomProblems) {
  std::mt19937_64 rng(808);
  int nontrivial = 0;
  int max_iter = 0;
  for (int i = 0; i < 40; ++i) {
    const FileAllocationProblem p = random_problem(rng, 3 + static_cast<int>(rng() % 3));
    const OAResult oa = oa_min_energy(p);
    const DpResult dp = dp_oracle(p);
    EXPECT_LT(rel_diff(oa.allocation.total_energy_j, dp.energy_j), 1e-6) << "instance " << i;
    EXPECT_EQ(std::accumulate(oa.mu.begin(), oa.mu.end(), 0), p.n_files);
    for (const auto& it : oa.state.log) {
      EXPECT_LE(it.z_lower, dp.energy_j * (1 + 1e-9)) << "instance " << i << " iteration " << it.iteration;
      EXPECT_GE(it.z_upper, dp.energy_j * (1 - 1e-9)) << "instance " << i << " iteration " << it.iteration;
    }
    EXPECT_LE(oa.relaxation.energy_j, dp.energy_j * (1 + 1e-9));
    if (oa.iterations > 0) ++nontrivial;
    max_iter = std::max(max_iter, oa.iterations);
  }
  EXPECT_GT(nontrivial, 10);
  EXPECT_LE(max_iter, 50);
}

TEST(Uplink, DpMatchesBruteForce) {
  std::mt19937_64 rng(909);
  for (int i = 0; i < 30; ++i) {
    const FileAllocationProblem p = random_problem(rng, 4);
    const DpResult dp = dp_oracle(p);
    const auto ref = oracle::brute_force_split(dp.energy_table, p.n_files);
    ASSERT_TRUE(ref.has_value());
    EXPECT_LT(rel_diff(dp.energy_j, ref->energy), 1e-12);
    EXPECT_EQ(dp.mu, ref->mu);
    for (std::size_t n = 0; n < p.channels.size(); ++n) {
      for (int k = 0; k < static_cast<int>(dp.energy_table[n].size()); ++k) {
        EXPECT_EQ(dp.energy_table[n][static_cast<std::size_t>(k)],
                  min_energy_for_files(p.channels[n], k, p.file_bits, p.pmax_w));
      }
    }
  }
}

TEST(Uplink, DpTieBreakIsLexicographic) {
  const std::vector<std::vector<double>> table = {{0, 1, 3}, {0, 1, 3}, {0, 1, 3}};
  const DpResult r = dp_over_table(table, 2);
  EXPECT_EQ(r.mu, (std::vector<int>{0, 1, 1}));
  EXPECT_DOUBLE_EQ(r.energy_j, 2.0);
  const auto inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(dp_over_table({{0, inf}, {0, inf}}, 3), InfeasibleError);
}

TEST(Uplink, NlprIsLowerBoundWithCommonMarginal) {
  std::mt19937_64 rng(111);
  for (int i = 0; i < 10; ++i) {
    const FileAllocationProblem p = random_problem(rng, 4);
    const NlprResult r = solve_nlpr(p);
    EXPECT_NEAR(std::accumulate(r.mu.begin(), r.mu.end(), 0.0), p.n_files, 1e-6);
    const auto limits = p.file_limits();
    for (std::size_t n = 0; n < r.mu.size(); ++n) {
      EXPECT_GE(r.mu[n], -1e-9);
      EXPECT_LE(r.mu[n], limits[n] + 1e-9);
    }
    EXPECT_LE(r.energy_j, dp_oracle(p).energy_j * (1 + 1e-9));
  }
}

TEST(Uplink, CutGradientMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  double pmax = 0;
  const Channel ch = testsupport::random_channel(rng, &pmax);
  std::vector<double> power(ch.size());
  for (auto& x : power) x = pmax * 0.3 * (1 + (rng() % 100) / 100.0);
  const std::vector<double> grad = cut_gradient(ch, power);
  const double W = ch.bandwidth_hz();
  for (std::size_t k = 0; k < ch.size(); k += 3) {
    const double h = 1e-4 * power[k];
    std::vector<double> up = power, down = power;
    up[k] += h;
    down[k] -= h;
    // f = mu u / W - sum w log2(1 + g P); the mu term cancels in the difference.
    const double fd = -(ch.bits(up) - ch.bits(down)) / W / (2 * h);
    EXPECT_NEAR(grad[k] / fd, 1.0, 1e-6);
  }
}

TEST(Uplink, MasterWithRelaxationCutsBracketsOptimum) {
  std::mt19937_64 rng(6);
  const FileAllocationProblem p = random_problem(rng, 3);
  OAState st;
  const NlprResult nlpr = solve_nlpr(p);
  std::vector<std::vector<double>> power;
  for (const auto& s : nlpr.solutions) power.emplace_back(s.profile.values().begin(), s.profile.values().end());
  st.points.push_back(OAPoint{power, nlpr.mu});
  const MasterResult m = solve_oa_master(p, st);
  EXPECT_EQ(std::accumulate(m.mu.begin(), m.mu.end(), 0), p.n_files);
  EXPECT_LE(m.value, dp_oracle(p).energy_j * (1 + 1e-9));
  EXPECT_GE(m.value, nlpr.energy_j * (1 - 1e-6));
}

TEST(Uplink, FixedMuBaselinesAreOrdered) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10; ++i) {
    const FileAllocationProblem p = random_problem(rng, 4);
    const DpResult dp = dp_oracle(p);
    const FixedMuResult fixed = solve_nlp_fixed_mu(p, dp.mu);
    EXPECT_LT(rel_diff(fixed.energy_j, dp.energy_j), 1e-12);
    const FixedMuResult flat = constant_power_fixed_mu(p, dp.mu);
    EXPECT_GE(flat.energy_j, fixed.energy_j * (1 - 1e-12));
  }
}

TEST(Uplink, InfeasibleFileCountThrows) {
  std::mt19937_64 rng(8);
  FileAllocationProblem p = random_problem(rng, 3);
  const auto limits = p.file_limits();
  p.n_files = std::accumulate(limits.begin(), limits.end(), 0) + 1;
  EXPECT_THROW(oa_min_energy(p), InfeasibleError);
  EXPECT_THROW(dp_oracle(p), InfeasibleError);
}

TEST(Uplink, DefaultEnergyMinMatchesDp) {
  Scenario s = parse_scenario("{}");
  for (double ts : {0.0, 133.0, 400.0}) {
    s.uplink.t_start_s = ts;
    const UplinkRequest req = build_uplink_request(s);
    const OAResult oa = oa_min_energy_uplink(req);
    const DpResult dp = dp_oracle(req);
    EXPECT_LT(rel_diff(oa.allocation.total_energy_j, dp.energy_j), 1e-6);
    EXPECT_EQ(oa.mu, dp.mu);
    EXPECT_LE(oa.iterations, 5);
  }
}

TEST(Uplink, FilesAtFullPowerIsStepFunction) {
  Scenario s = parse_scenario("{}");
  const UplinkRequest req = build_uplink_request(s);
  int prev = 0;
  for (double horizon = 0.0; horizon <= 600.0; horizon += 3.0) {
    const FileAllocationProblem p = uplink_problem(req, horizon);
    const int f = files_at_full_power(p);
    EXPECT_GE(f, prev);
    int manual = 0;
    for (const auto& ch : p.channels) {
      if (!ch.empty()) manual += std::min(10, static_cast<int>(std::floor(ch.max_bits(900.0) / 1.6e8)));
    }
    EXPECT_EQ(f, manual);
    prev = f;
  }
  EXPECT_EQ(prev, 50);
}

TEST(Uplink, TimeMinReturnsFileBoundary) {
  Scenario s = parse_scenario("{}");
  const UplinkRequest req = build_uplink_request(s);
  const FileTimeResult r = min_time_uplink(req);
  EXPECT_FALSE(r.budget_bound);
  EXPECT_EQ(r.t_star_s, r.t0_s);
  EXPECT_GE(files_at_full_power(uplink_problem(req, r.t0_s)), 30);
  EXPECT_LT(files_at_full_power(uplink_problem(req, r.t0_s - 1e-6)), 30);
  EXPECT_LE(r.solution.allocation.total_energy_j, req.emax_j);
}

TEST(Uplink, TimeMinBudgetBound) {
  Scenario s = parse_scenario("{}");
  UplinkRequest req = build_uplink_request(s);
  const FileTimeResult slack = min_time_uplink(req);
  req.emax_j = 0.8 * slack.e0_j;
  const FileTimeResult r = min_time_uplink(req);
  EXPECT_TRUE(r.budget_bound);
  EXPECT_GT(r.t_star_s, r.t0_s);
  EXPECT_LE(r.solution.allocation.total_energy_j, req.emax_j);
  EXPECT_LE((req.emax_j - r.solution.allocation.total_energy_j) / req.emax_j, 1e-3);
}
