#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "georelay/errors.hpp"
#include "georelay/repair.hpp"
#include "georelay/scenario.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace georelay;
using testsupport::rel_diff;

namespace {

RepairRequest default_request(double ts) {
  Scenario s = parse_scenario("{}");
  s.repair.t_start_s = ts;
  return build_repair_request(s);
}

}  // namespace

TEST(Repair, DefaultUsesAllFourSurvivors) {
  const RepairResult r = repair_min_energy(default_request(0.0));
  EXPECT_EQ(r.helpers, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(r.per_helper_files, 5);
  EXPECT_EQ(r.total_files, 20);
  EXPECT_EQ(r.subsets_evaluated, 1u);
  for (const auto& n : r.allocation.nodes) EXPECT_NEAR(n.bits / (5 * 1.6e8), 1.0, 1e-9);
}

TEST(Repair, HelperChannelsFollowInterLeosRange) {
  const RepairRequest req = default_request(100.0);
  const auto ch = helper_channels(req, 50.0);
  ASSERT_EQ(ch.size(), 4u);
  const double gain = aggregate_gain(req.links[0]);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(ch[i].grid().window().start_s, 100.0);
    EXPECT_DOUBLE_EQ(ch[i].grid().window().end_s, 150.0);
    const double d = inter_leos_distance(req.scenario, i, 4, ch[i].grid().cell_mid(7));
    EXPECT_NEAR(ch[i].gain(7) / (gain / (d * d)), 1.0, 1e-12);
  }
}

TEST(Repair, SubsetSearchMatchesBruteForce) {
  Scenario s = parse_scenario("{}");
  RepairRequest req = build_repair_request(s);
  req.params = RegenParams{12, 5, 2, 3, 6, 3, 1.6e8};
  ASSERT_TRUE(validate_params(req.params).ok);
  for (std::size_t failed = 0; failed < 5; ++failed) {
    for (double ts : {0.0, 250.0}) {
      req.failed_node = failed;
      req.t_start_s = ts;
      const RepairResult r = repair_min_energy(req);
      EXPECT_EQ(r.subsets_evaluated, 4u);
      const auto channels = helper_channels(req, req.horizon_s);
      const auto cand = helper_candidates(req);
      std::vector<double> cost;
      for (const auto& ch : channels) cost.push_back(min_energy_for_files(ch, 3, 1.6e8, req.pmax_w));
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> best_set;
      for (std::size_t skip = 4; skip-- > 0;) {  // subsets in lexicographic order: skip 3, 2, 1, 0
        double c = 0;
        std::vector<std::size_t> set;
        for (std::size_t i = 0; i < 4; ++i) {
          if (i == skip) continue;
          c += cost[i];
          set.push_back(cand[i]);
        }
        if (c < best) {
          best = c;
          best_set = set;
        }
      }
      EXPECT_EQ(r.helpers, best_set);
      EXPECT_LT(rel_diff(r.allocation.total_energy_j, best), 1e-12);

      // Alternate formulation: DP over per-helper files in {0, beta} summing to D beta.
      std::vector<std::vector<double>> table;
      const double inf = std::numeric_limits<double>::infinity();
      for (double c : cost) table.push_back({0.0, inf, inf, c});
      const auto dp = oracle::brute_force_split(table, 9);
      ASSERT_TRUE(dp.has_value());
      EXPECT_LT(rel_diff(dp->energy, best), 1e-12);
    }
  }
}

TEST(Repair, GreedyAgreesWhenCostsSeparable) {
  Scenario s = parse_scenario("{}");
  RepairRequest req = build_repair_request(s);
  req.params = RegenParams{12, 5, 2, 3, 6, 3, 1.6e8};
  const RepairResult full = repair_min_energy(req);
  req.greedy = true;
  const RepairResult greedy = repair_min_energy(req);
  EXPECT_EQ(greedy.helpers, full.helpers);
  EXPECT_EQ(greedy.subsets_evaluated, 1u);
}

TEST(Repair, MdsBaselineDownloadsAllFiles) {
  const MdsRepairResult r = mds_repair_baseline(default_request(0.0));
  EXPECT_EQ(r.total_files, 30);
  int sum = 0;
  for (int m : r.solution.mu) {
    EXPECT_LE(m, 10);
    sum += m;
  }
  EXPECT_EQ(sum, 30);
  const auto dp = dp_oracle(mds_repair_problem(default_request(0.0), 600.0));
  EXPECT_LT(rel_diff(r.solution.allocation.total_energy_j, dp.energy_j), 1e-6);
}

TEST(Repair, RegeneratingBeatsMds) {
  for (double ts = 0.0; ts <= 600.0; ts += 100.0) {
    const RepairRequest req = default_request(ts);
    EXPECT_LE(repair_min_energy(req).allocation.total_energy_j,
              mds_repair_baseline(req).solution.allocation.total_energy_j * (1 + 1e-9));
  }
}

TEST(Repair, TimeMinRespectsBudget) {
  for (double ts : {0.0, 300.0}) {
    const RepairRequest req = default_request(ts);
    const RepairTimeResult r = repair_min_time(req);
    EXPECT_TRUE(r.budget_bound);
    EXPECT_LE(r.repair.allocation.total_energy_j, req.emax_j);
    EXPECT_LE((req.emax_j - r.repair.allocation.total_energy_j) / req.emax_j, 1e-3);
    RepairRequest open = req;
    open.emax_j = kUnlimitedEnergy;
    const RepairTimeResult fast = repair_min_time(open);
    EXPECT_FALSE(fast.budget_bound);
    EXPECT_EQ(fast.t_star_s, fast.t0_s);
    EXPECT_NEAR(fast.t0_s, r.t0_s, 1e-9 * r.t0_s);
  }
}

TEST(Repair, RejectsTooFewHelpers) {
  RepairRequest req = default_request(0.0);
  req.params.per_helper_files = 2;  // alpha/beta = 5 needs 7 helpers
  EXPECT_THROW(repair_min_energy(req), InfeasibleError);
  req = default_request(0.0);
  req.failed_node = 7;
  EXPECT_THROW(repair_min_energy(req), std::out_of_range);
}
