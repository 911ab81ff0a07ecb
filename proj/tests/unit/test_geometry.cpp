#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "georelay/geometry.hpp"
#include "oracles.hpp"

using namespace georelay;

TEST(Geometry, EntryTimesMatchRootOfRotationAngle) {
  const auto sc = ConstellationScenario::standard();
  const double expected[] = {199.869288174, 152.152066120, 102.894235064, 52.157419367, 0.0};
  for (std::size_t n = 0; n < sc.n_leos(); ++n) {
    const LeoOrbit& leo = sc.leo(n);
    const double radius = 6371e3 + leo.altitude_m;
    const double root = oracle::bisect_root(
        [&](double t) { return leo.velocity_mps * t / radius - leo.phase_offset_rad; }, -10.0, 1000.0);
    EXPECT_NEAR(coverage_entry_time(sc, n), root, 1e-9);
    EXPECT_NEAR(coverage_entry_time(sc, n), expected[n], 1e-6);
    EXPECT_NEAR(rotation_angle(sc, n, coverage_entry_time(sc, n)), sc.entry_boundary_angle_rad(), 1e-12);
  }
}

TEST(Geometry, DistanceMatchesCartesianLongDouble) {
  const auto sc = ConstellationScenario::standard(Geos::kGeos1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(-500.0, 5000.0);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = rng() % sc.n_leos();
    const double tt = t(rng);
    const long double phi = rotation_angle(sc, n, tt);
    const long double rg = sc.geos_radius_m();
    const long double rl = sc.leo_radius_m(n);
    const long double same = oracle::cartesian_distance(rg, 0.0L, rl, phi);
    const long double other = oracle::cartesian_distance(rg, 3.14159265358979323846264338327950288L, rl, phi);
    EXPECT_NEAR(geos_distance(sc, n, tt) / static_cast<double>(same), 1.0, 1e-13);
    EXPECT_NEAR(geos_distance(sc, n, tt, Geos::kGeos2) / static_cast<double>(other), 1.0, 1e-12);
  }
}

TEST(Geometry, InterLeosDistanceIsSymmetricChord) {
  const auto sc = ConstellationScenario::standard(Geos::kGeos2);
  for (double tt : {0.0, 123.4, 600.0, 1200.0}) {
    for (std::size_t m = 0; m < 5; ++m) {
      for (std::size_t n = 0; n < 5; ++n) {
        if (m == n) {
          EXPECT_THROW(inter_leos_distance(sc, m, n, tt), std::invalid_argument);
          continue;
        }
        const auto pm = leo_position(sc, m, tt);
        const auto pn = leo_position(sc, n, tt);
        const double ref = static_cast<double>(
            oracle::cartesian_distance(pm.radius_m, pm.angle_rad, pn.radius_m, pn.angle_rad));
        EXPECT_NEAR(inter_leos_distance(sc, m, n, tt) / ref, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(inter_leos_distance(sc, m, n, tt), inter_leos_distance(sc, n, m, tt));
        EXPECT_GE(inter_leos_distance(sc, m, n, tt), std::abs(pm.radius_m - pn.radius_m) * (1 - 1e-15));
      }
    }
  }
}

TEST(Geometry, DistanceMinimalWhenOverhead) {
  const auto sc = ConstellationScenario::standard();
  const std::size_t n = 4;  // zero phase offset
  const double t_overhead = -sc.entry_boundary_angle_rad() * sc.leo_radius_m(n) / sc.leo(n).velocity_mps;
  EXPECT_NEAR(geos_distance(sc, n, t_overhead), sc.geos_radius_m() - sc.leo_radius_m(n), 1e-6);
  EXPECT_GT(geos_distance(sc, n, t_overhead - 10), geos_distance(sc, n, t_overhead));
  EXPECT_GT(geos_distance(sc, n, t_overhead + 10), geos_distance(sc, n, t_overhead));
}

TEST(Geometry, ReferenceSwap) {
  const auto a = ConstellationScenario::standard(Geos::kGeos1);
  const auto b = a.with_reference(Geos::kGeos2);
  EXPECT_EQ(b.reference_geos(), Geos::kGeos2);
  EXPECT_DOUBLE_EQ(geos_distance(a, 2, 50.0, Geos::kGeos1), geos_distance(b, 2, 50.0, Geos::kGeos2));
}

TEST(Geometry, ValidationRejectsBadOrbits) {
  std::vector<LeoOrbit> two_refs = {{500e3, 7000, 0.0}, {600e3, 7000, 0.0}};
  EXPECT_THROW(ConstellationScenario(6371e3, 35786e3, 0.2, two_refs, -0.7), std::invalid_argument);
  std::vector<LeoOrbit> too_high = {{40000e3, 7000, 0.0}};
  EXPECT_THROW(ConstellationScenario(6371e3, 35786e3, 0.2, too_high, -0.7), std::invalid_argument);
  EXPECT_THROW(ConstellationScenario::standard().leo(5), std::out_of_range);
}

TEST(Geometry, KeplerianMismatch) {
  const auto sc = ConstellationScenario::standard();
  for (std::size_t n = 0; n < 5; ++n) {
    const double circular = std::sqrt(3.986004418e14 / sc.leo_radius_m(n));
    EXPECT_NEAR(keplerian_velocity_mismatch(sc, n), std::abs(sc.leo(n).velocity_mps / circular - 1.0), 1e-12);
    EXPECT_LT(keplerian_velocity_mismatch(sc, n), 0.1);
  }
}
