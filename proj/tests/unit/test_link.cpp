#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "georelay/link.hpp"

using namespace georelay;

namespace {

LinkParams downlink_params() {
  LinkParams p;
  p.carrier_hz = 19.7e9;
  p.bandwidth_hz = 40e6;
  p.tx_gain_db = 40;
  p.rx_gain_db = 10;
  p.attenuation_db = 6;
  p.noise_level_db = -126.56;
  return p;
}

}  // namespace

TEST(Link, AggregateGainFormula) {
  LinkParams p = downlink_params();
  const double c = 299792458.0;
  const double expected = 1e4 * 1e1 * c * c * std::pow(10.0, -0.6) /
                          (std::pow(4 * std::numbers::pi * 19.7e9, 2) * std::pow(10.0, -12.656) * 40e6);
  EXPECT_NEAR(aggregate_gain(p) / expected, 1.0, 1e-12);
  p.calibration_db = 20.0;
  EXPECT_NEAR(aggregate_gain(p) / expected, 100.0, 1e-9);
}

TEST(Link, ValidateRejectsNonPositive) {
  LinkParams p = downlink_params();
  p.bandwidth_hz = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = downlink_params();
  p.carrier_hz = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_NO_THROW(downlink_params().validate());
}

TEST(Link, SnrAndRate) {
  EXPECT_DOUBLE_EQ(snr(2.0, 8.0, 2.0), 4.0);
  EXPECT_THROW(snr(1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(snr(1.0, 1.0, -3.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(rate(3.0, 10.0), 20.0);
  EXPECT_DOUBLE_EQ(rate(0.0, 10.0), 0.0);
}

TEST(Link, GridHasPartialLastCell) {
  TimeGrid g({10.0, 13.5}, 1.0);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.cell_width(3), 0.5);
  EXPECT_DOUBLE_EQ(g.cell_mid(3), 13.25);
  EXPECT_DOUBLE_EQ(g.cell_width(0), 1.0);
  double total = 0;
  for (std::size_t k = 0; k < g.size(); ++k) total += g.cell_width(k);
  EXPECT_NEAR(total, 3.5, 1e-12);
}

TEST(Link, GridWithoutSliverCell) {
  TimeGrid g({0.0, 0.3}, 0.1);  // 0.3 / 0.1 is 2.9999999999999996
  EXPECT_EQ(g.size(), 3u);
  TimeGrid empty({5.0, 5.0}, 1.0);
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_THROW(TimeGrid({0, 1}, 0.0), std::invalid_argument);
}

TEST(Link, ProfileEnergyAndBitsAgree) {
  const LinkParams p = downlink_params();
  const double L = aggregate_gain(p);
  auto dist = [](double t) { return 3.6e7 + 1e3 * t; };
  const TimeGrid grid({0.0, 7.5}, 1.0);
  std::vector<double> power;
  for (std::size_t k = 0; k < grid.size(); ++k) power.push_back(1.0 + static_cast<double>(k));
  const PowerProfile prof(grid, power);
  EXPECT_NEAR(prof.energy(), 1 + 2 + 3 + 4 + 5 + 6 + 7 + 0.5 * 8, 1e-12);
  EXPECT_DOUBLE_EQ(prof.max_value(), 8.0);

  const Channel ch = Channel::sample({0.0, 7.5}, 1.0, L, p.bandwidth_hz, dist);
  EXPECT_NEAR(ch.bits(power) / delivered_bits(prof, p, dist), 1.0, 1e-12);
  EXPECT_NEAR(ch.energy(power), prof.energy(), 1e-12);
  double manual = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    manual += grid.cell_width(k) * p.bandwidth_hz * std::log2(1 + power[k] * L / std::pow(dist(grid.cell_mid(k)), 2));
  }
  EXPECT_NEAR(ch.bits(power) / manual, 1.0, 1e-12);
  EXPECT_NEAR(ch.max_bits(8.0) / ch.bits(std::vector<double>(grid.size(), 8.0)), 1.0, 1e-15);
}

TEST(Link, ProfileSizeMismatchThrows) {
  EXPECT_THROW(PowerProfile(TimeGrid({0, 3}, 1.0), {1.0}), std::invalid_argument);
  EXPECT_THROW(Channel(TimeGrid({0, 3}, 1.0), 1e6, {1.0}), std::invalid_argument);
}
