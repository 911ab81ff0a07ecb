#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "georelay/link.hpp"

namespace georelay {

struct WaterfillResult {
  PowerProfile profile;
  /// Multiplier lambda of the bit constraint; interior cells carry lambda/ln2 - 1/g.
  double water_level = 0.0;
  std::vector<std::size_t> saturated_cells;
  std::vector<std::size_t> zero_cells;
  double energy_j = 0.0;
  double delivered_bits = 0.0;
  int outer_iterations = 0;
  /// max_k |clamp(lambda/ln2 - 1/g_k, 0, pmax) - P_k|.
  double kkt_residual = 0.0;
};

/// Minimum-energy profile delivering `target_bits` over the channel with
/// 0 <= P <= pmax. Throws InfeasibleTargetError if all-pmax falls short.
WaterfillResult constrained_waterfill(const Channel& channel, double target_bits, double pmax);

WaterfillResult constrained_waterfill(TimeWindow window, const DistanceFn& distance_fn, double gain,
                                      double target_bits, double bandwidth_hz, double pmax,
                                      double dt);

inline constexpr double kInfeasibleEnergy = std::numeric_limits<double>::infinity();

/// E(mu): waterfilling energy for mu files, or kInfeasibleEnergy.
double min_energy_for_files(const Channel& channel, int mu, double file_bits, double pmax);

double min_energy_for_files(TimeWindow window, const DistanceFn& distance_fn, double gain, int mu,
                            double file_bits, double bandwidth_hz, double pmax, double dt);

/// Power clamp(level - 1/g_k, 0, pmax) with level = lambda/ln2.
std::vector<double> profile_at_level(const Channel& channel, double level, double pmax);
double bits_at_level(const Channel& channel, double level, double pmax);
double energy_at_level(const Channel& channel, double level, double pmax);

/// Smallest level at which every cell is capped.
double saturation_level(const Channel& channel, double pmax);

}  // namespace georelay
