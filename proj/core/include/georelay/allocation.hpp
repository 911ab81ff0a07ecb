#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "georelay/link.hpp"
#include "georelay/waterfill.hpp"

namespace georelay {

struct NodeAllocation {
  std::size_t node = 0;
  TimeWindow window;
  PowerProfile profile;
  double energy_j = 0.0;
  double bits = 0.0;
  /// Bit target divided by the file size.
  double files = 0.0;
  double water_level = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct Diagnostics {
  int iterations = 0;
  double z_lower = std::numeric_limits<double>::quiet_NaN();
  double z_upper = std::numeric_limits<double>::quiet_NaN();
  double kkt_residual_max = 0.0;
};

struct AllocationResult {
  std::vector<NodeAllocation> nodes;
  /// Integer file counts when the problem allocates files; empty otherwise.
  std::vector<int> mu;
  double total_energy_j = 0.0;
  double horizon_s = 0.0;
  Diagnostics diagnostics;

  /// Recomputes total_energy_j and kkt_residual_max from the nodes.
  void finalize();
};

NodeAllocation make_node_allocation(std::size_t node, const Channel& channel,
                                    const WaterfillResult& solution, double file_bits);

}  // namespace georelay
