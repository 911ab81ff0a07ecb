#include "georelay/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "georelay/errors.hpp"

namespace georelay {
namespace {

enum class CellState : unsigned char { kActive, kZero, kSaturated };

// Bisection fallback on the level; used only if the active-set loop lands in a
// floating-point corner (no active cells but the target is not met).
double bisect_level(const Channel& channel, double target_bits, double pmax) {
  double lo = 0.0;
  double hi = saturation_level(channel, pmax);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bits_at_level(channel, mid, pmax) >= target_bits) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

std::vector<double> profile_at_level(const Channel& channel, double level, double pmax) {
  std::vector<double> p(channel.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::clamp(level - 1.0 / channel.gain(k), 0.0, pmax);
  }
  return p;
}

double bits_at_level(const Channel& channel, double level, double pmax) {
  return channel.bits(profile_at_level(channel, level, pmax));
}

double energy_at_level(const Channel& channel, double level, double pmax) {
  return channel.energy(profile_at_level(channel, level, pmax));
}

double saturation_level(const Channel& channel, double pmax) {
  double level = 0.0;
  for (std::size_t k = 0; k < channel.size(); ++k) {
    level = std::max(level, pmax + 1.0 / channel.gain(k));
  }
  return level;
}

WaterfillResult constrained_waterfill(const Channel& channel, double target_bits, double pmax) {
  if (!(target_bits >= 0.0)) throw std::invalid_argument("bit target must be non-negative");
  if (!(pmax > 0.0)) throw std::invalid_argument("power cap must be positive");
  const std::size_t n = channel.size();

  WaterfillResult result;
  if (target_bits == 0.0) {
    result.profile = PowerProfile::zeros(channel.grid());
    for (std::size_t k = 0; k < n; ++k) result.zero_cells.push_back(k);
    return result;
  }
  const double max_bits = channel.max_bits(pmax);
  if (target_bits > max_bits) {
    std::ostringstream msg;
    msg << "bit target " << target_bits << " exceeds the " << max_bits
        << " bits deliverable at the power cap";
    throw InfeasibleTargetError(msg.str(), max_bits);
  }

  const double target_per_hz = target_bits / channel.bandwidth_hz();
  std::vector<double> log_gain(n);
  std::vector<double> sat_bits(n);
  for (std::size_t k = 0; k < n; ++k) {
    log_gain[k] = std::log2(channel.gain(k));
    sat_bits[k] = channel.weight(k) * std::log2(1.0 + channel.gain(k) * pmax);
  }

  std::vector<CellState> state(n, CellState::kActive);
  double level = 0.0;
  int outer = 0;
  bool degenerate = false;
  for (;; ++outer) {
    if (static_cast<std::size_t>(outer) > n + 1) {
      throw InvariantError("waterfilling active-set loop did not terminate");
    }
    for (auto& s : state) {
      if (s == CellState::kZero) s = CellState::kActive;
    }
    // Inner loop: grow the zero set until no active cell would be negative.
    for (;;) {
      double rhs = target_per_hz;
      double active_weight = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (state[k] == CellState::kSaturated) {
          rhs -= sat_bits[k];
        } else if (state[k] == CellState::kActive) {
          rhs -= channel.weight(k) * log_gain[k];
          active_weight += channel.weight(k);
        }
      }
      if (!(active_weight > 0.0)) {
        degenerate = true;
        break;
      }
      level = std::exp2(rhs / active_weight);
      bool grew = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (state[k] == CellState::kActive && level - 1.0 / channel.gain(k) <= 0.0) {
          state[k] = CellState::kZero;
          grew = true;
        }
      }
      if (!grew) break;
    }
    if (degenerate) break;
    bool capped = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (state[k] == CellState::kActive && level - 1.0 / channel.gain(k) >= pmax) {
        state[k] = CellState::kSaturated;
        capped = true;
      }
    }
    if (!capped) break;
  }

  std::vector<double> power(n);
  if (degenerate) {
    level = bisect_level(channel, target_bits, pmax);
    power = profile_at_level(channel, level, pmax);
    for (std::size_t k = 0; k < n; ++k) {
      state[k] = power[k] <= 0.0   ? CellState::kZero
                 : power[k] >= pmax ? CellState::kSaturated
                                    : CellState::kActive;
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      switch (state[k]) {
        case CellState::kZero: power[k] = 0.0; break;
        case CellState::kSaturated: power[k] = pmax; break;
        case CellState::kActive: power[k] = std::clamp(level - 1.0 / channel.gain(k), 0.0, pmax); break;
      }
    }
  }

  result.outer_iterations = outer + 1;
  result.water_level = level * std::numbers::ln2;
  for (std::size_t k = 0; k < n; ++k) {
    if (state[k] == CellState::kZero) {
      result.zero_cells.push_back(k);
    } else if (state[k] == CellState::kSaturated) {
      result.saturated_cells.push_back(k);
    }
    const double stationary = std::clamp(level - 1.0 / channel.gain(k), 0.0, pmax);
    result.kkt_residual = std::max(result.kkt_residual, std::abs(stationary - power[k]));
  }
  result.energy_j = channel.energy(power);
  result.delivered_bits = channel.bits(power);
  result.profile = PowerProfile(channel.grid(), std::move(power));
  return result;
}

WaterfillResult constrained_waterfill(TimeWindow window, const DistanceFn& distance_fn, double gain,
                                      double target_bits, double bandwidth_hz, double pmax,
                                      double dt) {
  return constrained_waterfill(Channel::sample(window, dt, gain, bandwidth_hz, distance_fn),
                               target_bits, pmax);
}

double min_energy_for_files(const Channel& channel, int mu, double file_bits, double pmax) {
  if (mu < 0) throw std::invalid_argument("file count must be non-negative");
  if (mu == 0) return 0.0;
  const double target = static_cast<double>(mu) * file_bits;
  if (target > channel.max_bits(pmax)) return kInfeasibleEnergy;
  return constrained_waterfill(channel, target, pmax).energy_j;
}

double min_energy_for_files(TimeWindow window, const DistanceFn& distance_fn, double gain, int mu,
                            double file_bits, double bandwidth_hz, double pmax, double dt) {
  return min_energy_for_files(Channel::sample(window, dt, gain, bandwidth_hz, distance_fn), mu,
                              file_bits, pmax);
}

}  // namespace georelay
