#include "georelay/link.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "georelay/geometry.hpp"

namespace georelay {
namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void LinkParams::validate() const {
  if (!(carrier_hz > 0.0)) {
    throw std::invalid_argument("carrier frequency must be positive");
  }
  if (!(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("bandwidth must be positive");
  }
  if (!(light_speed_mps > 0.0)) {
    throw std::invalid_argument("speed of light must be positive");
  }
}

double aggregate_gain(const LinkParams& params) {
  params.validate();
  const double four_pi_f = 4.0 * kPi * params.carrier_hz;
  const double numerator = db_to_linear(params.tx_gain_db + params.rx_gain_db -
                                        params.attenuation_db + params.calibration_db) *
                           params.light_speed_mps * params.light_speed_mps;
  return numerator / (four_pi_f * four_pi_f * db_to_linear(params.noise_level_db) *
                      params.bandwidth_hz);
}

double snr(double power_w, double gain, double distance_m) {
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("distance must be positive");
  }
  if (power_w < 0.0) {
    throw std::invalid_argument("power must be non-negative");
  }
  return power_w * gain / (distance_m * distance_m);
}

double rate(double snr, double bandwidth_hz) {
  if (snr < 0.0) {
    throw std::invalid_argument("snr must be non-negative");
  }
  return bandwidth_hz * std::log2(1.0 + snr);
}

TimeGrid::TimeGrid(TimeWindow window, double dt) : window_(window), dt_(dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("grid step must be positive");
  }
  if (window.empty()) {
    count_ = 0;
    return;
  }
  const double cells = window.length() / dt;
  // A window that is an exact multiple of dt up to rounding gets no sliver cell.
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) <= 1e-9 * std::max(1.0, cells)) {
    count_ = static_cast<std::size_t>(rounded);
  } else {
    count_ = static_cast<std::size_t>(std::ceil(cells));
  }
}

double TimeGrid::cell_width(std::size_t k) const {
  if (k + 1 < count_) {
    return dt_;
  }
  return std::max(0.0, window_.end_s - cell_start(k));
}

PowerProfile::PowerProfile(TimeGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("profile length does not match its grid");
  }
}

PowerProfile PowerProfile::zeros(TimeGrid grid) {
  const std::size_t n = grid.size();
  return PowerProfile(std::move(grid), std::vector<double>(n, 0.0));
}

PowerProfile PowerProfile::constant(TimeGrid grid, double power_w) {
  const std::size_t n = grid.size();
  return PowerProfile(std::move(grid), std::vector<double>(n, power_w));
}

double PowerProfile::energy() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    sum += values_[k] * grid_.cell_width(k);
  }
  return sum;
}

double PowerProfile::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double delivered_bits(const PowerProfile& profile, const LinkParams& params,
                      const DistanceFn& distance_fn) {
  const double gain = aggregate_gain(params);
  const TimeGrid& grid = profile.grid();
  double bits = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = distance_fn(grid.cell_mid(k));
    bits += grid.cell_width(k) * rate(snr(profile[k], gain, d), params.bandwidth_hz);
  }
  return bits;
}

Channel::Channel(TimeGrid grid, double bandwidth_hz, std::vector<double> gain_per_watt)
    : grid_(std::move(grid)), bandwidth_hz_(bandwidth_hz), gains_(std::move(gain_per_watt)) {
  if (gains_.size() != grid_.size()) {
    throw std::invalid_argument("channel gains do not match the grid");
  }
  if (!(bandwidth_hz_ > 0.0)) {
    throw std::invalid_argument("bandwidth must be positive");
  }
}

Channel Channel::sample(TimeWindow window, double dt, double aggregate_gain, double bandwidth_hz,
                        const DistanceFn& distance_fn) {
  TimeGrid grid(window, dt);
  std::vector<double> gains(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = distance_fn(grid.cell_mid(k));
    gains[k] = aggregate_gain / (d * d);
  }
  return Channel(std::move(grid), bandwidth_hz, std::move(gains));
}

double Channel::bits(std::span<const double> power) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < gains_.size(); ++k) {
    sum += weight(k) * std::log2(1.0 + power[k] * gains_[k]);
  }
  return bandwidth_hz_ * sum;
}

double Channel::energy(std::span<const double> power) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < gains_.size(); ++k) {
    sum += weight(k) * power[k];
  }
  return sum;
}

double Channel::max_bits(double pmax) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < gains_.size(); ++k) {
    sum += weight(k) * std::log2(1.0 + pmax * gains_[k]);
  }
  return bandwidth_hz_ * sum;
}

}  // namespace georelay
