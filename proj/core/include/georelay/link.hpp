#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace georelay {

inline constexpr double kSpeedOfLight = 299792458.0;

/// RF constants of one transmitter/receiver pair. Decibel fields are converted
/// to linear scale by aggregate_gain().
struct LinkParams {
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  double tx_gain_db = 0.0;
  double rx_gain_db = 0.0;
  double attenuation_db = 0.0;
  /// Enters the gain constant as 10^(N0/10) * W.
  double noise_level_db = 0.0;
  /// Extra gain folded into the aggregate constant; 0 keeps the textbook formula.
  double calibration_db = 0.0;
  double light_speed_mps = kSpeedOfLight;

  void validate() const;
};

/// L = G_T G_R c^2 10^(-A/10) / ((4 pi f)^2 N0 W), times the calibration gain.
double aggregate_gain(const LinkParams& params);

/// Gamma = P L / d^2.
double snr(double power_w, double gain, double distance_m);

/// Shannon rate W log2(1 + snr).
double rate(double snr, double bandwidth_hz);

struct TimeWindow {
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const { return end_s > start_s ? end_s - start_s : 0.0; }
  bool empty() const { return !(end_s > start_s); }
};

/// Uniform cells of width dt covering a window; the last cell may be partial.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(TimeWindow window, double dt);

  const TimeWindow& window() const { return window_; }
  double dt() const { return dt_; }
  std::size_t size() const { return count_; }
  double cell_start(std::size_t k) const { return window_.start_s + static_cast<double>(k) * dt_; }
  double cell_width(std::size_t k) const;
  double cell_mid(std::size_t k) const { return cell_start(k) + 0.5 * cell_width(k); }

 private:
  TimeWindow window_{};
  double dt_ = 1.0;
  std::size_t count_ = 0;
};

/// Transmit power sampled on a TimeGrid, one value per cell.
class PowerProfile {
 public:
  PowerProfile() = default;
  PowerProfile(TimeGrid grid, std::vector<double> values);
  static PowerProfile zeros(TimeGrid grid);
  static PowerProfile constant(TimeGrid grid, double power_w);

  const TimeGrid& grid() const { return grid_; }
  const TimeWindow& window() const { return grid_.window(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Sum of power times cell width.
  double energy() const;
  double max_value() const;

 private:
  TimeGrid grid_{};
  std::vector<double> values_;
};

using DistanceFn = std::function<double(double)>;

/// Midpoint-rule integral of the Shannon rate over the profile's window.
double delivered_bits(const PowerProfile& profile, const LinkParams& params,
                      const DistanceFn& distance_fn);

// A link sampled on a grid: per-cell weight (seconds) and SNR per watt
// L / d^2(t_k). Every optimizer in the library works on this form.
class Channel {
 public:
  Channel() = default;
  Channel(TimeGrid grid, double bandwidth_hz, std::vector<double> gain_per_watt);

  static Channel sample(TimeWindow window, double dt, double aggregate_gain, double bandwidth_hz,
                        const DistanceFn& distance_fn);

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return gains_.size(); }
  bool empty() const { return gains_.empty(); }
  double bandwidth_hz() const { return bandwidth_hz_; }
  double weight(std::size_t k) const { return grid_.cell_width(k); }
  double gain(std::size_t k) const { return gains_[k]; }
  std::span<const double> gains() const { return gains_; }

  double bits(std::span<const double> power) const;
  double energy(std::span<const double> power) const;
  /// Bits delivered with every cell at `pmax`.
  double max_bits(double pmax) const;

 private:
  TimeGrid grid_{};
  double bandwidth_hz_ = 0.0;
  std::vector<double> gains_;
};

}  // namespace georelay
