#include "georelay/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace georelay {
namespace {

constexpr double kEarthGravitationalParameter = 3.986004418e14;  // m^3/s^2

void require(bool ok, const char* what) {
  if (!ok) {
    throw std::invalid_argument(what);
  }
}

}  // namespace

ConstellationScenario::ConstellationScenario(double earth_radius_m, double geos_altitude_m,
                                             double geos_coverage_angle_rad,
                                             std::vector<LeoOrbit> leos,
                                             double entry_boundary_angle_rad, Geos reference_geos)
    : earth_radius_m_(earth_radius_m),
      geos_altitude_m_(geos_altitude_m),
      geos_radius_m_(earth_radius_m + geos_altitude_m),
      geos_coverage_angle_rad_(geos_coverage_angle_rad),
      leos_(std::move(leos)),
      entry_boundary_angle_rad_(entry_boundary_angle_rad),
      reference_geos_(reference_geos) {
  require(earth_radius_m_ > 0.0, "earth radius must be positive");
  require(geos_altitude_m_ > 0.0, "GEOS altitude must be positive");
  require(!leos_.empty(), "at least one LEOS is required");
  int reference_count = 0;
  leo_radii_m_.reserve(leos_.size());
  for (const LeoOrbit& leo : leos_) {
    require(leo.altitude_m > 0.0, "LEOS altitude must be positive");
    require(leo.altitude_m < geos_altitude_m_, "LEOS altitude must be below the GEOS altitude");
    require(leo.velocity_mps > 0.0, "LEOS velocity must be positive");
    require(leo.phase_offset_rad >= 0.0, "phase offsets are non-negative angles");
    if (leo.phase_offset_rad == 0.0) {
      ++reference_count;
    }
    leo_radii_m_.push_back(earth_radius_m_ + leo.altitude_m);
  }
  require(reference_count == 1, "exactly one LEOS must have a zero phase offset");
}

ConstellationScenario ConstellationScenario::standard(Geos reference_geos) {
  std::vector<LeoOrbit> leos;
  const double altitudes_km[] = {500, 700, 900, 1100, 1300};
  const double velocities_kmps[] = {7.2, 7.3, 7.4, 7.5, 7.6};
  const double offsets_deg[] = {12, 9, 6, 3, 0};
  for (int i = 0; i < 5; ++i) {
    leos.push_back({altitudes_km[i] * 1e3, velocities_kmps[i] * 1e3, deg_to_rad(offsets_deg[i])});
  }
  return ConstellationScenario(6371e3, 35786e3, deg_to_rad(12.0), std::move(leos),
                               deg_to_rad(-41.06), reference_geos);
}

const LeoOrbit& ConstellationScenario::leo(std::size_t n) const {
  if (n >= leos_.size()) {
    throw std::out_of_range("LEOS index " + std::to_string(n) + " out of range");
  }
  return leos_[n];
}

double ConstellationScenario::leo_radius_m(std::size_t n) const {
  if (n >= leos_.size()) {
    throw std::out_of_range("LEOS index " + std::to_string(n) + " out of range");
  }
  return leo_radii_m_[n];
}

ConstellationScenario ConstellationScenario::with_reference(Geos reference) const {
  ConstellationScenario copy = *this;
  copy.reference_geos_ = reference;
  return copy;
}

double rotation_angle(const ConstellationScenario& scenario, std::size_t n, double t) {
  const LeoOrbit& leo = scenario.leo(n);
  return leo.velocity_mps * t / scenario.leo_radius_m(n) - leo.phase_offset_rad +
         scenario.entry_boundary_angle_rad();
}

PolarPosition leo_position(const ConstellationScenario& scenario, std::size_t n, double t) {
  return {scenario.leo_radius_m(n), rotation_angle(scenario, n, t)};
}

double geos_distance(const ConstellationScenario& scenario, std::size_t n, double t) {
  return geos_distance(scenario, n, t, scenario.reference_geos());
}

double geos_distance(const ConstellationScenario& scenario, std::size_t n, double t, Geos target) {
  const double phi = rotation_angle(scenario, n, t);
  const double phi_eff = target == scenario.reference_geos() ? phi : kPi - phi;
  const double rg = scenario.geos_radius_m();
  const double rl = scenario.leo_radius_m(n);
  // (rg - rl)^2 + 2 rg rl (1 - cos) keeps precision near phi_eff = 0.
  const double half = std::sin(0.5 * phi_eff);
  const double d2 = (rg - rl) * (rg - rl) + 4.0 * rg * rl * half * half;
  return std::sqrt(d2);
}

double inter_leos_distance(const ConstellationScenario& scenario, std::size_t m, std::size_t n,
                           double t) {
  if (m == n) {
    throw std::invalid_argument("inter-LEOS distance needs two distinct LEOSs");
  }
  const double rm = scenario.leo_radius_m(m);
  const double rn = scenario.leo_radius_m(n);
  const double half = std::sin(0.5 * (rotation_angle(scenario, m, t) - rotation_angle(scenario, n, t)));
  return std::sqrt((rm - rn) * (rm - rn) + 4.0 * rm * rn * half * half);
}

double coverage_entry_time(const ConstellationScenario& scenario, std::size_t n) {
  const LeoOrbit& leo = scenario.leo(n);
  return leo.phase_offset_rad * scenario.leo_radius_m(n) / leo.velocity_mps;
}

double keplerian_velocity_mismatch(const ConstellationScenario& scenario, std::size_t n) {
  const double circular = std::sqrt(kEarthGravitationalParameter / scenario.leo_radius_m(n));
  return std::abs(scenario.leo(n).velocity_mps - circular) / circular;
}

}  // namespace georelay
