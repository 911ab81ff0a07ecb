#pragma once

#include <cstddef>
#include <vector>

namespace georelay {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

enum class Geos { kGeos1 = 1, kGeos2 = 2 };

struct LeoOrbit {
  double altitude_m = 0.0;
  double velocity_mps = 0.0;
  /// Angle behind the reference LEOS at t = 0.
  double phase_offset_rad = 0.0;
};

struct PolarPosition {
  double radius_m = 0.0;
  double angle_rad = 0.0;
};

// Coplanar two-GEOS / N-LEOS constellation. GEOS 1 sits at polar angle 0 and
// GEOS 2 at pi. Rotation angles are measured from the reference GEOS, i.e. the
// one whose coverage entry defines t = 0 for the stage being simulated.
class ConstellationScenario {
 public:
  ConstellationScenario(double earth_radius_m, double geos_altitude_m,
                        double geos_coverage_angle_rad, std::vector<LeoOrbit> leos,
                        double entry_boundary_angle_rad, Geos reference_geos = Geos::kGeos1);

  /// Two GEOSs at 35786 km, five LEOSs at 500..1300 km.
  static ConstellationScenario standard(Geos reference_geos = Geos::kGeos1);

  double earth_radius_m() const { return earth_radius_m_; }
  double geos_altitude_m() const { return geos_altitude_m_; }
  double geos_radius_m() const { return geos_radius_m_; }
  double geos_coverage_angle_rad() const { return geos_coverage_angle_rad_; }
  double entry_boundary_angle_rad() const { return entry_boundary_angle_rad_; }
  Geos reference_geos() const { return reference_geos_; }

  std::size_t n_leos() const { return leos_.size(); }
  const LeoOrbit& leo(std::size_t n) const;
  double leo_radius_m(std::size_t n) const;
  const std::vector<LeoOrbit>& leos() const { return leos_; }

  ConstellationScenario with_reference(Geos reference) const;

 private:
  double earth_radius_m_;
  double geos_altitude_m_;
  double geos_radius_m_;
  double geos_coverage_angle_rad_;
  std::vector<LeoOrbit> leos_;
  std::vector<double> leo_radii_m_;
  double entry_boundary_angle_rad_;
  Geos reference_geos_;
};

/// phi_n(t) = v_n t / R_n - phi_0n + entry boundary angle.
double rotation_angle(const ConstellationScenario& scenario, std::size_t n, double t);

PolarPosition leo_position(const ConstellationScenario& scenario, std::size_t n, double t);

/// Law-of-cosines range from LEOS n to `target`. Defaults to the reference GEOS.
double geos_distance(const ConstellationScenario& scenario, std::size_t n, double t);
double geos_distance(const ConstellationScenario& scenario, std::size_t n, double t, Geos target);

double inter_leos_distance(const ConstellationScenario& scenario, std::size_t m, std::size_t n,
                           double t);

/// Time at which LEOS n crosses the entry boundary angle.
double coverage_entry_time(const ConstellationScenario& scenario, std::size_t n);

/// Relative gap between the configured speed and the circular-orbit speed at
/// the LEOS radius. Used for warnings only.
double keplerian_velocity_mismatch(const ConstellationScenario& scenario, std::size_t n);

}  // namespace georelay
