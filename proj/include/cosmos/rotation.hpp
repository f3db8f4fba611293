#pragma once

#include <stdexcept>
#include <utility>

#include "cosmos/particle.hpp"

namespace cosmos {

/// Rigid rotation of the spherical universe about its polar axis.
struct RotationParams {
  double radius = 1.0;
  double period = 1.0;  // one day and night
  double pressure_gain = 1.0;
  bool earth_co_rotates = true;

  double omega() const;
  /// Throws std::invalid_argument unless radius, period and gain are positive.
  void validate() const;
};

/// Axisymmetric position: distance from the polar axis and height along it.
struct CylindricalPoint {
  double rho;
  double z;
};

class PointOutsideUniverse : public std::domain_error {
 public:
  PointOutsideUniverse(double rho, double z);
};

/// Cut points on normalized axis distance; bands run earth, water, air, fire
/// outward and are half-open on the right except the last.
struct RegionBands {
  double t1 = 0.25;
  double t2 = 0.50;
  double t3 = 0.75;

  void validate() const;
  /// [lo, hi) in normalized rho for `kind`; fire's band is closed at 1.
  std::pair<double, double> interval(ParticleKind kind) const;
};

double speed_at(const CylindricalPoint& point, const RotationParams& params);

/// pressure_gain * speed^2.
double pressure_at(const CylindricalPoint& point, const RotationParams& params);

ParticleKind region_of(const CylindricalPoint& point, const RotationParams& params, const RegionBands& bands);

/// Fire 4, air 3, water 2, earth 1.
int mobility_rank(ParticleKind kind);

}  // namespace cosmos
