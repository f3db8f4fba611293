#include "cosmos/rotation.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cosmos {

namespace {

void check_inside(const CylindricalPoint& p, const RotationParams& params) {
  const double r2 = params.radius * params.radius;
  if (!(p.rho >= 0.0) || !std::isfinite(p.z) || p.rho * p.rho + p.z * p.z > r2 * (1.0 + 1e-12))
    throw PointOutsideUniverse(p.rho, p.z);
}

}  // namespace

PointOutsideUniverse::PointOutsideUniverse(double rho, double z)
    : std::domain_error("point (rho=" + std::to_string(rho) + ", z=" + std::to_string(z) +
                        ") lies outside the universe") {}

double RotationParams::omega() const { return 2.0 * std::numbers::pi / period; }

void RotationParams::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be positive");
  if (!(period > 0.0) || !std::isfinite(period)) throw std::invalid_argument("period must be positive");
  if (!(pressure_gain > 0.0) || !std::isfinite(pressure_gain))
    throw std::invalid_argument("pressure_gain must be positive");
}

void RegionBands::validate() const {
  if (!(0.0 < t1 && t1 < t2 && t2 < t3 && t3 < 1.0))
    throw std::invalid_argument("band thresholds must satisfy 0 < t1 < t2 < t3 < 1");
}

std::pair<double, double> RegionBands::interval(ParticleKind kind) const {
  switch (kind) {
    case ParticleKind::Earth: return {0.0, t1};
    case ParticleKind::Water: return {t1, t2};
    case ParticleKind::Air: return {t2, t3};
    case ParticleKind::Fire: return {t3, 1.0};
  }
  return {0.0, 0.0};
}

double speed_at(const CylindricalPoint& point, const RotationParams& params) {
  check_inside(point, params);
  return params.omega() * point.rho;
}

double pressure_at(const CylindricalPoint& point, const RotationParams& params) {
  const double v = speed_at(point, params);
  return params.pressure_gain * v * v;
}

ParticleKind region_of(const CylindricalPoint& point, const RotationParams& params, const RegionBands& bands) {
  check_inside(point, params);
  const double x = point.rho / params.radius;
  if (x < bands.t1) return ParticleKind::Earth;
  if (x < bands.t2) return ParticleKind::Water;
  if (x < bands.t3) return ParticleKind::Air;
  return ParticleKind::Fire;
}

int mobility_rank(ParticleKind kind) {
  switch (kind) {
    case ParticleKind::Fire: return 4;
    case ParticleKind::Air: return 3;
    case ParticleKind::Water: return 2;
    case ParticleKind::Earth: return 1;
  }
  return 0;
}

}  // namespace cosmos
