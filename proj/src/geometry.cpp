#include "cosmos/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cosmos {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Schläfli symbol {face_sides, faces_per_vertex} of each particle.
struct Schlafli {
  int p;
  int q;
};

constexpr Schlafli schlafli_of(ParticleKind kind) {
  switch (kind) {
    case ParticleKind::Fire: return {3, 3};
    case ParticleKind::Air: return {3, 4};
    case ParticleKind::Water: return {3, 5};
    case ParticleKind::Earth: return {4, 3};
  }
  return {0, 0};
}

FillVerdict fill_around(double angle, double tolerance) {
  int copies = static_cast<int>(std::floor(360.0 / angle));
  // One more copy may still close the turn when the quotient rounded down.
  if ((copies + 1) * angle <= 360.0 + tolerance) ++copies;
  const double residual = std::max(0.0, 360.0 - copies * angle);
  return {residual <= tolerance, copies, residual};
}

}  // namespace

std::array<int, 3> triangle_angles(ElementaryTriangleKind kind) {
  if (kind == ElementaryTriangleKind::HalfEquilateral) return {30, 60, 90};
  return {45, 45, 90};
}

PolyhedronSpec polyhedron_spec(ParticleKind kind, double edge_length) {
  if (!(edge_length > 0.0) || !std::isfinite(edge_length))
    throw std::domain_error("edge length must be positive and finite");
  const auto [p, q] = schlafli_of(kind);
  const int vertices = kind == ParticleKind::Earth ? 8
                       : kind == ParticleKind::Fire ? 4
                       : kind == ParticleKind::Air  ? 6
                                                    : 12;
  PolyhedronSpec spec{};
  spec.kind = kind;
  spec.face_count = vertices * q / p;
  spec.face_shape = p == 4 ? FaceShape::Square : FaceShape::EquilateralTriangle;
  spec.triangles_per_face = p == 4 ? 4 : 6;
  spec.elementary_kind = species_of(kind);
  spec.edge_length = edge_length;
  spec.faces_per_vertex = q;
  spec.face_sides = p;
  return spec;
}

std::string_view solid_name(ParticleKind kind) {
  switch (kind) {
    case ParticleKind::Fire: return "tetrahedron";
    case ParticleKind::Air: return "octahedron";
    case ParticleKind::Water: return "icosahedron";
    case ParticleKind::Earth: return "cube";
  }
  return "?";
}

int elementary_triangle_count(ParticleKind kind) { return polyhedron_spec(kind).total_triangles(); }

FillVerdict planar_vertex_fill(ExactDegrees angle, ExactDegrees tolerance) {
  if (angle <= 0 || angle >= 360)
    throw std::domain_error("planar angle must lie in (0, 360) degrees");
  if (tolerance < 0) throw std::domain_error("tolerance must be non-negative");
  const ExactDegrees turns = ExactDegrees(360) / angle;
  const auto copies = turns.numerator() / turns.denominator();
  const ExactDegrees residual = ExactDegrees(360) - angle * copies;
  return {residual <= tolerance, static_cast<int>(copies), boost::rational_cast<double>(residual)};
}

FillVerdict planar_vertex_fill(double angle, double tolerance) {
  if (!(angle > 0.0 && angle < 360.0))
    throw std::domain_error("planar angle must lie in (0, 360) degrees");
  if (!(tolerance >= 0.0)) throw std::domain_error("tolerance must be non-negative");
  return fill_around(angle, tolerance);
}

double dihedral_angle(ParticleKind kind) {
  if (kind == ParticleKind::Earth) return 90.0;
  // sin(theta / 2) = cos(pi / q) / sin(pi / p)
  const auto [p, q] = schlafli_of(kind);
  const double half = std::asin(std::cos(std::numbers::pi / q) / std::sin(std::numbers::pi / p));
  return 2.0 * half * kRadToDeg;
}

FillVerdict space_fill_check(ParticleKind kind, double tolerance) {
  if (!(tolerance >= 0.0)) throw std::domain_error("tolerance must be non-negative");
  return fill_around(dihedral_angle(kind), tolerance);
}

std::vector<PlatonicPair> enumerate_platonic_solids(int search_bound) {
  std::vector<PlatonicPair> found;
  for (int q = 3; q <= search_bound; ++q) {
    for (int p = 3; p <= search_bound; ++p) {
      // q * (180 - 360 / p) < 360, cleared of denominators.
      if (q * (p - 2) < 2 * p) found.push_back({q, p});
    }
  }
  return found;
}

double unit_volume(ParticleKind kind, double edge_length) {
  if (!(edge_length > 0.0) || !std::isfinite(edge_length))
    throw std::domain_error("edge length must be positive and finite");
  const double cube = edge_length * edge_length * edge_length;
  switch (kind) {
    case ParticleKind::Fire: return cube * std::numbers::sqrt2 / 12.0;
    case ParticleKind::Air: return cube * std::numbers::sqrt2 / 3.0;
    case ParticleKind::Water: return cube * 5.0 * (3.0 + std::sqrt(5.0)) / 12.0;
    case ParticleKind::Earth: return cube;
  }
  return 0.0;
}

double volume(const PolyhedronSpec& spec) { return unit_volume(spec.kind, spec.edge_length); }

}  // namespace cosmos
