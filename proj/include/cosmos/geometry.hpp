#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "cosmos/particle.hpp"

namespace cosmos {

/// Exact angle in degrees. Planar angle sums are decided on these so that
/// rounding can never flip a verdict.
using ExactDegrees = boost::rational<std::int64_t>;

/// Interior angles of an elementary triangle, in whole degrees.
std::array<int, 3> triangle_angles(ElementaryTriangleKind kind);

enum class FaceShape { EquilateralTriangle, Square };

struct PolyhedronSpec {
  ParticleKind kind;
  int face_count;
  FaceShape face_shape;
  int triangles_per_face;
  ElementaryTriangleKind elementary_kind;
  double edge_length;

  /// Faces meeting at a vertex / sides per face.
  int faces_per_vertex;
  int face_sides;

  int total_triangles() const { return face_count * triangles_per_face; }
};

/// Tetrahedron (fire), octahedron (air), icosahedron (water), cube (earth).
/// Throws std::domain_error for a non-positive edge.
PolyhedronSpec polyhedron_spec(ParticleKind kind, double edge_length = 1.0);

std::string_view solid_name(ParticleKind kind);

/// Elementary triangles in one particle: 24, 48, 120 and 24.
int elementary_triangle_count(ParticleKind kind);

struct VertexFigure {
  double polygon_angle;
  int copies;
};

/// Outcome of packing copies of an angle around a point (planar) or an edge
/// (spatial). `residual_angle` is the uncovered part of the full turn.
struct FillVerdict {
  bool feasible;
  int copies_used;
  double residual_angle;
};

/// Largest number of copies of `angle` that fit in 360 degrees.
/// Requires 0 < angle < 360, otherwise std::domain_error.
FillVerdict planar_vertex_fill(ExactDegrees angle, ExactDegrees tolerance = 0);
FillVerdict planar_vertex_fill(double angle, double tolerance);

/// Interior dihedral angle in degrees.
double dihedral_angle(ParticleKind kind);

/// Local space-filling test: copies of the dihedral angle around a shared
/// edge. Only the edge condition is checked, not a global tiling.
FillVerdict space_fill_check(ParticleKind kind, double tolerance);

/// Schläfli pair of a regular polyhedron.
struct PlatonicPair {
  int faces_per_vertex;
  int face_sides;
  friend bool operator==(const PlatonicPair&, const PlatonicPair&) = default;
  friend auto operator<=>(const PlatonicPair&, const PlatonicPair&) = default;
};

/// All (q, p) with 3 <= p, q <= search_bound whose vertex angle sum stays
/// strictly below 360 degrees, sorted. Five entries for any bound >= 5.
std::vector<PlatonicPair> enumerate_platonic_solids(int search_bound = 10);

/// Volume of the particle polyhedron with the given edge length.
double unit_volume(ParticleKind kind, double edge_length = 1.0);
double volume(const PolyhedronSpec& spec);

}  // namespace cosmos
