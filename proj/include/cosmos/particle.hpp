#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace cosmos {

/// The four primary bodies. The numeric order is used as an array index
/// throughout the library.
enum class ParticleKind { Fire = 0, Air = 1, Water = 2, Earth = 3 };

inline constexpr std::array<ParticleKind, 4> kAllKinds = {
    ParticleKind::Fire, ParticleKind::Air, ParticleKind::Water, ParticleKind::Earth};

inline constexpr std::size_t kKindCount = kAllKinds.size();

constexpr std::size_t index_of(ParticleKind kind) { return static_cast<std::size_t>(kind); }

constexpr std::string_view name_of(ParticleKind kind) {
  switch (kind) {
    case ParticleKind::Fire: return "fire";
    case ParticleKind::Air: return "air";
    case ParticleKind::Water: return "water";
    case ParticleKind::Earth: return "earth";
  }
  return "?";
}

/// The two indivisible right triangles.
enum class ElementaryTriangleKind { HalfEquilateral, IsoscelesRight };

/// Fire, air and water are bounded by half-equilateral triangles; earth alone
/// by isosceles right ones.
constexpr ElementaryTriangleKind species_of(ParticleKind kind) {
  return kind == ParticleKind::Earth ? ElementaryTriangleKind::IsoscelesRight
                                     : ElementaryTriangleKind::HalfEquilateral;
}

}  // namespace cosmos
