#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosmos/particle.hpp"

namespace cosmos {

/// Exact counts of elementary triangles, one tally per species.
struct TriangleLedger {
  std::int64_t half_equilateral = 0;
  std::int64_t isosceles_right = 0;

  std::int64_t& operator[](ElementaryTriangleKind species) {
    return species == ElementaryTriangleKind::HalfEquilateral ? half_equilateral : isosceles_right;
  }
  std::int64_t operator[](ElementaryTriangleKind species) const {
    return species == ElementaryTriangleKind::HalfEquilateral ? half_equilateral : isosceles_right;
  }
  bool empty() const { return half_equilateral == 0 && isosceles_right == 0; }

  TriangleLedger& operator+=(const TriangleLedger& o) {
    half_equilateral += o.half_equilateral;
    isosceles_right += o.isosceles_right;
    return *this;
  }
  friend TriangleLedger operator+(TriangleLedger a, const TriangleLedger& b) { return a += b; }
  friend TriangleLedger operator-(const TriangleLedger& a, const TriangleLedger& b) {
    return {a.half_equilateral - b.half_equilateral, a.isosceles_right - b.isosceles_right};
  }
  friend bool operator==(const TriangleLedger&, const TriangleLedger&) = default;
};

/// Particle counts per kind.
struct ParticleInventory {
  std::array<std::int64_t, kKindCount> counts{};

  static ParticleInventory of(std::int64_t fire, std::int64_t air, std::int64_t water, std::int64_t earth) {
    return ParticleInventory{{fire, air, water, earth}};
  }

  std::int64_t& operator[](ParticleKind k) { return counts[index_of(k)]; }
  std::int64_t operator[](ParticleKind k) const { return counts[index_of(k)]; }

  std::int64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  bool empty() const { return total() == 0; }

  friend bool operator==(const ParticleInventory&, const ParticleInventory&) = default;
};

/// Triangles locked inside the particles of an inventory.
TriangleLedger bound_ledger(const ParticleInventory& inventory);

/// Per-particle budget as a ledger (e.g. air -> 48 half-equilateral).
TriangleLedger particle_ledger(ParticleKind kind, std::int64_t count = 1);

/// consumed -> produced. Canonical reactions never list a kind on both sides.
struct Reaction {
  ParticleInventory consumed;
  ParticleInventory produced;
  friend bool operator==(const Reaction&, const Reaction&) = default;
};

class UnbalancedReaction : public std::invalid_argument {
 public:
  UnbalancedReaction() : std::invalid_argument("reaction does not conserve elementary triangles") {}
};

class InsufficientParticles : public std::runtime_error {
 public:
  InsufficientParticles(ParticleKind kind, std::int64_t needed, std::int64_t available);
  ParticleKind kind() const { return kind_; }

 private:
  ParticleKind kind_;
};

/// Both triangle species balance: 24 fire + 48 air + 120 water is unchanged
/// and earth in equals earth out.
bool is_balanced(const Reaction& reaction);

/// No kind has a nonzero count on both sides.
bool is_canonical(const Reaction& reaction);

/// inventory - m * consumed + m * produced.
ParticleInventory apply_reaction(const ParticleInventory& inventory, const Reaction& reaction,
                                 std::int64_t multiplicity = 1);

struct ShatterResult {
  ParticleInventory inventory;
  TriangleLedger freed;
};

/// Break `count` particles of `kind` into their elementary triangles.
ShatterResult shatter(const ParticleInventory& inventory, ParticleKind kind, std::int64_t count);

struct ReassembleResult {
  std::int64_t particles;
  TriangleLedger remainder;
};

/// Build as many `target` particles as the matching species in `pool`
/// allows. The other species is passed through untouched.
ReassembleResult reassemble(const TriangleLedger& pool, ParticleKind target);

/// Every canonical, primitive (coefficient gcd 1) reaction among fire, air
/// and water that balances half-equilateral triangles, with each coefficient
/// in [0, max_coefficient]. Sorted lexicographically by
/// (fire_in, air_in, water_in, fire_out, air_out, water_out).
std::vector<Reaction> enumerate_balanced_reactions(int max_coefficient);

/// Half-equilateral triangles on one side of a reaction.
std::int64_t half_equilateral_load(const ParticleInventory& side);

std::string describe(const Reaction& reaction);

}  // namespace cosmos
