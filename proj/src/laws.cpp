#include "cosmos/laws.hpp"

#include <numeric>
#include <sstream>

#include "cosmos/geometry.hpp"

namespace cosmos {

InsufficientParticles::InsufficientParticles(ParticleKind kind, std::int64_t needed, std::int64_t available)
    : std::runtime_error("insufficient " + std::string(name_of(kind)) + " particles: need " +
                         std::to_string(needed) + ", have " + std::to_string(available)),
      kind_(kind) {}

TriangleLedger particle_ledger(ParticleKind kind, std::int64_t count) {
  TriangleLedger ledger;
  ledger[species_of(kind)] = count * elementary_triangle_count(kind);
  return ledger;
}

TriangleLedger bound_ledger(const ParticleInventory& inventory) {
  TriangleLedger ledger;
  for (auto kind : kAllKinds) ledger += particle_ledger(kind, inventory[kind]);
  return ledger;
}

std::int64_t half_equilateral_load(const ParticleInventory& side) {
  return bound_ledger(side).half_equilateral;
}

bool is_balanced(const Reaction& reaction) {
  return bound_ledger(reaction.consumed) == bound_ledger(reaction.produced);
}

bool is_canonical(const Reaction& reaction) {
  for (auto kind : kAllKinds)
    if (reaction.consumed[kind] != 0 && reaction.produced[kind] != 0) return false;
  return true;
}

ParticleInventory apply_reaction(const ParticleInventory& inventory, const Reaction& reaction,
                                 std::int64_t multiplicity) {
  if (multiplicity < 1) throw std::invalid_argument("multiplicity must be positive");
  if (!is_balanced(reaction)) throw UnbalancedReaction();
  ParticleInventory out = inventory;
  for (auto kind : kAllKinds) {
    const std::int64_t need = reaction.consumed[kind] * multiplicity;
    if (inventory[kind] < need) throw InsufficientParticles(kind, need, inventory[kind]);
    out[kind] += (reaction.produced[kind] - reaction.consumed[kind]) * multiplicity;
  }
  return out;
}

ShatterResult shatter(const ParticleInventory& inventory, ParticleKind kind, std::int64_t count) {
  if (count < 0) throw std::invalid_argument("shatter count must be non-negative");
  if (inventory[kind] < count) throw InsufficientParticles(kind, count, inventory[kind]);
  ShatterResult result{inventory, particle_ledger(kind, count)};
  result.inventory[kind] -= count;
  return result;
}

ReassembleResult reassemble(const TriangleLedger& pool, ParticleKind target) {
  const auto species = species_of(target);
  const std::int64_t budget = elementary_triangle_count(target);
  ReassembleResult result{pool[species] / budget, pool};
  result.remainder[species] = pool[species] % budget;
  return result;
}

std::vector<Reaction> enumerate_balanced_reactions(int max_coefficient) {
  if (max_coefficient < 1) throw std::invalid_argument("max_coefficient must be at least 1");
  constexpr std::array<ParticleKind, 3> kinds = {ParticleKind::Fire, ParticleKind::Air,
                                                 ParticleKind::Water};
  std::vector<Reaction> out;
  const int m = max_coefficient;
  for (int f = 0; f <= m; ++f) {
    for (int a = 0; a <= m; ++a) {
      for (int w = 0; w <= m; ++w) {
        const auto consumed = ParticleInventory::of(f, a, w, 0);
        if (consumed.empty()) continue;
        const std::int64_t load = half_equilateral_load(consumed);
        // Product kinds must be disjoint from the consumed ones; fix the
        // fire and air outputs and solve for water.
        const int f_hi = f == 0 ? m : 0;
        const int a_hi = a == 0 ? m : 0;
        for (int fo = 0; fo <= f_hi; ++fo) {
          for (int ao = 0; ao <= a_hi; ++ao) {
            const std::int64_t rest = load - 24 * fo - 48 * ao;
            if (rest < 0 || rest % 120 != 0) continue;
            const std::int64_t wo = rest / 120;
            if (wo > m || (w != 0 && wo != 0)) continue;
            const auto produced = ParticleInventory::of(fo, ao, wo, 0);
            if (produced.empty()) continue;
            std::int64_t g = 0;
            for (auto k : kinds) g = std::gcd(g, std::gcd(consumed[k], produced[k]));
            if (g != 1) continue;
            out.push_back({consumed, produced});
          }
        }
      }
    }
  }
  // Loop order already yields lexicographic order of the six coefficients.
  return out;
}

std::string describe(const Reaction& reaction) {
  auto side = [](const ParticleInventory& inv) {
    std::ostringstream os;
    bool first = true;
    for (auto kind : kAllKinds) {
      if (inv[kind] == 0) continue;
      if (!first) os << " + ";
      os << inv[kind] << ' ' << name_of(kind);
      first = false;
    }
    return first ? std::string("nothing") : os.str();
  };
  return side(reaction.consumed) + " -> " + side(reaction.produced);
}

}  // namespace cosmos
