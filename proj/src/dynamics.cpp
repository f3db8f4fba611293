#include "cosmos/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

#include "cosmos/geometry.hpp"

namespace cosmos {

namespace {

// Relative slop on capacity comparisons; volumes are sums of a few products.
constexpr double kCapacitySlop = 1e-9;

// How far the fixpoint looks for a particle to fill a void.
constexpr int kMaxRefillHops = 8;

// splitmix64: one independent stream per (seed, step, phase, cell) so that
// results never depend on how cells are spread over threads.
struct Stream {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do r = next(); while (r >= limit);
    return r % n;
  }
};

enum class Phase : std::uint64_t { Init = 1, Drift = 2 };

Stream stream_for(std::uint64_t seed, std::int64_t step, Phase phase, std::uint64_t cell) {
  Stream s{seed};
  s.state ^= Stream{static_cast<std::uint64_t>(step) * 4 + static_cast<std::uint64_t>(phase)}.next();
  s.state ^= Stream{cell + 0x51ed270b27ULL}.next() * 3;
  s.next();
  return s;
}

template <typename T>
void shuffle(std::vector<T>& items, Stream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

// Runs fn(i) for i in [0, n). Each call must touch only state owned by i.
template <typename Fn>
void for_each_cell(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) fn(i);
    });
  }
}

double band_distance(ParticleKind kind, double x, const RegionBands& bands) {
  const auto [lo, hi] = bands.interval(kind);
  if (x < lo) return lo - x;
  if (kind != ParticleKind::Fire && x >= hi) return x - hi + std::numeric_limits<double>::min();
  return 0.0;
}

// Most numerous kind among `candidates`; ties go to the kind whose band is
// nearest the cell, then to the lower index.
template <std::size_t N>
ParticleKind majority_of(const ParticleInventory& pop, const std::array<ParticleKind, N>& candidates, double x,
                         const RegionBands& bands) {
  ParticleKind best = candidates[0];
  for (std::size_t i = 1; i < N; ++i) {
    const auto k = candidates[i];
    if (pop[k] > pop[best] ||
        (pop[k] == pop[best] && band_distance(k, x, bands) < band_distance(best, x, bands)))
      best = k;
  }
  return best;
}

constexpr std::array<ParticleKind, 3> kHalfEquilateralKinds = {ParticleKind::Fire, ParticleKind::Air,
                                                                ParticleKind::Water};

ParticleKind majority(const CosmosGrid& grid, int c, const RegionBands& bands) {
  return majority_of(grid.cell(c).population, kAllKinds, grid.site(c).normalized_rho, bands);
}

ParticleKind majority_half_equilateral(const CosmosGrid& grid, int c, const RegionBands& bands) {
  return majority_of(grid.cell(c).population, kHalfEquilateralKinds, grid.site(c).normalized_rho, bands);
}

bool fits(const CosmosGrid& grid, int c, double volume) {
  return volume <= grid.slack(c) + kCapacitySlop * grid.cell(c).capacity;
}

bool overfull(const CosmosGrid& grid, int c) {
  return grid.slack(c) < -kCapacitySlop * grid.cell(c).capacity;
}

bool in_deficit(const CosmosGrid& grid, int c, double tolerance) {
  return grid.slack_fraction(c) > tolerance + kCapacitySlop;
}

// Neighbor one step toward the band of `kind`, or -1 when already there or
// blocked by the sphere. Outward moves that leave the sphere step toward the
// equator instead, where the next column is reachable.
int desired_move(const CosmosGrid& grid, int c, ParticleKind kind, const RegionBands& bands) {
  const Cell& cell = grid.cell(c);
  const double x = grid.site(c).normalized_rho;
  const auto [lo, hi] = bands.interval(kind);
  if (x < lo) {
    const int out = grid.index_at(cell.rho_index + 1, cell.z_index);
    if (out >= 0) return out;
    const int half = grid.n_z() / 2;
    const int j = cell.z_index < half ? cell.z_index + 1 : cell.z_index - 1;
    if (2 * cell.z_index + 1 == grid.n_z()) return -1;
    return grid.index_at(cell.rho_index, j);
  }
  if (kind != ParticleKind::Fire && x >= hi) return grid.index_at(cell.rho_index - 1, cell.z_index);
  return -1;
}

void move_particle(CosmosGrid& grid, int from, int to, ParticleKind kind) {
  grid.cell(from).population[kind] -= 1;
  grid.cell(to).population[kind] += 1;
}

// Forms particles from a cell's pool while they fit: the majority kind
// first, then smaller kinds of the same species. Returns particles formed.
std::int64_t cascade_pool(CosmosGrid& grid, int c, const RegionBands& bands) {
  Cell& cell = grid.cell(c);
  std::int64_t formed = 0;
  auto form = [&](ParticleKind kind) {
    const std::int64_t budget = elementary_triangle_count(kind);
    const double v = grid.particle_volume(kind);
    while (cell.free_pool[species_of(kind)] >= budget && fits(grid, c, v)) {
      cell.free_pool[species_of(kind)] -= budget;
      cell.population[kind] += 1;
      ++formed;
    }
  };
  const ParticleKind head = majority_half_equilateral(grid, c, bands);
  form(head);
  for (auto kind : {ParticleKind::Water, ParticleKind::Air, ParticleKind::Fire})
    if (elementary_triangle_count(kind) < elementary_triangle_count(head)) form(kind);
  form(ParticleKind::Earth);
  return formed;
}

// Volume the cell's pool would occupy if rebuilt as the smallest particle of
// each species. Drift leaves this much room free.
double latent_volume(const CosmosGrid& grid, int c) {
  const TriangleLedger& pool = grid.cell(c).free_pool;
  return static_cast<double>(pool.half_equilateral / elementary_triangle_count(ParticleKind::Fire)) *
             grid.particle_volume(ParticleKind::Fire) +
         static_cast<double>(pool.isosceles_right / elementary_triangle_count(ParticleKind::Earth)) *
             grid.particle_volume(ParticleKind::Earth);
}

bool pool_can_form(const CosmosGrid& grid, int c) {
  const Cell& cell = grid.cell(c);
  for (auto kind : kAllKinds) {
    if (cell.free_pool[species_of(kind)] >= elementary_triangle_count(kind) &&
        fits(grid, c, grid.particle_volume(kind)))
      return true;
  }
  return false;
}

// Push particles out of an overfull cell: first toward their own band, then
// into whichever neighbor has room, and as a last resort crush one into the
// pool. Returns whether anything changed.
bool relieve(CosmosGrid& grid, int c, const RegionBands& bands, PhaseCounters& counters) {
  bool changed = false;
  const double x = grid.site(c).normalized_rho;
  while (overfull(grid, c)) {
    Cell& cell = grid.cell(c);
    int best_dst = -1;
    ParticleKind best_kind = ParticleKind::Fire;
    double best_score = std::numeric_limits<double>::infinity();
    for (auto kind : kAllKinds) {
      if (cell.population[kind] == 0) continue;
      const double v = grid.particle_volume(kind);
      const int wanted = desired_move(grid, c, kind, bands);
      for (int n : grid.site(c).neighbors) {
        if (!fits(grid, n, v)) continue;
        // Moves toward the band win; among the rest, the least displacement.
        double score = band_distance(kind, grid.site(n).normalized_rho, bands) - band_distance(kind, x, bands);
        if (n == wanted) score -= 1.0;
        score -= 1e-6 * v;
        if (score < best_score) {
          best_score = score;
          best_dst = n;
          best_kind = kind;
        }
      }
    }
    if (best_dst >= 0) {
      move_particle(grid, c, best_dst, best_kind);
    } else {
      // Crush the least numerous kind present.
      ParticleKind victim = ParticleKind::Fire;
      std::int64_t fewest = std::numeric_limits<std::int64_t>::max();
      for (auto kind : kAllKinds) {
        if (cell.population[kind] > 0 && cell.population[kind] < fewest) {
          fewest = cell.population[kind];
          victim = kind;
        }
      }
      auto result = shatter(cell.population, victim, 1);
      cell.population = result.inventory;
      cell.free_pool += result.freed;
      ++counters.shattered;
    }
    changed = true;
  }
  return changed;
}

// Pull particles into a cell holding too much void. A particle may come from
// a cell several hops away provided it slips through the interstices of
// every cell on the way; the cells it passes through are left unchanged.
// The donor must end within tolerance or with less slack than the receiver
// had, so the summed squared excess slack strictly falls and the loop cannot
// cycle.
bool refill(CosmosGrid& grid, int c, const SimConfig& config, int max_hops) {
  bool changed = false;
  const double x = grid.site(c).normalized_rho;
  const auto n = grid.size();
  std::vector<int> hops(n, -1);
  std::vector<int> queue;
  // Largest volume that can still travel from a cell to the receiver.
  std::vector<double> passable(n, 0.0);
  while (in_deficit(grid, c, config.slack_tolerance)) {
    const double receiver = grid.slack_fraction(c);
    const double excess = grid.slack(c) - config.slack_tolerance * grid.cell(c).capacity;
    std::fill(hops.begin(), hops.end(), -1);
    queue.assign(1, c);
    hops[static_cast<std::size_t>(c)] = 0;
    passable[static_cast<std::size_t>(c)] = std::numeric_limits<double>::infinity();

    int best_src = -1;
    ParticleKind best_kind = ParticleKind::Fire;
    std::tuple<int, double, int, double> best_key{};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int at = queue[head];
      const auto here = static_cast<std::size_t>(at);
      if (hops[here] > 0) {
        const Cell& donor = grid.cell(at);
        const double xd = grid.site(at).normalized_rho;
        for (auto kind : kAllKinds) {
          if (donor.population[kind] == 0) continue;
          const double v = grid.particle_volume(kind);
          if (v > passable[here] || !fits(grid, c, v)) continue;
          const double after = (grid.slack(at) + v) / donor.capacity;
          if (after > config.slack_tolerance && after >= receiver - kCapacitySlop) continue;
          // Least damage to the layering, then the shortest haul, then the
          // particle that best matches the excess.
          const double harm = band_distance(kind, x, config.bands) - band_distance(kind, xd, config.bands);
          const double mismatch = v >= excess ? v - excess : 2.0 * (excess - v);
          const std::tuple<int, double, int, double> key{harm > 1e-12 ? 1 : 0, harm, hops[here], mismatch};
          if (best_src < 0 || key < best_key) {
            best_key = key;
            best_src = at;
            best_kind = kind;
          }
        }
      }
      if (hops[here] >= max_hops) continue;
      // Beyond the first hop a particle has to squeeze through this cell.
      const double through =
          hops[here] == 0 ? passable[here]
                          : std::min(passable[here], config.aperture[index_of(majority(grid, at, config.bands))]);
      for (int nb : grid.site(at).neighbors) {
        const auto next = static_cast<std::size_t>(nb);
        if (hops[next] == hops[here] + 1) passable[next] = std::max(passable[next], through);
        if (hops[next] >= 0) continue;
        hops[next] = hops[here] + 1;
        passable[next] = through;
        queue.push_back(nb);
      }
    }
    if (best_src < 0) break;
    move_particle(grid, best_src, c, best_kind);
    changed = true;
  }
  return changed;
}

}  // namespace

OverCapacity::OverCapacity(int rho_index, int z_index, double occupied, double capacity)
    : std::runtime_error("cell (" + std::to_string(rho_index) + ", " + std::to_string(z_index) +
                         ") over capacity: occupied " + std::to_string(occupied) + " > " +
                         std::to_string(capacity)) {}

namespace {

std::string diverged_message(std::int64_t step, const std::vector<int>& flagged, std::size_t cells) {
  std::ostringstream os;
  os << "void fixpoint did not converge at step " << step << ": " << flagged.size() << " of " << cells
     << " cells keep slack above tolerance";
  return os.str();
}

}  // namespace

FixpointDiverged::FixpointDiverged(std::int64_t step, std::vector<int> flagged, std::size_t cell_count)
    : std::runtime_error(diverged_message(step, flagged, cell_count)), step_(step), flagged_(std::move(flagged)) {}

CosmosGrid::CosmosGrid(const SimConfig& config) : n_rho_(config.n_rho), n_z_(config.n_z) {
  config.validate();
  for (auto kind : kAllKinds) volume_[index_of(kind)] = unit_volume(kind, config.edge_length[index_of(kind)]);

  const double radius = config.rotation.radius;
  const double d_rho = radius / n_rho_;
  const double d_z = 2.0 * radius / n_z_;
  lookup_.assign(static_cast<std::size_t>(n_rho_) * static_cast<std::size_t>(n_z_), -1);
  for (int i = 0; i < n_rho_; ++i) {
    for (int j = 0; j < n_z_; ++j) {
      const CylindricalPoint center{(i + 0.5) * d_rho, -radius + (j + 0.5) * d_z};
      if (center.rho * center.rho + center.z * center.z > radius * radius) continue;
      lookup_[static_cast<std::size_t>(i * n_z_ + j)] = static_cast<int>(cells_.size());
      Cell cell;
      cell.rho_index = i;
      cell.z_index = j;
      cell.capacity = config.cell_capacity;
      cells_.push_back(cell);
      sites_.push_back({center, center.rho / radius, pressure_at(center, config.rotation),
                        region_of(center, config.rotation, config.bands), {}});
    }
  }
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& nb = sites_[c].neighbors;
    const int i = cells_[c].rho_index;
    const int j = cells_[c].z_index;
    for (auto [di, dj] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const int n = index_at(i + di, j + dj);
      if (n >= 0) nb.push_back(n);
    }
    std::sort(nb.begin(), nb.end(), [&](int a, int b) {
      const double pa = sites_[static_cast<std::size_t>(a)].pressure;
      const double pb = sites_[static_cast<std::size_t>(b)].pressure;
      return pa != pb ? pa > pb : a < b;
    });
  }
}

int CosmosGrid::index_at(int rho_index, int z_index) const {
  if (rho_index < 0 || rho_index >= n_rho_ || z_index < 0 || z_index >= n_z_) return -1;
  return lookup_[static_cast<std::size_t>(rho_index * n_z_ + z_index)];
}

double CosmosGrid::occupied_volume(const ParticleInventory& population) const {
  double total = 0.0;
  for (auto kind : kAllKinds) total += static_cast<double>(population[kind]) * volume_[index_of(kind)];
  return total;
}

TriangleLedger CosmosGrid::ledger() const {
  TriangleLedger total;
  for (const auto& cell : cells_) total += bound_ledger(cell.population) + cell.free_pool;
  return total;
}

ParticleInventory CosmosGrid::totals() const {
  ParticleInventory total;
  for (const auto& cell : cells_)
    for (auto kind : kAllKinds) total[kind] += cell.population[kind];
  return total;
}

CosmosGrid init_grid(const SimConfig& config) { return init_grid(config, config.initial); }

CosmosGrid init_grid(const SimConfig& config, const InitialDistribution& distribution) {
  CosmosGrid grid(config);
  for (auto kind : kAllKinds)
    if (distribution.totals[kind] < 0) throw ConfigInvalid("initial." + std::string(name_of(kind)), "count must be non-negative");

  // Spread `total` over `targets` as evenly as possible; the cells receiving
  // the remainder are drawn from the seeded stream.
  auto spread = [&](ParticleKind kind, std::int64_t total, std::vector<int> targets) {
    if (total == 0) return;
    if (targets.empty())
      throw ConfigInvalid("initial." + std::string(name_of(kind)), "no cell lies in the proper band of " + std::string(name_of(kind)));
    const auto n = static_cast<std::int64_t>(targets.size());
    for (int c : targets) grid.cell(c).population[kind] += total / n;
    Stream rng = stream_for(config.rng_seed, 0, Phase::Init, index_of(kind));
    shuffle(targets, rng);
    for (std::int64_t r = 0; r < total % n; ++r) grid.cell(targets[static_cast<std::size_t>(r)]).population[kind] += 1;
  };

  std::vector<int> all(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) all[c] = static_cast<int>(c);

  switch (distribution.mode) {
    case DistributionMode::UniformMixed:
      for (auto kind : kAllKinds) spread(kind, distribution.totals[kind], all);
      break;
    case DistributionMode::SingleKind:
      for (auto kind : kAllKinds)
        if (kind != distribution.single_kind && distribution.totals[kind] != 0)
          throw ConfigInvalid("initial." + std::string(name_of(kind)), "single_kind layout admits only " +
                                                                           std::string(name_of(distribution.single_kind)));
      spread(distribution.single_kind, distribution.totals[distribution.single_kind], all);
      break;
    case DistributionMode::PreStratified:
      for (auto kind : kAllKinds) {
        std::vector<int> band;
        for (int c : all)
          if (grid.site(c).band == kind) band.push_back(c);
        spread(kind, distribution.totals[kind], band);
      }
      break;
  }

  for (std::size_t c = 0; c < grid.size(); ++c) {
    const int ci = static_cast<int>(c);
    if (overfull(grid, ci))
      throw OverCapacity(grid.cell(ci).rho_index, grid.cell(ci).z_index, grid.occupied_volume(ci), grid.cell(ci).capacity);
  }
  return grid;
}

void combat_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters) {
  std::vector<std::int64_t> shattered(grid.size(), 0);
  for_each_cell(grid.size(), config.threads, [&](std::size_t idx) {
    const int c = static_cast<int>(idx);
    Cell& cell = grid.cell(c);
    int present = 0;
    for (auto kind : kAllKinds) present += cell.population[kind] > 0 ? 1 : 0;
    if (present < 2) return;
    const ParticleKind head = majority(grid, c, config.bands);
    double pressure = grid.site(c).pressure;
    if (!config.rotation.earth_co_rotates && head == ParticleKind::Earth) pressure = 0.0;
    if (pressure < config.pressure_floor) return;
    const double threshold = config.envelopment_threshold * static_cast<double>(cell.population[head]);
    for (auto kind : kAllKinds) {
      const std::int64_t n = cell.population[kind];
      if (kind == head || n == 0 || static_cast<double>(n) >= threshold) continue;
      auto result = shatter(cell.population, kind, n);
      cell.population = result.inventory;
      cell.free_pool += result.freed;
      shattered[idx] += n;
    }
  });
  for (auto n : shattered) counters.shattered += n;
}

void reassembly_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters) {
  struct Overflow {
    ParticleKind kind;
    std::int64_t count;
  };
  std::vector<std::vector<Overflow>> overflow(grid.size());
  std::vector<std::int64_t> formed(grid.size(), 0);

  for_each_cell(grid.size(), config.threads, [&](std::size_t idx) {
    const int c = static_cast<int>(idx);
    Cell& cell = grid.cell(c);
    for (auto kind : {majority_half_equilateral(grid, c, config.bands), ParticleKind::Earth}) {
      const auto built = reassemble(cell.free_pool, kind);
      if (built.particles == 0) continue;
      const double v = grid.particle_volume(kind);
      std::int64_t placed = 0;
      while (placed < built.particles && fits(grid, c, v)) {
        cell.population[kind] += 1;
        ++placed;
      }
      cell.free_pool[species_of(kind)] -= built.particles * elementary_triangle_count(kind);
      formed[idx] += placed;
      if (placed < built.particles) overflow[idx].push_back({kind, built.particles - placed});
    }
  });

  // Cross-cell placements commit in cell order.
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const int c = static_cast<int>(idx);
    for (const auto& [kind, count] : overflow[idx]) {
      const int dst = desired_move(grid, c, kind, config.bands);
      const double v = grid.particle_volume(kind);
      for (std::int64_t k = 0; k < count; ++k) {
        if (dst >= 0 && fits(grid, dst, v)) {
          grid.cell(dst).population[kind] += 1;
          ++formed[idx];
        } else {
          grid.cell(c).free_pool += particle_ledger(kind);
        }
      }
    }
    counters.reassembled += formed[idx];
  }
}

void drift_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters) {
  (void)counters;
  struct Proposal {
    ParticleKind kind;
    int dst;
  };
  std::vector<std::vector<Proposal>> proposals(grid.size());
  for_each_cell(grid.size(), config.threads, [&](std::size_t idx) {
    const int c = static_cast<int>(idx);
    auto& mine = proposals[idx];
    for (auto kind : kAllKinds) {
      const int dst = desired_move(grid, c, kind, config.bands);
      if (dst < 0) continue;
      for (std::int64_t k = 0; k < grid.cell(c).population[kind]; ++k) mine.push_back({kind, dst});
    }
    Stream rng = stream_for(config.rng_seed, grid.step_count, Phase::Drift, idx);
    shuffle(mine, rng);
  });

  // Commit in the fixed order (cell index, proposal index).
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const int src = static_cast<int>(idx);
    for (const auto& [kind, dst] : proposals[idx]) {
      if (grid.cell(src).population[kind] == 0) continue;
      const double v = grid.particle_volume(kind);
      const double reserved = latent_volume(grid, dst);
      if (fits(grid, dst, v + reserved)) {
        move_particle(grid, src, dst, kind);
        continue;
      }
      // Either the particle slips through the destination's interstices and
      // pushes particles back, or, too large for that, it trades places with
      // particles small enough to slip through the source's interstices.
      const bool slips = v <= config.aperture[index_of(majority(grid, dst, config.bands))];
      const double squeeze = slips ? std::numeric_limits<double>::infinity()
                                   : config.aperture[index_of(majority(grid, src, config.bands))];
      // Displaced particles go to the source: first those heading there
      // anyway, then those for which the source is no worse, smallest first.
      const double need = v + reserved - grid.slack(dst);
      const double x_src = grid.site(src).normalized_rho;
      const double x_dst = grid.site(dst).normalized_rho;
      std::array<ParticleKind, kKindCount> order = kAllKinds;
      auto rank = [&](ParticleKind q) {
        const double gain = band_distance(q, x_dst, config.bands) - band_distance(q, x_src, config.bands);
        return std::pair{gain > 0.0 ? 0 : gain == 0.0 ? 1 : 2, grid.particle_volume(q)};
      };
      std::sort(order.begin(), order.end(), [&](ParticleKind a, ParticleKind b) { return rank(a) < rank(b); });
      ParticleInventory displaced;
      double freed = 0.0;
      for (auto q : order) {
        if (rank(q).first == 2) break;
        const double vq = grid.particle_volume(q);
        if (vq > squeeze) continue;
        while (freed < need && displaced[q] < grid.cell(dst).population[q]) {
          displaced[q] += 1;
          freed += vq;
        }
      }
      if (freed < need) continue;
      if (grid.slack(src) + v - freed - latent_volume(grid, src) < -kCapacitySlop * grid.cell(src).capacity) continue;
      move_particle(grid, src, dst, kind);
      for (auto q : kAllKinds)
        for (std::int64_t k = 0; k < displaced[q]; ++k) move_particle(grid, dst, src, q);
    }
  }
}

void void_fixpoint_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters) {
  const auto n = static_cast<int>(grid.size());
  auto needs_work = [&](int c) {
    return overfull(grid, c) || in_deficit(grid, c, config.slack_tolerance) || pool_can_form(grid, c);
  };
  for (int iter = 0; iter < config.max_fixpoint_iters; ++iter) {
    bool pending = false;
    for (int c = 0; c < n && !pending; ++c) pending = needs_work(c);
    if (!pending) break;
    ++counters.fixpoint_iterations;
    bool changed = false;
    for (int c = 0; c < n; ++c) {
      const auto formed = cascade_pool(grid, c, config.bands);
      counters.reassembled += formed;
      changed |= formed > 0;
    }
    for (int c = 0; c < n; ++c)
      if (overfull(grid, c)) changed |= relieve(grid, c, config.bands, counters);
    for (int c = 0; c < n; ++c)
      if (in_deficit(grid, c, config.slack_tolerance)) changed |= refill(grid, c, config, kMaxRefillHops);
    if (!changed) break;
  }
  counters.flagged_cells.clear();
  for (int c = 0; c < n; ++c)
    if (in_deficit(grid, c, config.slack_tolerance)) counters.flagged_cells.push_back(c);
}

StepReport summarize(const CosmosGrid& grid, const PhaseCounters& counters) {
  StepReport report;
  report.step = grid.step_count;
  report.shattered = counters.shattered;
  report.reassembled = counters.reassembled;
  report.flagged_cells = counters.flagged_cells;
  report.fixpoint_iterations = counters.fixpoint_iterations;
  std::array<double, kKindCount> weighted{};
  const bool empty = grid.totals().empty() && grid.ledger().empty();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const int c = static_cast<int>(idx);
    const Cell& cell = grid.cell(c);
    if (!empty) report.max_residual_slack_fraction = std::max(report.max_residual_slack_fraction, grid.slack_fraction(c));
    for (auto kind : kAllKinds) {
      report.totals[kind] += cell.population[kind];
      weighted[index_of(kind)] += static_cast<double>(cell.population[kind]) * grid.site(c).normalized_rho;
    }
  }
  for (auto kind : kAllKinds) {
    const auto count = report.totals[kind];
    report.mean_normalized_rho[index_of(kind)] =
        count > 0 ? weighted[index_of(kind)] / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

StepReport step(CosmosGrid& grid, const SimConfig& config) {
  PhaseCounters counters;
  const bool empty = grid.totals().empty() && grid.ledger().empty();
  if (!empty) {
    combat_phase(grid, config, counters);
    reassembly_phase(grid, config, counters);
    drift_phase(grid, config, counters);
    void_fixpoint_phase(grid, config, counters);
  }
  grid.step_count += 1;
  auto report = summarize(grid, counters);
  const double allowed = config.max_flagged_fraction * static_cast<double>(grid.size());
  if (static_cast<double>(counters.flagged_cells.size()) > allowed)
    throw FixpointDiverged(grid.step_count, counters.flagged_cells, grid.size());
  return report;
}

std::vector<StepReport> run(const SimConfig& config, std::int64_t steps) {
  CosmosGrid grid = init_grid(config);
  return run(grid, config, steps);
}

std::vector<StepReport> run(CosmosGrid& grid, const SimConfig& config, std::int64_t steps,
                            const StepObserver& observer) {
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  std::vector<StepReport> reports;
  reports.reserve(static_cast<std::size_t>(steps));
  for (std::int64_t s = 0; s < steps; ++s) {
    reports.push_back(step(grid, config));
    if (observer) observer(grid, reports.back());
  }
  return reports;
}

}  // namespace cosmos
