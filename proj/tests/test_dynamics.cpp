#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cosmos/dynamics.hpp"
#include "cosmos/geometry.hpp"
#include "cosmos/report.hpp"

using namespace cosmos;

namespace {

// n_rho = 4, n_z = 2 keeps six cells: rho index 0..2 at normalized rho
// 0.125 (earth band), 0.375 (water), 0.625 (air), two heights each.
SimConfig six_cells(double capacity = 12.5) {
  SimConfig c;
  c.n_rho = 4;
  c.n_z = 2;
  c.cell_capacity = capacity;
  c.initial.totals = {};
  return c;
}

std::string csv_of(const std::vector<StepReport>& reports) {
  std::ostringstream os;
  write_step_csv(os, reports);
  return os.str();
}

TriangleLedger ledger_of(const ParticleInventory& inv) { return bound_ledger(inv); }

// Default config shrunk to a 16 x 16 grid.
SimConfig small_default() {
  SimConfig c = default_config();
  c.n_z = 16;
  CosmosGrid probe(c);
  for (auto kind : kAllKinds) c.initial.totals[kind] = 16 * static_cast<std::int64_t>(probe.size());
  return c;
}

}  // namespace

TEST_CASE("grid layout") {
  const SimConfig c = six_cells();
  CosmosGrid g(c);
  CHECK(g.size() == 6);
  CHECK(g.index_at(3, 0) == -1);
  CHECK(g.index_at(-1, 0) == -1);
  CHECK(g.site(g.index_at(0, 0)).band == ParticleKind::Earth);
  CHECK(g.site(g.index_at(1, 1)).band == ParticleKind::Water);
  CHECK(g.site(g.index_at(2, 0)).band == ParticleKind::Air);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& nb = g.site(static_cast<int>(i)).neighbors;
    for (std::size_t k = 1; k < nb.size(); ++k) CHECK(g.site(nb[k - 1]).pressure >= g.site(nb[k]).pressure);
  }
  CHECK(g.site(g.index_at(0, 0)).neighbors.size() == 2);
  CHECK(g.site(g.index_at(1, 0)).neighbors.size() == 3);

  const SimConfig d = default_config();
  CosmosGrid full(d);
  CHECK(full.size() == 406);
  for (std::size_t i = 0; i < full.size(); ++i) {
    const auto p = full.site(static_cast<int>(i)).center;
    CHECK(p.rho * p.rho + p.z * p.z <= 1.0);
  }
}

TEST_CASE("init_grid") {
  SUBCASE("single kind") {
    SimConfig c = six_cells();
    c.initial.mode = DistributionMode::SingleKind;
    c.initial.single_kind = ParticleKind::Fire;
    c.initial.totals[ParticleKind::Fire] = 60;
    const auto g = init_grid(c);
    for (const auto& cell : g.cells()) {
      CHECK(cell.population == ParticleInventory::of(10, 0, 0, 0));
      CHECK(cell.free_pool.empty());
    }
    c.initial.totals[ParticleKind::Air] = 1;
    CHECK_THROWS_AS(init_grid(c), ConfigInvalid);
  }
  SUBCASE("uniform mixed ledger") {
    SimConfig c = six_cells(40);
    c.initial.totals = ParticleInventory::of(13, 7, 5, 3);
    const auto g = init_grid(c);
    CHECK(g.totals() == c.initial.totals);
    CHECK(g.ledger() == TriangleLedger{24 * 13 + 48 * 7 + 120 * 5, 24 * 3});
    // Remainders differ by at most one between cells.
    for (auto kind : kAllKinds) {
      std::int64_t lo = 1 << 30, hi = 0;
      for (const auto& cell : g.cells()) {
        lo = std::min(lo, cell.population[kind]);
        hi = std::max(hi, cell.population[kind]);
      }
      CHECK(hi - lo <= 1);
    }
  }
  SUBCASE("deterministic given the seed") {
    SimConfig c = six_cells(40);
    c.initial.totals = ParticleInventory::of(13, 7, 5, 3);
    const auto a = init_grid(c);
    const auto b = init_grid(c);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.cell(int(i)).population == b.cell(int(i)).population);
  }
  SUBCASE("pre-stratified") {
    SimConfig c = six_cells(40);
    c.initial.mode = DistributionMode::PreStratified;
    c.initial.totals = ParticleInventory::of(0, 4, 4, 4);
    const auto g = init_grid(c);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (auto kind : kAllKinds)
        if (g.cell(int(i)).population[kind] > 0) CHECK(g.site(int(i)).band == kind);
    // No cell of this grid lies in the fire band.
    c.initial.totals[ParticleKind::Fire] = 1;
    CHECK_THROWS_AS(init_grid(c), ConfigInvalid);
  }
  SUBCASE("over capacity") {
    SimConfig c = six_cells(10);
    c.initial.totals[ParticleKind::Earth] = 100;
    CHECK_THROWS_AS(init_grid(c), OverCapacity);
    InitialDistribution d;
    d.totals[ParticleKind::Earth] = -1;
    CHECK_THROWS_AS(init_grid(c, d), ConfigInvalid);
  }
  SUBCASE("invalid config") {
    SimConfig c = six_cells();
    c.envelopment_threshold = 2;
    CHECK_THROWS_AS(init_grid(c), ConfigInvalid);
  }
}

TEST_CASE("combat") {
  const SimConfig c = six_cells(40);
  CosmosGrid g(c);
  const int outer = g.index_at(2, 0);  // pressure (2 pi 0.625)^2 > 1
  const int inner = g.index_at(0, 0);  // pressure (2 pi 0.125)^2 < 1
  REQUIRE(g.site(outer).pressure >= c.pressure_floor);
  REQUIRE(g.site(inner).pressure < c.pressure_floor);

  SUBCASE("enveloped minority is shattered") {
    g.cell(outer).population = ParticleInventory::of(1, 10, 0, 0);
    PhaseCounters pc;
    combat_phase(g, c, pc);
    CHECK(g.cell(outer).population == ParticleInventory::of(0, 10, 0, 0));
    CHECK(g.cell(outer).free_pool == TriangleLedger{24, 0});
    CHECK(pc.shattered == 1);
  }
  SUBCASE("a minority at the threshold survives") {
    g.cell(outer).population = ParticleInventory::of(2, 10, 0, 0);
    PhaseCounters pc;
    combat_phase(g, c, pc);
    CHECK(g.cell(outer).population == ParticleInventory::of(2, 10, 0, 0));
  }
  SUBCASE("like does not act on like") {
    g.cell(outer).population = ParticleInventory::of(10, 0, 0, 0);
    PhaseCounters pc;
    combat_phase(g, c, pc);
    CHECK(g.cell(outer).population == ParticleInventory::of(10, 0, 0, 0));
    CHECK(pc.shattered == 0);
  }
  SUBCASE("below the pressure floor") {
    g.cell(inner).population = ParticleInventory::of(1, 10, 0, 0);
    PhaseCounters pc;
    combat_phase(g, c, pc);
    CHECK(g.cell(inner).population == ParticleInventory::of(1, 10, 0, 0));
    CHECK(g.cell(inner).free_pool.empty());
  }
  SUBCASE("earth shatters into its own species") {
    g.cell(outer).population = ParticleInventory::of(0, 0, 10, 1);
    PhaseCounters pc;
    combat_phase(g, c, pc);
    CHECK(g.cell(outer).free_pool == TriangleLedger{0, 24});
  }
  SUBCASE("a resting earth shelters its cell") {
    SimConfig still = c;
    still.rotation.earth_co_rotates = false;
    g.cell(outer).population = ParticleInventory::of(0, 1, 0, 10);
    PhaseCounters pc;
    combat_phase(g, still, pc);
    CHECK(g.cell(outer).population == ParticleInventory::of(0, 1, 0, 10));
    combat_phase(g, c, pc);
    CHECK(g.cell(outer).population == ParticleInventory::of(0, 0, 0, 10));
  }
}

TEST_CASE("reassembly") {
  const SimConfig c = six_cells(40);
  CosmosGrid g(c);
  const int cell = g.index_at(1, 0);

  SUBCASE("pool rebuilt as the majority kind") {
    g.cell(cell).population = ParticleInventory::of(0, 5, 0, 0);
    g.cell(cell).free_pool = {48, 0};
    PhaseCounters pc;
    reassembly_phase(g, c, pc);
    CHECK(g.cell(cell).population == ParticleInventory::of(0, 6, 0, 0));
    CHECK(g.cell(cell).free_pool.empty());
    CHECK(pc.reassembled == 1);
  }
  SUBCASE("less than one budget stays pooled") {
    g.cell(cell).population = ParticleInventory::of(0, 0, 5, 0);
    g.cell(cell).free_pool = {30, 0};
    PhaseCounters pc;
    reassembly_phase(g, c, pc);
    CHECK(g.cell(cell).population == ParticleInventory::of(0, 0, 5, 0));
    CHECK(g.cell(cell).free_pool == TriangleLedger{30, 0});
    CHECK(pc.reassembled == 0);
  }
  SUBCASE("isosceles triangles always reform earth") {
    g.cell(cell).population = ParticleInventory::of(4, 0, 0, 0);
    g.cell(cell).free_pool = {0, 24};
    PhaseCounters pc;
    reassembly_phase(g, c, pc);
    CHECK(g.cell(cell).population == ParticleInventory::of(4, 0, 0, 1));
    CHECK(g.cell(cell).free_pool.empty());
  }
  SUBCASE("overflow goes one cell toward the band") {
    // Water in the earth band is full; the new water belongs farther out.
    const int inner = g.index_at(0, 0);
    const int out = g.index_at(1, 0);
    SimConfig tight = six_cells(unit_volume(ParticleKind::Water) * 3 + 0.01);
    CosmosGrid t(tight);
    t.cell(inner).population = ParticleInventory::of(0, 0, 3, 0);
    t.cell(inner).free_pool = {130, 0};
    PhaseCounters pc;
    reassembly_phase(t, tight, pc);
    CHECK(t.cell(inner).population == ParticleInventory::of(0, 0, 3, 0));
    CHECK(t.cell(out).population == ParticleInventory::of(0, 0, 1, 0));
    CHECK(t.cell(inner).free_pool == TriangleLedger{10, 0});
    CHECK(pc.reassembled == 1);
  }
  SUBCASE("overflow with nowhere to go stays pooled") {
    SimConfig tight = six_cells(unit_volume(ParticleKind::Water) * 3 + 0.01);
    CosmosGrid t(tight);
    const int inner = t.index_at(0, 0);
    const int out = t.index_at(1, 0);
    t.cell(inner).population = ParticleInventory::of(0, 0, 3, 0);
    t.cell(out).population = ParticleInventory::of(0, 0, 3, 0);
    t.cell(inner).free_pool = {120, 0};
    PhaseCounters pc;
    reassembly_phase(t, tight, pc);
    CHECK(t.cell(inner).free_pool == TriangleLedger{120, 0});
    CHECK(t.ledger() == TriangleLedger{120 * 7, 0});
  }
}

TEST_CASE("drift") {
  SUBCASE("in-band particles stay") {
    const SimConfig c = six_cells(40);
    CosmosGrid g(c);
    g.cell(g.index_at(0, 0)).population = ParticleInventory::of(0, 0, 0, 5);
    g.cell(g.index_at(1, 0)).population = ParticleInventory::of(0, 0, 5, 0);
    g.cell(g.index_at(2, 1)).population = ParticleInventory::of(0, 5, 0, 0);
    const auto before = std::vector<Cell>(g.cells().begin(), g.cells().end());
    PhaseCounters pc;
    drift_phase(g, c, pc);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.cell(int(i)).population == before[i].population);
  }
  SUBCASE("free room is entered directly") {
    const SimConfig c = six_cells(40);
    CosmosGrid g(c);
    g.cell(g.index_at(0, 0)).population = ParticleInventory::of(3, 0, 0, 0);
    PhaseCounters pc;
    drift_phase(g, c, pc);
    CHECK(g.cell(g.index_at(0, 0)).population.empty());
    CHECK(g.cell(g.index_at(1, 0)).population == ParticleInventory::of(3, 0, 0, 0));
  }
  SUBCASE("small particle slips into a full earth cell") {
    const double v_earth = unit_volume(ParticleKind::Earth, 1.5);
    const double v_water = unit_volume(ParticleKind::Water);
    const SimConfig c = six_cells(3 * v_earth + v_water + 0.2);
    CosmosGrid g(c);
    const int src = g.index_at(0, 0);
    const int dst = g.index_at(1, 0);
    g.cell(src).population = ParticleInventory::of(1, 0, 0, 0);
    g.cell(dst).population = ParticleInventory::of(0, 0, 1, 3);
    REQUIRE(g.slack(dst) < g.particle_volume(ParticleKind::Fire));
    REQUIRE(g.particle_volume(ParticleKind::Fire) <= c.aperture[index_of(ParticleKind::Earth)]);
    PhaseCounters pc;
    drift_phase(g, c, pc);
    // The fire got in; the earth it displaced fell back toward the axis.
    CHECK(g.cell(dst).population[ParticleKind::Fire] == 1);
    CHECK(g.cell(src).population[ParticleKind::Fire] == 0);
    CHECK(g.cell(src).population[ParticleKind::Earth] == 3);
    CHECK(g.cell(dst).population[ParticleKind::Water] == 1);
    CHECK(g.ledger() == ledger_of(ParticleInventory::of(1, 0, 1, 3)));
  }
  SUBCASE("large particle blocked by a full fire cell") {
    SimConfig c = six_cells(12.5);
    c.aperture = {0.4, 1.0, 2.5, 3.5};  // fire gaps too narrow even for fire
    CosmosGrid g(c);
    const int src = g.index_at(2, 0);
    const int dst = g.index_at(1, 0);
    const int side = g.index_at(2, 1);
    g.cell(dst).population = ParticleInventory::of(28, 0, 0, 0);
    g.cell(src).population = ParticleInventory::of(20, 0, 0, 1);
    g.cell(side).population = ParticleInventory::of(28, 0, 0, 0);
    REQUIRE(g.slack(dst) < g.particle_volume(ParticleKind::Earth));
    REQUIRE(g.particle_volume(ParticleKind::Earth) > c.aperture[index_of(ParticleKind::Fire)]);
    const auto before = g.cell(src).population;
    PhaseCounters pc;
    drift_phase(g, c, pc);
    CHECK(g.cell(src).population == before);
    CHECK(g.cell(dst).population == ParticleInventory::of(28, 0, 0, 0));
  }
  SUBCASE("fire heads outward") {
    const SimConfig c = six_cells(40);
    CosmosGrid g(c);
    g.cell(g.index_at(2, 0)).population = ParticleInventory::of(0, 0, 0, 0);
    g.cell(g.index_at(1, 1)).population = ParticleInventory::of(2, 0, 0, 0);
    PhaseCounters pc;
    drift_phase(g, c, pc);
    CHECK(g.cell(g.index_at(0, 1)).population.empty());
    CHECK(g.cell(g.index_at(1, 1)).population.empty());
    CHECK(g.cell(g.index_at(2, 1)).population == ParticleInventory::of(2, 0, 0, 0));
  }
}

TEST_CASE("void fixpoint") {
  SUBCASE("a void is filled from a neighbor's surplus") {
    const double v_fire = unit_volume(ParticleKind::Fire, default_config().edge_length[0]);
    const SimConfig c = six_cells(20 * v_fire);
    CosmosGrid g(c);
    for (std::size_t i = 0; i < g.size(); ++i) g.cell(int(i)).population = ParticleInventory::of(20, 0, 0, 0);
    const int hole = g.index_at(1, 0);
    g.cell(hole).population = ParticleInventory::of(15, 0, 0, 0);
    REQUIRE(g.slack_fraction(hole) > c.slack_tolerance);
    // Under a looser tolerance the same hole is acceptable.
    SimConfig loose_config = c;
    loose_config.slack_tolerance = 0.3;
    CosmosGrid h = g;
    PhaseCounters pc;
    void_fixpoint_phase(g, c, pc);
    CHECK(g.slack_fraction(hole) <= c.slack_tolerance + 1e-12);
    CHECK(g.totals() == ParticleInventory::of(115, 0, 0, 0));
    CHECK(pc.flagged_cells.empty());
    CHECK(pc.fixpoint_iterations >= 1);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.slack_fraction(int(i)) <= c.slack_tolerance + 1e-12);
    PhaseCounters loose;
    void_fixpoint_phase(h, loose_config, loose);
    CHECK(loose.fixpoint_iterations == 0);
  }
  SUBCASE("a full grid needs no iterations") {
    const SimConfig c = six_cells(10 * unit_volume(ParticleKind::Earth, 1.5));
    CosmosGrid g(c);
    for (std::size_t i = 0; i < g.size(); ++i) g.cell(int(i)).population = ParticleInventory::of(0, 0, 0, 10);
    PhaseCounters pc;
    void_fixpoint_phase(g, c, pc);
    CHECK(pc.fixpoint_iterations == 0);
    CHECK(pc.flagged_cells.empty());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.cell(int(i)).population == ParticleInventory::of(0, 0, 0, 10));
  }
  SUBCASE("a half-empty grid is flagged") {
    SimConfig c = default_config();
    c.n_rho = 8;
    c.n_z = 16;
    c.max_flagged_fraction = 1.0;
    CosmosGrid probe(c);
    const auto cells = static_cast<std::int64_t>(probe.size());
    // 8 of each kind per cell fills about half of the capacity.
    for (auto kind : kAllKinds) c.initial.totals[kind] = 8 * cells;
    auto g = init_grid(c);
    double occupied = 0;
    for (std::size_t i = 0; i < g.size(); ++i) occupied += g.occupied_volume(int(i));
    CHECK(occupied / (c.cell_capacity * cells) == doctest::Approx(0.49).epsilon(0.02));
    const auto report = step(g, c);
    CHECK(!report.flagged_cells.empty());
    for (int f : report.flagged_cells) CHECK(g.slack_fraction(f) > c.slack_tolerance);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const bool flagged = std::find(report.flagged_cells.begin(), report.flagged_cells.end(), int(i)) !=
                           report.flagged_cells.end();
      if (!flagged) CHECK(g.slack_fraction(int(i)) <= c.slack_tolerance + 1e-9);
    }

    c.max_flagged_fraction = 0.1;
    auto again = init_grid(c);
    CHECK_THROWS_AS(step(again, c), FixpointDiverged);
    auto third = init_grid(c);
    try {
      step(third, c);
    } catch (const FixpointDiverged& e) {
      CHECK(e.step() == 1);
      CHECK(static_cast<double>(e.flagged().size()) > 0.1 * static_cast<double>(cells));
    }
  }
}

TEST_CASE("step") {
  SUBCASE("empty grid is a no-op") {
    const SimConfig c = six_cells();
    CosmosGrid g(c);
    const auto r = step(g, c);
    CHECK(r.step == 1);
    CHECK(r.totals.empty());
    CHECK(r.shattered == 0);
    CHECK(r.reassembled == 0);
    CHECK(r.max_residual_slack_fraction == 0.0);
    CHECK(r.flagged_cells.empty());
    for (double rho : r.mean_normalized_rho) CHECK(std::isnan(rho));
  }
  SUBCASE("scripted: fire enveloped by air") {
    // Inner cells hold exactly five water, outer cells 25 fire; both fill
    // the capacity exactly and sit in their own bands.
    SimConfig c = default_config();
    c.n_rho = 2;
    c.n_z = 2;
    c.cell_capacity = 5 * unit_volume(ParticleKind::Water, c.edge_length[2]);
    CosmosGrid g(c);
    REQUIRE(g.size() == 4);
    const int a = g.index_at(1, 0);
    g.cell(g.index_at(0, 0)).population = ParticleInventory::of(0, 0, 5, 0);
    g.cell(g.index_at(0, 1)).population = ParticleInventory::of(0, 0, 5, 0);
    g.cell(g.index_at(1, 1)).population = ParticleInventory::of(25, 0, 0, 0);
    g.cell(a).population = ParticleInventory::of(1, 10, 0, 0);
    g.cell(a).free_pool = {24, 0};
    const auto before = g.ledger();
    const auto r = step(g, c);
    CHECK(r.shattered == 1);
    CHECK(r.reassembled == 1);
    CHECK(r.totals[ParticleKind::Air] == 11);
    CHECK(r.totals[ParticleKind::Fire] == 25);
    CHECK(g.ledger() == before);
    for (const auto& cell : g.cells()) CHECK(cell.free_pool.empty());
  }
  SUBCASE("ledger is conserved on random grids") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 12; ++trial) {
      SimConfig c = default_config();
      c.n_rho = 4 + static_cast<int>(rng() % 6);
      c.n_z = 4 + static_cast<int>(rng() % 8);
      c.rng_seed = rng();
      c.envelopment_threshold = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
      c.pressure_floor = static_cast<double>(rng() % 30);
      c.max_flagged_fraction = 1.0;
      c.threads = 1 + static_cast<int>(rng() % 3);
      CosmosGrid probe(c);
      const auto cells = static_cast<std::int64_t>(probe.size());
      for (auto kind : kAllKinds) c.initial.totals[kind] = static_cast<std::int64_t>(rng() % 17) * cells / 2;
      auto g = init_grid(c);
      g.cell(0).free_pool = {static_cast<std::int64_t>(rng() % 200), static_cast<std::int64_t>(rng() % 50)};
      const auto start = g.ledger();
      for (int s = 0; s < 15; ++s) {
        const auto r = step(g, c);
        REQUIRE(g.ledger() == start);
        CHECK(r.totals == g.totals());
        CHECK(r.max_residual_slack_fraction >= 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
          CHECK(g.occupied_volume(int(i)) <= g.cell(int(i)).capacity * (1 + 1e-9));
          const bool flagged = std::find(r.flagged_cells.begin(), r.flagged_cells.end(), int(i)) !=
                               r.flagged_cells.end();
          if (!flagged) CHECK(g.slack_fraction(int(i)) <= c.slack_tolerance + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("same-kind grids are fixed points of combat") {
  for (auto kind : kAllKinds) {
    SimConfig c = small_default();
    c.rotation.pressure_gain = 1e6;
    c.initial.mode = DistributionMode::SingleKind;
    c.initial.single_kind = kind;
    c.initial.totals = {};
    c.initial.totals[kind] = 3 * static_cast<std::int64_t>(CosmosGrid(c).size());
    auto g = init_grid(c);
    const std::vector<Cell> start(g.cells().begin(), g.cells().end());
    PhaseCounters pc;
    for (int s = 0; s < 100; ++s) combat_phase(g, c, pc);
    CHECK(pc.shattered == 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g.cell(int(i)).population == start[i].population);
      CHECK(g.cell(int(i)).free_pool.empty());
    }
  }
}

TEST_CASE("mixed populations persist near the axis") {
  SimConfig c = small_default();
  auto g = init_grid(c);
  for (int s = 0; s < 50; ++s) step(g, c);
  int mixed_low = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.site(int(i)).pressure >= c.pressure_floor) continue;
    int kinds = 0;
    for (auto kind : kAllKinds) kinds += g.cell(int(i)).population[kind] > 0;
    mixed_low += kinds >= 2;
  }
  CHECK(mixed_low > 0);

  // Combat leaves every low-pressure cell alone.
  const std::vector<Cell> before(g.cells().begin(), g.cells().end());
  PhaseCounters pc;
  combat_phase(g, c, pc);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.site(int(i)).pressure < c.pressure_floor) CHECK(g.cell(int(i)).population == before[i].population);
}

TEST_CASE("run") {
  const SimConfig c = small_default();
  CHECK(run(c, 0).empty());
  CosmosGrid g(c);
  CHECK_THROWS_AS(run(g, c, -1), std::invalid_argument);

  const auto a = run(c, 40);
  REQUIRE(a.size() == 40);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].step == static_cast<std::int64_t>(i + 1));
  CHECK(csv_of(a) == csv_of(run(c, 40)));

  SimConfig other = c;
  other.rng_seed ^= 1;
  CHECK(csv_of(run(other, 40)) != csv_of(a));

  SimConfig parallel = c;
  parallel.threads = 4;
  CHECK(csv_of(run(parallel, 40)) == csv_of(a));
  parallel.threads = 7;
  CHECK(csv_of(run(parallel, 40)) == csv_of(a));
}

TEST_CASE("observer sees every step") {
  const SimConfig c = small_default();
  auto g = init_grid(c);
  std::int64_t calls = 0;
  run(g, c, 5, [&](CosmosGrid& grid, const StepReport& r) {
    ++calls;
    CHECK(r.step == grid.step_count);
  });
  CHECK(calls == 5);
}

TEST_CASE("stratification on a small grid") {
  const SimConfig c = small_default();
  const auto reports = run(c, 200);
  const auto& rho = reports.back().mean_normalized_rho;
  CHECK(rho[index_of(ParticleKind::Fire)] > rho[index_of(ParticleKind::Air)]);
  CHECK(rho[index_of(ParticleKind::Air)] > rho[index_of(ParticleKind::Water)]);
  CHECK(rho[index_of(ParticleKind::Water)] > rho[index_of(ParticleKind::Earth)]);
}
