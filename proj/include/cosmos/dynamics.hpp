#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosmos/config.hpp"
#include "cosmos/laws.hpp"
#include "cosmos/rotation.hpp"

namespace cosmos {

/// One axisymmetric (rho, z) parcel of the universe.
struct Cell {
  int rho_index = 0;
  int z_index = 0;
  double capacity = 0.0;
  ParticleInventory population;
  TriangleLedger free_pool;
};

/// Fixed per-cell data derived from the grid layout.
struct CellSite {
  CylindricalPoint center;
  double normalized_rho;
  double pressure;
  ParticleKind band;
  std::vector<int> neighbors;  // sorted by pressure descending, then index
};

class OverCapacity : public std::runtime_error {
 public:
  OverCapacity(int rho_index, int z_index, double occupied, double capacity);
};

/// Raised when too many cells keep a void after the fixpoint loop.
class FixpointDiverged : public std::runtime_error {
 public:
  FixpointDiverged(std::int64_t step, std::vector<int> flagged, std::size_t cell_count);
  const std::vector<int>& flagged() const { return flagged_; }
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
  std::vector<int> flagged_;
};

class CosmosGrid {
 public:
  /// Empty grid: every (rho, z) cell whose center lies inside the sphere.
  explicit CosmosGrid(const SimConfig& config);

  int n_rho() const { return n_rho_; }
  int n_z() const { return n_z_; }
  std::size_t size() const { return cells_.size(); }

  std::span<Cell> cells() { return cells_; }
  std::span<const Cell> cells() const { return cells_; }
  Cell& cell(int index) { return cells_[static_cast<std::size_t>(index)]; }
  const Cell& cell(int index) const { return cells_[static_cast<std::size_t>(index)]; }
  const CellSite& site(int index) const { return sites_[static_cast<std::size_t>(index)]; }

  /// Cell index at grid coordinates, or -1 outside the sphere.
  int index_at(int rho_index, int z_index) const;

  double particle_volume(ParticleKind kind) const { return volume_[index_of(kind)]; }
  double occupied_volume(const ParticleInventory& population) const;
  double occupied_volume(int index) const { return occupied_volume(cell(index).population); }
  double slack(int index) const { return cell(index).capacity - occupied_volume(index); }
  double slack_fraction(int index) const { return slack(index) / cell(index).capacity; }

  /// Bound plus pooled triangles over the whole grid.
  TriangleLedger ledger() const;
  ParticleInventory totals() const;

  std::int64_t step_count = 0;

 private:
  int n_rho_;
  int n_z_;
  std::vector<Cell> cells_;
  std::vector<CellSite> sites_;
  std::vector<int> lookup_;
  std::array<double, kKindCount> volume_{};
};

struct StepReport {
  std::int64_t step = 0;
  ParticleInventory totals;
  std::int64_t shattered = 0;
  std::int64_t reassembled = 0;
  double max_residual_slack_fraction = 0.0;
  /// NaN for a kind with no particles.
  std::array<double, kKindCount> mean_normalized_rho{};
  std::vector<int> flagged_cells;
  int fixpoint_iterations = 0;
};

/// Tallies accumulated by the phases of one step.
struct PhaseCounters {
  std::int64_t shattered = 0;
  std::int64_t reassembled = 0;
  int fixpoint_iterations = 0;
  std::vector<int> flagged_cells;
};

CosmosGrid init_grid(const SimConfig& config);
CosmosGrid init_grid(const SimConfig& config, const InitialDistribution& distribution);

/// Enveloped minorities in pressurized cells are shattered into the pool.
void combat_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters);

/// Pools are rebuilt as the cell's majority kind of the matching species;
/// particles that do not fit overflow one cell toward their band or stay pooled.
void reassembly_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters);

/// Each out-of-band particle tries one move toward its band.
void drift_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters);

/// Refill voids and relieve overfull cells until every cell is within the
/// slack tolerance or the iteration budget runs out.
void void_fixpoint_phase(CosmosGrid& grid, const SimConfig& config, PhaseCounters& counters);

/// One full step. The global ledger is unchanged.
StepReport step(CosmosGrid& grid, const SimConfig& config);

/// Report of the current state without advancing it.
StepReport summarize(const CosmosGrid& grid, const PhaseCounters& counters);

/// Called after every step; lets tests tamper with the grid.
using StepObserver = std::function<void(CosmosGrid&, const StepReport&)>;

std::vector<StepReport> run(const SimConfig& config, std::int64_t steps);
std::vector<StepReport> run(CosmosGrid& grid, const SimConfig& config, std::int64_t steps,
                            const StepObserver& observer = {});

}  // namespace cosmos
