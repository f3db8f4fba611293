#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cosmos/laws.hpp"
#include "cosmos/particle.hpp"
#include "cosmos/rotation.hpp"

namespace cosmos {

enum class DistributionMode { UniformMixed, PreStratified, SingleKind };

/// How particles are laid out by init_grid. `totals` are whole-grid counts.
struct InitialDistribution {
  DistributionMode mode = DistributionMode::UniformMixed;
  ParticleKind single_kind = ParticleKind::Fire;
  ParticleInventory totals;
};

struct SimConfig {
  int n_rho = 16;
  int n_z = 32;
  double cell_capacity = 112.0;

  RotationParams rotation;
  RegionBands bands;

  /// Edge length of each particle polyhedron. The defaults give fire, air
  /// and water the same volume per half-equilateral triangle (the water
  /// icosahedron keeps edge 1), so reactions move volume around without
  /// creating or destroying it. Equal edges are a valid, more volatile choice.
  std::array<double, kKindCount> edge_length{1.5470229605517312, 1.2278729374993882, 1.0, 1.5};
  /// Largest particle volume that slips through the gaps of a cell whose
  /// majority is the given kind.
  std::array<double, kKindCount> aperture{0.5, 1.0, 2.5, 3.5};

  double envelopment_threshold = 0.2;
  double pressure_floor = 1.0;
  double slack_tolerance = 0.05;
  int max_fixpoint_iters = 400;
  /// FixpointDiverged is raised when more than this fraction of cells stay
  /// above the slack tolerance.
  double max_flagged_fraction = 0.25;

  std::uint64_t rng_seed = 0x7153a5eedULL;
  int threads = 1;

  InitialDistribution initial;

  /// Throws ConfigInvalid naming the offending key.
  void validate() const;
};

class ConfigInvalid : public std::invalid_argument {
 public:
  ConfigInvalid(std::string key, const std::string& what, int line = 0);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Parse the sectioned key = value format. Unknown sections or keys, bad
/// values and duplicates are errors carrying the line number.
SimConfig parse_config(std::string_view text);

/// Decimal or 0x-prefixed hexadecimal 64-bit seed.
std::uint64_t parse_seed(const std::string& key, const std::string& value, int line = 0);
SimConfig load_config(const std::string& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c exactly.
std::string format_config(const SimConfig& config);

std::string_view name_of(DistributionMode mode);

}  // namespace cosmos

namespace cosmos {

/// The shipped configuration: a 16 x 32 grid filled to about 98 percent with
/// equal numbers of each kind per cell.
SimConfig default_config();

}  // namespace cosmos
