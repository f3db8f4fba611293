#include "cosmos/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "cosmos/config.hpp"
#include "cosmos/geometry.hpp"
#include "cosmos/laws.hpp"
#include "cosmos/report.hpp"

namespace cosmos {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Checks {
  std::ostream& out;
  std::string first_failure;

  void expect(bool ok, const std::string& line, const std::string& failure) {
    out << "  " << line << (ok ? "  ok" : "  MISMATCH") << '\n';
    if (!ok && first_failure.empty()) first_failure = failure;
  }
};

void dump_flagged(const CosmosGrid& grid, const std::vector<int>& flagged, std::ostream& err) {
  err << "flagged cells (rho_index, z_index, slack fraction, fire/air/water/earth, pool HE/IR):\n";
  for (int c : flagged) {
    const Cell& cell = grid.cell(c);
    err << "  (" << cell.rho_index << ", " << cell.z_index << ") " << format_real(grid.slack_fraction(c)) << ' '
        << cell.population[ParticleKind::Fire] << '/' << cell.population[ParticleKind::Air] << '/'
        << cell.population[ParticleKind::Water] << '/' << cell.population[ParticleKind::Earth] << ' '
        << cell.free_pool.half_equilateral << '/' << cell.free_pool.isosceles_right << '\n';
  }
}

// Loads the config and applies the seed override; reports problems as usage
// errors and returns nullopt.
std::optional<SimConfig> prepare(const std::string& path, const std::optional<std::uint64_t>& seed,
                                 std::int64_t steps, std::ostream& err) {
  if (steps < 0) {
    err << "error: --steps must be non-negative\n";
    return std::nullopt;
  }
  try {
    SimConfig config = load_config(path);
    config.rng_seed = resolve_seed(seed, config.rng_seed);
    config.validate();
    return config;
  } catch (const ConfigInvalid& e) {
    err << "config error: " << path << ": " << e.what() << '\n';
  }
  return std::nullopt;
}

// Whole-grid ledger counted directly from the cells.
TriangleLedger recount(const CosmosGrid& grid) {
  TriangleLedger total;
  for (const Cell& cell : grid.cells()) total += bound_ledger(cell.population) + cell.free_pool;
  return total;
}

}  // namespace

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t configured) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') return parse_seed(kSeedEnv, env);
  return configured;
}

int cmd_verify(double tolerance, std::ostream& out, std::ostream& err) {
  if (!(tolerance >= 0.0)) {
    err << "error: tolerance must be non-negative\n";
    return kExitUsage;
  }
  Checks checks{out, {}};

  out << "triangle budgets\n";
  constexpr int expected_budget[] = {24, 48, 120, 24};
  for (auto kind : kAllKinds) {
    const auto spec = polyhedron_spec(kind);
    const int n = elementary_triangle_count(kind);
    const int want = expected_budget[index_of(kind)];
    const char* species = spec.elementary_kind == ElementaryTriangleKind::HalfEquilateral ? "half-equilateral"
                                                                                          : "isosceles-right";
    checks.expect(n == want,
                  std::string(name_of(kind)) + " (" + std::string(solid_name(kind)) + "): " +
                      std::to_string(spec.face_count) + " faces x " + std::to_string(spec.triangles_per_face) +
                      " = " + std::to_string(n) + " " + species,
                  std::string(name_of(kind)) + " triangle budget " + std::to_string(n) + ", expected " +
                      std::to_string(want));
  }

  out << "planar vertex fill (tolerance " << format_real(tolerance) << "°)\n";
  struct Planar {
    int angle;
    bool feasible;
    int copies;
    int residual;
  };
  for (const Planar p : {Planar{60, true, 6, 0}, Planar{90, true, 4, 0}, Planar{110, false, 3, 30}}) {
    const auto v = planar_vertex_fill(static_cast<double>(p.angle), tolerance);
    const bool ok = v.feasible == p.feasible && v.copies_used == p.copies && v.residual_angle == p.residual;
    checks.expect(ok,
                  std::to_string(p.angle) + "°: copies " + std::to_string(v.copies_used) + ", sum " +
                      format_real(v.copies_used * static_cast<double>(p.angle)) + "°, residual " +
                      format_real(v.residual_angle) + "°, " + (v.feasible ? "feasible" : "infeasible"),
                  std::to_string(p.angle) + "° planar fill expected " + (p.feasible ? "feasible" : "infeasible") +
                      " with " + std::to_string(p.copies) + " copies, got " +
                      (v.feasible ? "feasible" : "infeasible") + " with " + std::to_string(v.copies_used));
  }

  out << "space fill around an edge (tolerance " << format_real(tolerance) << "°)\n";
  for (auto kind : {ParticleKind::Earth, ParticleKind::Fire, ParticleKind::Air, ParticleKind::Water}) {
    const auto v = space_fill_check(kind, tolerance);
    const bool want = kind == ParticleKind::Earth;
    const std::string name(solid_name(kind));
    checks.expect(v.feasible == want,
                  name + ": residual " + fixed(v.residual_angle, 3) + "° (dihedral " + fixed(dihedral_angle(kind), 6) +
                      "°, copies " + std::to_string(v.copies_used) + ") " + (v.feasible ? "feasible" : "infeasible"),
                  name + " space fill expected " + (want ? "feasible" : "infeasible") + ", got " +
                      (v.feasible ? "feasible" : "infeasible") + " (residual " + fixed(v.residual_angle, 3) +
                      "° against tolerance " + format_real(tolerance) + "°)");
  }

  out << "regular polyhedra (faces per vertex, sides per face)\n";
  const auto solids = enumerate_platonic_solids();
  std::string pairs;
  for (const auto& s : solids)
    pairs += (pairs.empty() ? "" : " ") + ("(" + std::to_string(s.faces_per_vertex) + "," +
                                           std::to_string(s.face_sides) + ")");
  checks.expect(solids.size() == 5, std::to_string(solids.size()) + " found: " + pairs,
                "expected 5 regular polyhedra, found " + std::to_string(solids.size()));

  if (!checks.first_failure.empty()) {
    out << "FAIL: " << checks.first_failure << '\n';
    err << "verification mismatch: " << checks.first_failure << '\n';
    return kExitMismatch;
  }
  out << "all checks passed\n";
  return kExitOk;
}

int cmd_reactions(int max_coefficient, const std::string& out_path, std::ostream& out, std::ostream& err) {
  if (max_coefficient < 1 || max_coefficient > 12) {
    err << "error: --max must be between 1 and 12\n";
    return kExitUsage;
  }
  const auto reactions = enumerate_balanced_reactions(max_coefficient);
  if (out_path.empty()) {
    write_reaction_csv(out, reactions);
    return kExitOk;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "error: cannot write " << out_path << '\n';
    return kExitUsage;
  }
  write_reaction_csv(file, reactions);
  out << reactions.size() << " reactions written to " << out_path << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  const auto config = prepare(options.config_path, options.seed, options.steps, err);
  if (!config) return kExitUsage;

  RunManifest manifest;
  manifest.config_path = options.config_path;
  manifest.config_echo = format_config(*config);
  manifest.seed = config->rng_seed;
  manifest.steps = options.steps;
  manifest.started_at = utc_timestamp();
  const std::string manifest_path =
      options.manifest_path.empty() ? options.out_path + ".manifest.json" : options.manifest_path;

  std::ofstream csv(options.out_path, std::ios::binary);
  if (!csv) {
    err << "error: cannot write " << options.out_path << '\n';
    return kExitUsage;
  }

  std::optional<CosmosGrid> grid;
  try {
    grid.emplace(init_grid(*config));
  } catch (const std::exception& e) {
    err << "config error: " << options.config_path << ": " << e.what() << '\n';
    return kExitUsage;
  }

  csv << step_csv_header() << '\n';
  StepReport last = summarize(*grid, {});
  for (std::int64_t s = 0; s < options.steps; ++s) {
    try {
      last = step(*grid, *config);
    } catch (const FixpointDiverged& e) {
      csv.flush();
      err << e.what() << '\n';
      dump_flagged(*grid, e.flagged(), err);
      return kExitDiverged;
    }
    csv << step_csv_row(last) << '\n';
  }
  csv.close();

  manifest.finished_at = utc_timestamp();
  manifest.outputs = {options.out_path, manifest_path};
  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) {
    err << "error: cannot write " << manifest_path << '\n';
    return kExitUsage;
  }
  mf << to_json(manifest);

  out << options.steps << " steps, seed " << config->rng_seed << ", " << grid->size() << " cells\n";
  if (options.steps > 0) {
    out << "final totals fire/air/water/earth: " << last.totals[ParticleKind::Fire] << '/'
        << last.totals[ParticleKind::Air] << '/' << last.totals[ParticleKind::Water] << '/'
        << last.totals[ParticleKind::Earth] << '\n';
    out << "final mean normalized rho fire/air/water/earth:";
    for (double rho : last.mean_normalized_rho) out << ' ' << format_real(rho);
    out << "\nmax slack fraction " << format_real(last.max_residual_slack_fraction) << ", flagged cells "
        << last.flagged_cells.size() << '\n';
  }
  out << "wrote " << options.out_path << " and " << manifest_path << '\n';
  return kExitOk;
}

int cmd_audit(const AuditOptions& options, std::ostream& out, std::ostream& err) {
  const auto config = prepare(options.config_path, options.seed, options.steps, err);
  if (!config) return kExitUsage;

  std::optional<CosmosGrid> grid;
  try {
    grid.emplace(init_grid(*config));
  } catch (const std::exception& e) {
    err << "config error: " << options.config_path << ": " << e.what() << '\n';
    return kExitUsage;
  }

  const TriangleLedger initial = recount(*grid);
  for (std::int64_t s = 1; s <= options.steps; ++s) {
    StepReport report;
    try {
      report = step(*grid, *config);
    } catch (const FixpointDiverged& e) {
      err << e.what() << '\n';
      dump_flagged(*grid, e.flagged(), err);
      return kExitDiverged;
    }
    if (options.tamper) options.tamper(*grid, report);
    const TriangleLedger delta = recount(*grid) - initial;
    if (!delta.empty()) {
      err << "conservation violated at step " << s << ": half_equilateral delta " << std::showpos
          << delta.half_equilateral << ", isosceles_right delta " << delta.isosceles_right << std::noshowpos
          << '\n';
      return kExitConservation;
    }
  }
  out << "ledger constant over " << options.steps << " steps: " << initial.half_equilateral
      << " half-equilateral, " << initial.isosceles_right << " isosceles-right\n";
  return kExitOk;
}

}  // namespace cosmos
