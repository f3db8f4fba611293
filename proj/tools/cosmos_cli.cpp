#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cosmos/commands.hpp"
#include "cosmos/config.hpp"
#include "cosmos/report.hpp"

namespace {

std::optional<std::uint64_t> seed_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return cosmos::parse_seed("--seed", text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Platonic particle cosmology: geometry checks, transformation laws and the rotating-grid simulator"};
  app.set_version_flag("--version", std::string(cosmos::kVersion));
  app.require_subcommand(1);

  double tolerance = 1e-6;
  auto* verify = app.add_subcommand("verify", "Check triangle budgets, angle sums and space-fill verdicts");
  verify->add_option("--tolerance", tolerance, "Angle tolerance in degrees")->capture_default_str();

  int max_coefficient = 0;
  std::string reactions_out;
  auto* reactions = app.add_subcommand("reactions", "List balanced fire/air/water reactions as CSV");
  reactions->add_option("--max", max_coefficient, "Largest coefficient (1..12)")->required();
  reactions->add_option("--out", reactions_out, "Output file (default stdout)");

  cosmos::SimulateOptions sim;
  std::string sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Run the simulation and write a per-step CSV and manifest");
  simulate->add_option("--config", sim.config_path, "Config file")->required();
  simulate->add_option("--steps", sim.steps, "Number of steps")->required();
  simulate->add_option("--out", sim.out_path, "CSV output file")->required();
  simulate->add_option("--manifest", sim.manifest_path, "Manifest file (default OUT.manifest.json)");
  simulate->add_option("--seed", sim_seed, std::string("Seed, overrides ") + cosmos::kSeedEnv + " and the config");

  cosmos::AuditOptions audit_opts;
  std::string audit_seed;
  std::int64_t inject_at = 0;
  auto* audit = app.add_subcommand("audit", "Recount the triangle ledger after every step");
  audit->add_option("--config", audit_opts.config_path, "Config file")->required();
  audit->add_option("--steps", audit_opts.steps, "Number of steps")->required();
  audit->add_option("--seed", audit_seed, std::string("Seed, overrides ") + cosmos::kSeedEnv + " and the config");
  audit->add_option("--inject-fault", inject_at, "Drop one triangle at this step")->group("");

  auto* defaults = app.add_subcommand("defaults", "Print the default config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cosmos::kExitOk : cosmos::kExitUsage;
  }

  try {
    if (*defaults) {
      std::cout << cosmos::format_config(cosmos::default_config());
      return cosmos::kExitOk;
    }
    if (*verify) return cosmos::cmd_verify(tolerance, std::cout, std::cerr);
    if (*reactions) return cosmos::cmd_reactions(max_coefficient, reactions_out, std::cout, std::cerr);
    if (*simulate) {
      sim.seed = seed_flag(sim_seed);
      return cosmos::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*audit) {
      audit_opts.seed = seed_flag(audit_seed);
      if (inject_at > 0) {
        audit_opts.tamper = [inject_at](cosmos::CosmosGrid& grid, const cosmos::StepReport& report) {
          if (report.step == inject_at) {
            auto& pool = grid.cell(0).free_pool;
            if (pool.half_equilateral > 0) pool.half_equilateral -= 1;
            else pool.half_equilateral += 1;
          }
        };
      }
      return cosmos::cmd_audit(audit_opts, std::cout, std::cerr);
    }
  } catch (const cosmos::ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cosmos::kExitUsage;
  }
  return cosmos::kExitUsage;
}
