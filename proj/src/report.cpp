#include "cosmos/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>

#include <nlohmann/json.hpp>

namespace cosmos {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string step_csv_header() {
  return "step,fire,air,water,earth,shattered,reassembled,max_slack_fraction,"
         "mean_rho_fire,mean_rho_air,mean_rho_water,mean_rho_earth";
}

std::string step_csv_row(const StepReport& r) {
  std::string row = std::to_string(r.step);
  for (auto kind : kAllKinds) row += "," + std::to_string(r.totals[kind]);
  row += "," + std::to_string(r.shattered) + "," + std::to_string(r.reassembled);
  row += "," + format_real(r.max_residual_slack_fraction);
  for (double rho : r.mean_normalized_rho) row += "," + format_real(rho);
  return row;
}

void write_step_csv(std::ostream& out, std::span<const StepReport> reports) {
  out << step_csv_header() << '\n';
  for (const auto& r : reports) out << step_csv_row(r) << '\n';
}

std::string reaction_csv_header() { return "fire_in,air_in,water_in,fire_out,air_out,water_out,he_triangles"; }

std::string reaction_csv_row(const Reaction& r) {
  std::string row;
  for (const auto* side : {&r.consumed, &r.produced})
    for (auto kind : {ParticleKind::Fire, ParticleKind::Air, ParticleKind::Water})
      row += std::to_string((*side)[kind]) + ",";
  return row + std::to_string(half_equilateral_load(r.consumed));
}

void write_reaction_csv(std::ostream& out, std::span<const Reaction> reactions) {
  out << reaction_csv_header() << '\n';
  for (const auto& r : reactions) out << reaction_csv_row(r) << '\n';
}

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = m.version;
  j["config_path"] = m.config_path;
  j["seed"] = m.seed;
  j["steps"] = m.steps;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  j["config"] = m.config_echo;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunManifest m;
  m.version = j.at("version").get<std::string>();
  m.config_path = j.at("config_path").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.steps = j.at("steps").get<std::int64_t>();
  m.started_at = j.at("started_at").get<std::string>();
  m.finished_at = j.at("finished_at").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.config_echo = j.at("config").get<std::string>();
  return m;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cosmos
