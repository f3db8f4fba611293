#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cosmos/config.hpp"
#include "cosmos/dynamics.hpp"
#include "cosmos/laws.hpp"

namespace cosmos {

inline constexpr const char* kVersion = COSMOS_VERSION;

/// Reals in every CSV are printed with nine significant digits.
std::string format_real(double value);

std::string step_csv_header();
std::string step_csv_row(const StepReport& report);
void write_step_csv(std::ostream& out, std::span<const StepReport> reports);

std::string reaction_csv_header();
std::string reaction_csv_row(const Reaction& reaction);
void write_reaction_csv(std::ostream& out, std::span<const Reaction> reactions);

struct RunManifest {
  std::string config_path;
  std::string config_echo;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string started_at;
  std::string finished_at;
  std::int64_t steps = 0;
  std::vector<std::string> outputs;
};

std::string to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

/// Current UTC time as an ISO 8601 string.
std::string utc_timestamp();

}  // namespace cosmos
