#include "cosmos/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cosmos/dynamics.hpp"

namespace cosmos {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Shortest text that parses back to the same double.
std::string real(double v) {
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_real(const std::string& key, const std::string& value, int line) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigInvalid(key, "expected a real number, got '" + value + "'", line);
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value, int line) {
  std::int64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigInvalid(key, "expected an integer, got '" + value + "'", line);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigInvalid(key, "expected true or false, got '" + value + "'", line);
}

ParticleKind parse_kind(const std::string& key, const std::string& value, int line) {
  for (auto kind : kAllKinds)
    if (value == name_of(kind)) return kind;
  throw ConfigInvalid(key, "expected fire, air, water or earth, got '" + value + "'", line);
}

DistributionMode parse_mode(const std::string& key, const std::string& value, int line) {
  for (auto mode : {DistributionMode::UniformMixed, DistributionMode::PreStratified, DistributionMode::SingleKind})
    if (value == name_of(mode)) return mode;
  throw ConfigInvalid(key, "expected uniform_mixed, pre_stratified or single_kind, got '" + value + "'", line);
}

using Setter = std::function<void(SimConfig&, const std::string& key, const std::string& value, int line)>;

// "section.key" -> setter. The table is also the list of documented keys.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["grid.n_rho"] = [](SimConfig& c, auto& k, auto& v, int l) { c.n_rho = static_cast<int>(parse_int(k, v, l)); };
    t["grid.n_z"] = [](SimConfig& c, auto& k, auto& v, int l) { c.n_z = static_cast<int>(parse_int(k, v, l)); };
    t["grid.cell_capacity"] = [](SimConfig& c, auto& k, auto& v, int l) { c.cell_capacity = parse_real(k, v, l); };
    t["rotation.radius"] = [](SimConfig& c, auto& k, auto& v, int l) { c.rotation.radius = parse_real(k, v, l); };
    t["rotation.period"] = [](SimConfig& c, auto& k, auto& v, int l) { c.rotation.period = parse_real(k, v, l); };
    t["rotation.pressure_gain"] = [](SimConfig& c, auto& k, auto& v, int l) { c.rotation.pressure_gain = parse_real(k, v, l); };
    t["rotation.earth_co_rotates"] = [](SimConfig& c, auto& k, auto& v, int l) { c.rotation.earth_co_rotates = parse_bool(k, v, l); };
    t["bands.t1"] = [](SimConfig& c, auto& k, auto& v, int l) { c.bands.t1 = parse_real(k, v, l); };
    t["bands.t2"] = [](SimConfig& c, auto& k, auto& v, int l) { c.bands.t2 = parse_real(k, v, l); };
    t["bands.t3"] = [](SimConfig& c, auto& k, auto& v, int l) { c.bands.t3 = parse_real(k, v, l); };
    for (auto kind : kAllKinds) {
      const auto i = index_of(kind);
      t["particles.edge_" + std::string(name_of(kind))] = [i](SimConfig& c, auto& k, auto& v, int l) { c.edge_length[i] = parse_real(k, v, l); };
      t["particles.aperture_" + std::string(name_of(kind))] = [i](SimConfig& c, auto& k, auto& v, int l) { c.aperture[i] = parse_real(k, v, l); };
      t["initial." + std::string(name_of(kind))] = [kind](SimConfig& c, auto& k, auto& v, int l) { c.initial.totals[kind] = parse_int(k, v, l); };
    }
    t["dynamics.envelopment_threshold"] = [](SimConfig& c, auto& k, auto& v, int l) { c.envelopment_threshold = parse_real(k, v, l); };
    t["dynamics.pressure_floor"] = [](SimConfig& c, auto& k, auto& v, int l) { c.pressure_floor = parse_real(k, v, l); };
    t["dynamics.slack_tolerance"] = [](SimConfig& c, auto& k, auto& v, int l) { c.slack_tolerance = parse_real(k, v, l); };
    t["dynamics.max_fixpoint_iters"] = [](SimConfig& c, auto& k, auto& v, int l) { c.max_fixpoint_iters = static_cast<int>(parse_int(k, v, l)); };
    t["dynamics.max_flagged_fraction"] = [](SimConfig& c, auto& k, auto& v, int l) { c.max_flagged_fraction = parse_real(k, v, l); };
    t["dynamics.threads"] = [](SimConfig& c, auto& k, auto& v, int l) { c.threads = static_cast<int>(parse_int(k, v, l)); };
    t["run.seed"] = [](SimConfig& c, auto& k, auto& v, int l) { c.rng_seed = parse_seed(k, v, l); };
    t["initial.mode"] = [](SimConfig& c, auto& k, auto& v, int l) { c.initial.mode = parse_mode(k, v, l); };
    t["initial.kind"] = [](SimConfig& c, auto& k, auto& v, int l) { c.initial.single_kind = parse_kind(k, v, l); };
    return t;
  }();
  return table;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigInvalid(key, what);
}

}  // namespace

std::uint64_t parse_seed(const std::string& key, const std::string& value, int line) {
  std::uint64_t out = 0;
  const bool hex = value.size() > 2 && value[0] == '0' && (value[1] == 'x' || value[1] == 'X');
  const char* begin = value.data() + (hex ? 2 : 0);
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out, hex ? 16 : 10);
  if (ec != std::errc() || ptr != end || begin == end)
    throw ConfigInvalid(key, "expected an unsigned 64-bit integer, got '" + value + "'", line);
  return out;
}

ConfigInvalid::ConfigInvalid(std::string key, const std::string& what, int line)
    : std::invalid_argument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + key + ": " + what),
      key_(std::move(key)),
      line_(line) {}

std::string_view name_of(DistributionMode mode) {
  switch (mode) {
    case DistributionMode::UniformMixed: return "uniform_mixed";
    case DistributionMode::PreStratified: return "pre_stratified";
    case DistributionMode::SingleKind: return "single_kind";
  }
  return "?";
}

void SimConfig::validate() const {
  require(n_rho >= 2 && n_rho <= 4096, "grid.n_rho", "must be in [2, 4096]");
  require(n_z >= 2 && n_z <= 8192, "grid.n_z", "must be in [2, 8192]");
  require(cell_capacity > 0.0 && std::isfinite(cell_capacity), "grid.cell_capacity", "must be positive");
  require(rotation.radius > 0.0 && std::isfinite(rotation.radius), "rotation.radius", "must be positive");
  require(rotation.period > 0.0 && std::isfinite(rotation.period), "rotation.period", "must be positive");
  require(rotation.pressure_gain > 0.0 && std::isfinite(rotation.pressure_gain), "rotation.pressure_gain", "must be positive");
  require(0.0 < bands.t1 && bands.t1 < bands.t2 && bands.t2 < bands.t3 && bands.t3 < 1.0, "bands",
          "thresholds must satisfy 0 < t1 < t2 < t3 < 1");
  for (auto kind : kAllKinds) {
    const auto i = index_of(kind);
    if (!(edge_length[i] > 0.0) || !std::isfinite(edge_length[i]))
      throw ConfigInvalid("particles.edge_" + std::string(name_of(kind)), "must be positive");
    if (!(aperture[i] > 0.0) || !std::isfinite(aperture[i]))
      throw ConfigInvalid("particles.aperture_" + std::string(name_of(kind)), "must be positive");
  }
  require(aperture[index_of(ParticleKind::Earth)] > aperture[index_of(ParticleKind::Water)] &&
              aperture[index_of(ParticleKind::Water)] > aperture[index_of(ParticleKind::Air)] &&
              aperture[index_of(ParticleKind::Air)] > aperture[index_of(ParticleKind::Fire)],
          "particles", "apertures must be ordered earth > water > air > fire");
  require(envelopment_threshold > 0.0 && envelopment_threshold < 1.0, "dynamics.envelopment_threshold", "must lie in (0, 1)");
  require(pressure_floor >= 0.0 && std::isfinite(pressure_floor), "dynamics.pressure_floor", "must be non-negative");
  require(slack_tolerance > 0.0 && slack_tolerance < 1.0, "dynamics.slack_tolerance", "must lie in (0, 1)");
  require(max_fixpoint_iters >= 0, "dynamics.max_fixpoint_iters", "must be non-negative");
  require(max_flagged_fraction >= 0.0 && max_flagged_fraction <= 1.0, "dynamics.max_flagged_fraction", "must lie in [0, 1]");
  require(threads >= 1 && threads <= 256, "dynamics.threads", "must be in [1, 256]");
  for (auto kind : kAllKinds)
    if (initial.totals[kind] < 0) throw ConfigInvalid("initial." + std::string(name_of(kind)), "must be non-negative");
}

SimConfig parse_config(std::string_view text) {
  SimConfig config;
  config.initial.totals = {};
  std::map<std::string, int> seen;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? std::string_view(raw) : std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigInvalid(line, "malformed section header", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      bool known = false;
      for (const auto& [key, _] : setters()) known |= key.rfind(section + ".", 0) == 0;
      if (!known) throw ConfigInvalid(section, "unknown section", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigInvalid(line, "expected key = value", line_no);
    if (section.empty()) throw ConfigInvalid(trim(line.substr(0, eq)), "key outside of any section", line_no);
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigInvalid(key, "unknown key", line_no);
    if (!seen.emplace(key, line_no).second) throw ConfigInvalid(key, "duplicate key", line_no);
    it->second(config, key, value, line_no);
  }
  try {
    config.validate();
  } catch (const ConfigInvalid& e) {
    // Point at the line that set the key, or the first key of a whole section.
    int line = 0;
    for (const auto& [key, at] : seen)
      if (key == e.key() || key.rfind(e.key() + ".", 0) == 0) line = line == 0 ? at : std::min(line, at);
    if (line == 0) throw;
    const std::string what = e.what();
    throw ConfigInvalid(e.key(), what.substr(e.key().size() + 2), line);
  }
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const SimConfig& c) {
  std::ostringstream os;
  os << "[grid]\n"
     << "n_rho = " << c.n_rho << "\n"
     << "n_z = " << c.n_z << "\n"
     << "cell_capacity = " << real(c.cell_capacity) << "\n\n"
     << "[rotation]\n"
     << "radius = " << real(c.rotation.radius) << "\n"
     << "period = " << real(c.rotation.period) << "\n"
     << "pressure_gain = " << real(c.rotation.pressure_gain) << "\n"
     << "earth_co_rotates = " << (c.rotation.earth_co_rotates ? "true" : "false") << "\n\n"
     << "[bands]\n"
     << "t1 = " << real(c.bands.t1) << "\n"
     << "t2 = " << real(c.bands.t2) << "\n"
     << "t3 = " << real(c.bands.t3) << "\n\n"
     << "[particles]\n";
  for (auto kind : kAllKinds) os << "edge_" << name_of(kind) << " = " << real(c.edge_length[index_of(kind)]) << "\n";
  for (auto kind : kAllKinds) os << "aperture_" << name_of(kind) << " = " << real(c.aperture[index_of(kind)]) << "\n";
  os << "\n[dynamics]\n"
     << "envelopment_threshold = " << real(c.envelopment_threshold) << "\n"
     << "pressure_floor = " << real(c.pressure_floor) << "\n"
     << "slack_tolerance = " << real(c.slack_tolerance) << "\n"
     << "max_fixpoint_iters = " << c.max_fixpoint_iters << "\n"
     << "max_flagged_fraction = " << real(c.max_flagged_fraction) << "\n"
     << "threads = " << c.threads << "\n\n"
     << "[run]\n"
     << "seed = " << c.rng_seed << "\n\n"
     << "[initial]\n"
     << "mode = " << name_of(c.initial.mode) << "\n"
     << "kind = " << name_of(c.initial.single_kind) << "\n";
  for (auto kind : kAllKinds) os << name_of(kind) << " = " << c.initial.totals[kind] << "\n";
  return os.str();
}

SimConfig default_config() {
  SimConfig config;
  const auto cells = static_cast<std::int64_t>(CosmosGrid(config).size());
  for (auto kind : kAllKinds) config.initial.totals[kind] = 16 * cells;
  return config;
}

}  // namespace cosmos
