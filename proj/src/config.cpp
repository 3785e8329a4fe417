#include "splitbox/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "splitbox/error.hpp"

namespace splitbox {

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_config, std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::quadratic: return "quadratic";
    case ProtocolKind::linear: return "linear";
    case ProtocolKind::table: return "table";
  }
  return "quadratic";
}

ProtocolKind parse_protocol_kind(const std::string& name) {
  if (name == "quadratic") return ProtocolKind::quadratic;
  if (name == "linear") return ProtocolKind::linear;
  if (name == "table" || name == "custom-table") return ProtocolKind::table;
  throw Error(ErrorKind::invalid_config, "unknown protocol kind '" + name + "'");
}

BoxGeometry RunConfig::geometry() const { return make_geometry(length, epsilon); }

BarrierProtocol RunConfig::make_protocol() const {
  const double unit = UnitSystem::alpha_unit(length);
  switch (protocol.kind) {
    case ProtocolKind::quadratic:
      return BarrierProtocol::quadratic(protocol.rate, protocol.alpha_max_in_e0 * unit);
    case ProtocolKind::linear:
      return BarrierProtocol::linear(protocol.slope, protocol.alpha_max_in_e0 * unit);
    case ProtocolKind::table: {
      std::vector<double> alphas = protocol.table_alpha_in_e0;
      for (double& v : alphas) v *= unit;
      return BarrierProtocol::table(protocol.table_times, std::move(alphas));
    }
  }
  throw Error(ErrorKind::invalid_config, "unknown protocol kind");
}

EvolveOptions RunConfig::evolve_options() const {
  EvolveOptions options;
  options.n_levels = n_levels;
  options.tolerances = tolerances;
  options.samples = samples;
  return options;
}

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_config, "configuration must be a JSON object");
  RunConfig c;
  c.length = get_or(j, "L", c.length);
  c.epsilon = get_or(j, "epsilon", c.epsilon);
  c.n_levels = get_or(j, "n_levels", c.n_levels);
  c.samples = get_or(j, "samples", c.samples);
  c.basis_size = get_or(j, "basis_size", c.basis_size);

  if (j.contains("protocol")) {
    const nlohmann::json& p = j.at("protocol");
    if (!p.is_object()) throw Error(ErrorKind::invalid_config, "'protocol' must be an object");
    c.protocol.kind = parse_protocol_kind(get_or<std::string>(p, "kind", "quadratic"));
    c.protocol.rate = get_or(p, "A", c.protocol.rate);
    c.protocol.slope = get_or(p, "slope", c.protocol.slope);
    c.protocol.alpha_max_in_e0 = get_or(p, "alpha_max_in_E0", c.protocol.alpha_max_in_e0);
    if (p.contains("table")) {
      const nlohmann::json& t = p.at("table");
      c.protocol.table_times = get_or(t, "t", std::vector<double>{});
      c.protocol.table_alpha_in_e0 = get_or(t, "alpha_in_E0", std::vector<double>{});
    }
  }
  if (j.contains("tolerances")) {
    const nlohmann::json& t = j.at("tolerances");
    c.tolerances.rtol = get_or(t, "rtol", c.tolerances.rtol);
    c.tolerances.atol = get_or(t, "atol", c.tolerances.atol);
  }

  if (c.n_levels < 2) throw Error(ErrorKind::invalid_config, "n_levels must be at least 2");
  if (c.samples < 2) throw Error(ErrorKind::invalid_config, "samples must be at least 2");
  if (c.basis_size < c.n_levels) {
    throw Error(ErrorKind::invalid_config, "basis_size must be at least n_levels");
  }
  if (!(c.tolerances.rtol > 0.0) || !(c.tolerances.atol > 0.0)) {
    throw Error(ErrorKind::invalid_config, "tolerances must be positive");
  }
  // Validate eagerly so a bad file fails before any work starts.
  c.make_protocol();
  c.geometry();
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json protocol = {{"kind", to_string(c.protocol.kind)},
                             {"alpha_max_in_E0", c.protocol.alpha_max_in_e0}};
  switch (c.protocol.kind) {
    case ProtocolKind::quadratic: protocol["A"] = c.protocol.rate; break;
    case ProtocolKind::linear: protocol["slope"] = c.protocol.slope; break;
    case ProtocolKind::table:
      protocol["table"] = {{"t", c.protocol.table_times},
                           {"alpha_in_E0", c.protocol.table_alpha_in_e0}};
      break;
  }
  return {{"L", c.length},
          {"epsilon", c.epsilon},
          {"protocol", protocol},
          {"n_levels", c.n_levels},
          {"tolerances", {{"rtol", c.tolerances.rtol}, {"atol", c.tolerances.atol}}},
          {"samples", c.samples},
          {"basis_size", c.basis_size}};
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::invalid_config, "cannot parse '" + path + "': " + e.what());
  }
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : j.dump()) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace splitbox
