#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "splitbox/dynamics.hpp"
#include "splitbox/geometry.hpp"
#include "splitbox/ode.hpp"

namespace splitbox {

// Barrier strengths are given in units of E0 * L; everything else is in
// natural units (hbar = m = 1).
struct ProtocolSettings {
  ProtocolKind kind = ProtocolKind::quadratic;
  double rate = 1000.0;    // A for the quadratic ramp
  double slope = 1000.0;   // for the linear ramp
  double alpha_max_in_e0 = 400.0;
  std::vector<double> table_times;
  std::vector<double> table_alpha_in_e0;
};

struct RunConfig {
  double length = 1.0;
  double epsilon = 0.1;
  ProtocolSettings protocol;
  int n_levels = 6;
  OdeTolerances tolerances;
  int samples = 101;
  int basis_size = 40;

  BoxGeometry geometry() const;
  BarrierProtocol make_protocol() const;
  EvolveOptions evolve_options() const;
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
// Reads a JSON file; throws Error(io_failure) or Error(invalid_config).
nlohmann::json read_json_file(const std::string& path);

std::string to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(const std::string& name);

// 64-bit FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace splitbox
