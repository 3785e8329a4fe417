#include "splitbox/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "splitbox/config.hpp"
#include "splitbox/couplings.hpp"
#include "splitbox/dynamics.hpp"
#include "splitbox/eigensolver.hpp"
#include "splitbox/error.hpp"
#include "splitbox/observables.hpp"
#include "splitbox/oracle.hpp"
#include "splitbox/sweep.hpp"

namespace splitbox {

namespace {

using nlohmann::json;

// Thrown for bad flag combinations that CLI11 itself cannot detect.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Overrides collected from flags; an option only applies when it was given.
struct RunFlags {
  std::string config_path;
  double length = 1.0;
  double epsilon = 0.0;
  double rate = 0.0;
  double slope = 0.0;
  double alpha_max = 0.0;
  std::string protocol;
  int levels = 0;
  int samples = 0;
  double rtol = 0.0;
  double atol = 0.0;
  CLI::Option* length_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* rate_opt = nullptr;
  CLI::Option* slope_opt = nullptr;
  CLI::Option* alpha_max_opt = nullptr;
  CLI::Option* protocol_opt = nullptr;
  CLI::Option* levels_opt = nullptr;
  CLI::Option* samples_opt = nullptr;
  CLI::Option* rtol_opt = nullptr;
  CLI::Option* atol_opt = nullptr;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_samples) {
  cmd->add_option("--config", f.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  f.length_opt = cmd->add_option("--L", f.length, "box length");
  f.epsilon_opt = cmd->add_option("--epsilon", f.epsilon, "barrier offset, a = L(1/2 + epsilon)");
  f.protocol_opt = cmd->add_option("--protocol", f.protocol, "quadratic | linear")
                       ->check(CLI::IsMember({"quadratic", "linear"}));
  f.rate_opt = cmd->add_option("--A", f.rate, "rate constant of alpha = A t^2");
  f.slope_opt = cmd->add_option("--slope", f.slope, "slope of the linear ramp");
  f.alpha_max_opt = cmd->add_option("--alpha-max", f.alpha_max, "final barrier strength in E0*L");
  f.levels_opt = cmd->add_option("--levels", f.levels, "number of instantaneous levels");
  if (with_samples) f.samples_opt = cmd->add_option("--samples", f.samples, "trajectory samples");
  f.rtol_opt = cmd->add_option("--rtol", f.rtol, "relative tolerance");
  f.atol_opt = cmd->add_option("--atol", f.atol, "absolute tolerance");
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

// Merges flags into the JSON document before validation, so flags and files
// go through the same parser.
json merged_config(const RunFlags& f) {
  json j = f.config_path.empty() ? json::object() : read_json_file(f.config_path);
  if (!j.is_object()) throw Error(ErrorKind::invalid_config, "configuration must be a JSON object");
  if (given(f.length_opt)) j["L"] = f.length;
  if (given(f.epsilon_opt)) j["epsilon"] = f.epsilon;
  if (given(f.levels_opt)) j["n_levels"] = f.levels;
  if (given(f.samples_opt)) j["samples"] = f.samples;
  if (given(f.rtol_opt)) j["tolerances"]["rtol"] = f.rtol;
  if (given(f.atol_opt)) j["tolerances"]["atol"] = f.atol;
  json& p = j["protocol"];
  if (p.is_null()) p = json::object();
  if (given(f.protocol_opt)) p["kind"] = f.protocol;
  if (given(f.rate_opt)) {
    p["A"] = f.rate;
    if (!given(f.protocol_opt) && !p.contains("kind")) p["kind"] = "quadratic";
  }
  if (given(f.slope_opt)) p["slope"] = f.slope;
  if (given(f.alpha_max_opt)) p["alpha_max_in_E0"] = f.alpha_max;
  if (given(f.levels_opt) && !j.contains("basis_size")) {
    j["basis_size"] = std::max(40, 4 * f.levels);
  }
  return j;
}

// Barrier strengths requested for spectrum/couplings, in E0*L units.
struct AlphaFlags {
  std::vector<double> values;
  double min = 0.0;
  double max = 400.0;
  int count = 101;
  std::string spacing = "linear";
  CLI::Option* values_opt = nullptr;
};

void add_alpha_flags(CLI::App* cmd, AlphaFlags& a) {
  a.values_opt = cmd->add_option("--alpha", a.values, "barrier strengths in E0*L (comma list)")
                     ->delimiter(',');
  cmd->add_option("--alpha-min", a.min, "grid start in E0*L")->capture_default_str();
  cmd->add_option("--alpha-max", a.max, "grid end in E0*L")->capture_default_str();
  cmd->add_option("--alpha-count", a.count, "grid points")->capture_default_str();
  cmd->add_option("--alpha-spacing", a.spacing, "linear | log")
      ->check(CLI::IsMember({"linear", "log"}))
      ->capture_default_str();
}

std::vector<double> alpha_grid(const AlphaFlags& a) {
  std::vector<double> grid;
  if (given(a.values_opt)) {
    grid = a.values;
  } else if (a.spacing == "log") {
    grid = log_spaced(a.min, a.max, a.count);
  } else {
    grid = linear_spaced(a.min, a.max, a.count);
  }
  for (double v : grid) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw UsageError("barrier strengths must be finite and non-negative");
    }
  }
  return grid;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void with_output(const std::string& path, std::ostream& out,
                 const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(out);
    out.flush();
    return;
  }
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::io_failure, "cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw Error(ErrorKind::io_failure, "write to '" + path + "' failed");
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Walks the alpha grid in order, warm-starting each solve from the last.
template <typename Visit>
void for_each_spectrum(const std::vector<double>& alphas_in_e0, const BoxGeometry& geom,
                       int levels, Visit&& visit) {
  Spectrum previous;
  bool have_previous = false;
  for (double a : alphas_in_e0) {
    const double alpha = a * geom.alpha_unit();
    Spectrum s = have_previous ? solve_spectrum(alpha, geom, levels, previous)
                               : solve_spectrum(alpha, geom, levels);
    visit(a, s);
    previous = std::move(s);
    have_previous = true;
  }
}

json header_json(const std::string& command, const json& config) {
  return {{"command", command}, {"config", config}, {"config_hash", config_hash(config)}};
}

// spectrum ------------------------------------------------------------------

struct TableFlags {
  double length = 1.0;
  double epsilon = 0.1;
  int levels = 6;
  std::string format = "csv";
  std::string output;
};

void add_table_flags(CLI::App* cmd, TableFlags& t) {
  cmd->add_option("--L", t.length, "box length")->capture_default_str();
  cmd->add_option("--epsilon", t.epsilon, "barrier offset")->capture_default_str();
  cmd->add_option("--levels", t.levels, "number of levels")->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--format", t.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output,-o", t.output, "output file (default stdout)");
}

int run_spectrum(const TableFlags& t, const AlphaFlags& af, std::ostream& out) {
  const BoxGeometry geom = make_geometry(t.length, t.epsilon);
  const std::vector<double> alphas = alpha_grid(af);
  const json config = {{"L", t.length}, {"epsilon", t.epsilon}, {"n_levels", t.levels},
                       {"alpha_in_E0", alphas}};

  json rows = json::array();
  std::ostringstream csv;
  for_each_spectrum(alphas, geom, t.levels, [&](double a, const Spectrum& s) {
    for (const EigenState& st : s.states) {
      rows.push_back({{"alpha", a}, {"n", st.n}, {"k", st.k}, {"E", st.energy},
                      {"A", st.left_amplitude}, {"B", st.right_amplitude}, {"node", st.node}});
      csv << fmt(a) << ',' << st.n << ',' << fmt(st.k) << ',' << fmt(st.energy) << ','
          << fmt(st.left_amplitude) << ',' << fmt(st.right_amplitude) << ',' << (st.node ? 1 : 0)
          << '\n';
    }
  });

  with_output(t.output, out, [&](std::ostream& os) {
    if (t.format == "json") {
      json doc = header_json("spectrum", config);
      doc["units"] = {{"alpha", "E0*L"}, {"k", "1/L"}, {"E", "hbar = m = 1"},
                      {"A", "left amplitude, psi = A sin(k(x + a)) for x < 0"},
                      {"B", "right amplitude, psi = B sin(k(x - b)) for x > 0"}};
      doc["mirrored"] = geom.mirrored;
      doc["rows"] = std::move(rows);
      os << doc.dump(2) << '\n';
    } else {
      os << "# splitbox spectrum config_hash=" << config_hash(config) << '\n'
         << "# config=" << config.dump() << '\n'
         << "alpha,n,k,E,A,B,node\n"
         << csv.str();
    }
  });
  return 0;
}

// couplings -----------------------------------------------------------------

int run_couplings(const TableFlags& t, const AlphaFlags& af, int reference, std::ostream& out) {
  if (reference < 1 || reference > t.levels) {
    throw UsageError("--reference must lie in [1, levels]");
  }
  const BoxGeometry geom = make_geometry(t.length, t.epsilon);
  const std::vector<double> alphas = alpha_grid(af);
  const json config = {{"L", t.length},       {"epsilon", t.epsilon}, {"n_levels", t.levels},
                       {"reference", reference}, {"alpha_in_E0", alphas}};

  json rows = json::array();
  std::ostringstream csv;
  const auto m = static_cast<Eigen::Index>(reference - 1);
  for_each_spectrum(alphas, geom, t.levels, [&](double a, const Spectrum& s) {
    const CouplingMatrix table = coupling_table(s);
    for (Eigen::Index n = 0; n < table.ratio.rows(); ++n) {
      if (n == m) continue;
      const double ratio = table.ratio(m, n);
      const double scaled = scaled_ratio(ratio, geom);
      rows.push_back({{"alpha", a}, {"m", reference}, {"n", n + 1}, {"ratio", scaled},
                      {"ratio_natural", ratio}, {"delta", table.delta(m, n)}});
      csv << fmt(a) << ',' << reference << ',' << n + 1 << ',' << fmt(scaled) << ','
          << fmt(ratio) << ',' << fmt(table.delta(m, n)) << '\n';
    }
  });

  with_output(t.output, out, [&](std::ostream& os) {
    if (t.format == "json") {
      json doc = header_json("couplings", config);
      doc["units"] = {{"alpha", "E0*L"},
                      {"ratio", "psi_m(0) psi_n(0) / (E_n - E_m), times E0*L (dimensionless)"},
                      {"ratio_natural", "same, hbar = m = 1"},
                      {"delta", "psi_m(0) psi_n(0), 1/L"}};
      doc["rows"] = std::move(rows);
      os << doc.dump(2) << '\n';
    } else {
      os << "# splitbox couplings config_hash=" << config_hash(config) << '\n'
         << "# config=" << config.dump() << '\n'
         << "alpha,m,n,ratio,ratio_natural,delta\n"
         << csv.str();
    }
  });
  return 0;
}

// simulate ------------------------------------------------------------------

int run_simulate(const RunFlags& f, const std::string& output, std::ostream& out) {
  const RunConfig cfg = parse_config(merged_config(f));
  const BoxGeometry geom = cfg.geometry();
  const BarrierProtocol protocol = cfg.make_protocol();
  const TrajectoryRecord record = evolve(geom, protocol, cfg.evolve_options());
  const double unit = geom.alpha_unit();

  json samples = json::array();
  for (const TrajectorySample& s : record.samples) {
    const ObservableSet obs = observe(s.state, s.spectrum);
    std::vector<double> phase(static_cast<std::size_t>(s.state.c.size()));
    for (Eigen::Index i = 0; i < s.state.c.size(); ++i) {
      phase[static_cast<std::size_t>(i)] = std::arg(s.state.c[i]);
    }
    // Left/right in the caller's frame; the solver always puts the larger
    // compartment on the left.
    const double left = geom.mirrored ? obs.p_right : obs.p_left;
    const double right = geom.mirrored ? obs.p_left : obs.p_right;
    samples.push_back({{"t", s.state.t},
                       {"alpha", s.state.alpha / unit},
                       {"E", vector_json(s.spectrum.energies())},
                       {"pop", vector_json(obs.populations)},
                       {"arg", phase},
                       {"P_left", left},
                       {"P_right", right},
                       {"P_larger", obs.p_left},
                       {"P_excite", obs.p_excite}});
  }
  const json config = to_json(cfg);
  json doc = header_json("simulate", config);
  doc["units"] = {{"t", "hbar = m = 1"}, {"alpha", "E0*L"}, {"E", "hbar = m = 1"},
                  {"pop", "|c_n|^2"}, {"arg", "arg c_n, dynamical phase excluded"}};
  doc["geometry"] = {{"a", geom.a}, {"b", geom.b}, {"mirrored", geom.mirrored}};
  doc["tau"] = protocol.duration();
  doc["samples"] = std::move(samples);
  doc["norm_deviation"] = record.final_norm_deviation;
  doc["max_norm_deviation"] = record.max_norm_deviation;
  doc["ode"] = {{"accepted", record.ode.accepted},
                {"rejected", record.ode.rejected},
                {"evaluations", record.ode.evaluations}};
  with_output(output, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return 0;
}

// sweep ---------------------------------------------------------------------

struct SweepFlags {
  std::vector<double> rates;
  std::vector<double> epsilons;
  double a_min = 10.0;
  double a_max = 1e5;
  int a_count = 10;
  int threads = 0;
  std::string format = "json";
  std::string output;
  CLI::Option* rates_opt = nullptr;
  CLI::Option* epsilons_opt = nullptr;
  CLI::Option* a_min_opt = nullptr;
  CLI::Option* a_max_opt = nullptr;
  CLI::Option* a_count_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
};

int run_sweep_command(const RunFlags& f, const SweepFlags& s, std::ostream& out) {
  SweepSpec spec = parse_sweep_spec(merged_config(f));
  if (given(s.rates_opt)) {
    spec.rates = s.rates;
  } else if (given(s.a_min_opt) || given(s.a_max_opt) || given(s.a_count_opt)) {
    spec.rates = log_spaced(s.a_min, s.a_max, s.a_count);
  }
  if (given(s.epsilons_opt)) spec.epsilons = s.epsilons;
  if (given(s.threads_opt)) spec.threads = s.threads;
  validate(spec);

  const SweepGrid grid = run_sweep(spec);
  const GridFormat format = s.format == "csv" ? GridFormat::csv : GridFormat::json;
  if (s.output.empty()) {
    emit_grid(grid, format, out);
    return 0;
  }
  write_grid(grid, format, s.output);
  const auto failed = std::count_if(grid.cells.begin(), grid.cells.end(),
                                    [](const SweepCell& c) { return !c.ok(); });
  const json summary = {{"command", "sweep"},
                        {"output", s.output},
                        {"cells", grid.cells.size()},
                        {"failed", failed},
                        {"config_hash", grid.config_hash}};
  out << summary.dump() << '\n';
  return 0;
}

// oracle-check --------------------------------------------------------------

int run_oracle(const RunFlags& f, int basis_size, double threshold, bool doubling,
               const std::string& output, std::ostream& out, std::ostream& err) {
  json j = merged_config(f);
  if (basis_size > 0) j["basis_size"] = basis_size;
  const RunConfig cfg = parse_config(j);
  const OracleReport r = oracle_check(cfg.geometry(), cfg.make_protocol(), cfg.evolve_options(),
                                      cfg.basis_size, threshold, doubling);
  const json config = to_json(cfg);
  json doc = header_json("oracle-check", config);
  doc["threshold"] = r.threshold;
  doc["n_levels"] = r.n_levels;
  doc["basis_size"] = r.basis_size;
  doc["P_larger_evolve"] = r.p_larger_evolve;
  doc["P_larger_bare"] = r.p_larger_bare;
  doc["populations_evolve"] = vector_json(r.populations_evolve);
  doc["populations_bare"] = vector_json(r.populations_bare);
  doc["P_larger_deviation"] = r.p_larger_deviation;
  doc["max_population_deviation"] = r.max_population_deviation;
  doc["max_deviation"] = r.max_deviation;
  if (doubling) {
    doc["P_larger_bare_doubled"] = r.p_larger_bare_doubled;
    doc["doubling_deviation"] = r.doubling_deviation;
  }
  doc["evolve_norm_deviation"] = r.evolve_norm_deviation;
  doc["bare_norm_deviation"] = r.bare_norm_deviation;
  doc["passed"] = r.passed;
  with_output(output, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (r.passed) return 0;
  err << json{{"error", "threshold-exceeded"},
              {"message", "propagators disagree by " + fmt(r.max_deviation) +
                              " (threshold " + fmt(threshold) + ")"},
              {"exit_code", 1}}
             .dump()
      << '\n';
  return 1;
}

bool is_usage_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_config:
    case ErrorKind::invalid_asymmetry:
    case ErrorKind::invalid_length:
    case ErrorKind::invalid_protocol:
      return true;
    default:
      return false;
  }
}

int report(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split-box delta-barrier dynamics", "splitbox"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "splitbox 1.0");

  TableFlags spectrum_flags;
  AlphaFlags spectrum_alpha;
  CLI::App* spectrum = app.add_subcommand("spectrum", "instantaneous eigenstates versus alpha");
  add_table_flags(spectrum, spectrum_flags);
  add_alpha_flags(spectrum, spectrum_alpha);

  TableFlags coupling_flags;
  AlphaFlags coupling_alpha;
  int reference = 1;
  CLI::App* couplings = app.add_subcommand("couplings", "coupling ratios versus alpha");
  add_table_flags(couplings, coupling_flags);
  add_alpha_flags(couplings, coupling_alpha);
  couplings->add_option("--reference,-m", reference, "reference level m")->capture_default_str();

  RunFlags simulate_flags;
  std::string simulate_output;
  CLI::App* simulate = app.add_subcommand("simulate", "single trajectory in the instantaneous basis");
  add_run_flags(simulate, simulate_flags, true);
  simulate->add_option("--output,-o", simulate_output, "output file (default stdout)");

  RunFlags sweep_run;
  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "final observables over an (A, epsilon) grid");
  add_run_flags(sweep, sweep_run, false);
  sweep->remove_option(sweep_run.rate_opt);
  sweep_run.rate_opt = nullptr;
  sweep_flags.rates_opt =
      sweep->add_option("--A-grid", sweep_flags.rates, "explicit rate constants (comma list)")
          ->delimiter(',');
  sweep_flags.a_min_opt = sweep->add_option("--A-min", sweep_flags.a_min, "log grid start");
  sweep_flags.a_max_opt = sweep->add_option("--A-max", sweep_flags.a_max, "log grid end");
  sweep_flags.a_count_opt = sweep->add_option("--A-count", sweep_flags.a_count, "log grid points");
  sweep_flags.epsilons_opt =
      sweep->add_option("--epsilon-grid", sweep_flags.epsilons, "asymmetries (comma list)")
          ->delimiter(',');
  sweep_flags.threads_opt = sweep->add_option(
      "--threads", sweep_flags.threads, "worker threads (default SPLITBOX_THREADS or all cores)");
  sweep->add_option("--format", sweep_flags.format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sweep->add_option("--output,-o", sweep_flags.output, "output file (default stdout)");

  RunFlags oracle_flags;
  int basis_size = 0;
  double threshold = 1e-3;
  bool doubling = false;
  std::string oracle_output;
  CLI::App* oracle = app.add_subcommand("oracle-check", "compare against bare-basis propagation");
  add_run_flags(oracle, oracle_flags, false);
  oracle->add_option("--basis-size", basis_size, "bare basis truncation (default 40)");
  oracle->add_option("--threshold", threshold, "maximum allowed deviation")->capture_default_str();
  oracle->add_flag("--doubling", doubling, "also rerun with twice the bare basis");
  oracle->add_option("--output,-o", oracle_output, "output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    return report(err, "usage", e.what(), 2);
  }

  try {
    if (spectrum->parsed()) return run_spectrum(spectrum_flags, spectrum_alpha, out);
    if (couplings->parsed()) return run_couplings(coupling_flags, coupling_alpha, reference, out);
    if (simulate->parsed()) return run_simulate(simulate_flags, simulate_output, out);
    if (sweep->parsed()) return run_sweep_command(sweep_run, sweep_flags, out);
    if (oracle->parsed()) {
      return run_oracle(oracle_flags, basis_size, threshold, doubling, oracle_output, out, err);
    }
  } catch (const UsageError& e) {
    return report(err, "usage", e.what(), 2);
  } catch (const Error& e) {
    const int code = is_usage_kind(e.kind()) ? 2 : 1;
    return report(err, to_string(e.kind()), e.what(), code);
  } catch (const std::exception& e) {
    return report(err, "internal", e.what(), 1);
  }
  return report(err, "usage", "no subcommand given", 2);
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace splitbox
