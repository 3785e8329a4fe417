#include "splitbox/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "splitbox/dynamics.hpp"
#include "splitbox/error.hpp"
#include "splitbox/observables.hpp"

namespace splitbox {

namespace {

void check_increasing(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw Error(ErrorKind::invalid_config, std::string(name) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::invalid_config,
                  std::string(name) + " grid must be strictly increasing");
    }
  }
}

SweepCell run_cell(const SweepSpec& spec, double rate, double epsilon) {
  SweepCell cell;
  cell.rate = rate;
  cell.epsilon = epsilon;
  const auto start = std::chrono::steady_clock::now();
  try {
    RunConfig config = spec.base;
    config.epsilon = epsilon;
    config.protocol.kind = ProtocolKind::quadratic;
    config.protocol.rate = rate;
    config.samples = 2;
    const BoxGeometry geom = config.geometry();
    const TrajectoryRecord record = evolve(geom, config.make_protocol(), config.evolve_options());
    const TrajectorySample& last = record.final_sample();
    const ObservableSet obs = observe(last.state, last.spectrum);
    cell.p_larger = obs.p_left;
    cell.p_excite = obs.p_excite;
    cell.populations = obs.populations;
    cell.norm_deviation = record.final_norm_deviation;
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.p_larger = cell.p_excite = std::numeric_limits<double>::quiet_NaN();
    cell.norm_deviation = std::numeric_limits<double>::quiet_NaN();
  }
  cell.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_config, "cannot parse number '" + s + "'");
  }
}

const char* kGridNote =
    "A grid is a configurable reconstruction; the rate axis of the reference contour plot "
    "is not published numerically";

nlohmann::json units_json() {
  return {{"A", "natural units (hbar = m = 1), energy*length/time^2"},
          {"epsilon", "dimensionless, left width a = L (1/2 + epsilon)"},
          {"P_larger", "probability in the larger (left) compartment at t = tau"},
          {"P_excite", "sum of populations of levels n >= 3 at t = tau"},
          {"norm_dev", "| sum |c_n|^2 - 1 | at t = tau"}};
}

void rebuild_axes(SweepGrid& grid) {
  grid.rates.clear();
  grid.epsilons.clear();
  for (const SweepCell& c : grid.cells) {
    if (grid.epsilons.empty() || c.epsilon != grid.epsilons.back()) {
      grid.epsilons.push_back(c.epsilon);
    }
    if (grid.epsilons.size() == 1) grid.rates.push_back(c.rate);
  }
}

}  // namespace

std::vector<double> log_spaced(double first, double last, int count) {
  if (count < 1 || !(first > 0.0) || !(last >= first)) {
    throw Error(ErrorKind::invalid_config, "log-spaced grid needs 0 < first <= last, count >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lo = std::log10(first), hi = std::log10(last);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? first : std::pow(10.0, lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

std::vector<double> linear_spaced(double first, double last, int count) {
  if (count < 1) throw Error(ErrorKind::invalid_config, "grid count must be positive");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? first : first + (last - first) * i / (count - 1);
  }
  return out;
}

void validate(const SweepSpec& spec) {
  check_increasing(spec.rates, "A");
  check_increasing(spec.epsilons, "epsilon");
  for (double r : spec.rates) {
    if (!(r > 0.0)) throw Error(ErrorKind::invalid_config, "rate constants must be positive");
  }
  for (double e : spec.epsilons) {
    if (!(e >= 0.0 && e < 0.5)) {
      throw Error(ErrorKind::invalid_config, "sweep asymmetries must lie in [0, 1/2)");
    }
  }
}

nlohmann::json sweep_config_json(const SweepSpec& spec) {
  nlohmann::json base = to_json(spec.base);
  base.erase("epsilon");
  base["protocol"].erase("A");
  base.erase("samples");
  return {{"base", base}, {"A_grid", spec.rates}, {"epsilon_grid", spec.epsilons}};
}

SweepSpec default_sweep_spec() {
  SweepSpec spec;
  spec.rates = log_spaced(10.0, 1e5, 10);
  spec.epsilons = {0.0, 0.005, 0.01, 0.02, 0.05, 0.1};
  return spec;
}

SweepSpec parse_sweep_spec(const nlohmann::json& j) {
  SweepSpec spec = default_sweep_spec();
  spec.base = parse_config(j);
  if (!j.contains("sweep")) return spec;
  const nlohmann::json& s = j.at("sweep");
  try {
    if (s.contains("A_grid")) {
      const nlohmann::json& a = s.at("A_grid");
      if (a.is_array()) {
        spec.rates = a.get<std::vector<double>>();
      } else {
        const double lo = a.at("min").get<double>();
        const double hi = a.at("max").get<double>();
        const int count = a.at("count").get<int>();
        const std::string spacing = a.value("spacing", "log");
        if (spacing == "log") {
          spec.rates = log_spaced(lo, hi, count);
        } else if (spacing == "linear") {
          spec.rates = linear_spaced(lo, hi, count);
        } else {
          throw Error(ErrorKind::invalid_config, "A_grid spacing must be 'log' or 'linear'");
        }
      }
    }
    if (s.contains("epsilon_grid")) spec.epsilons = s.at("epsilon_grid").get<std::vector<double>>();
    spec.threads = s.value("threads", 0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_config, std::string("bad sweep block: ") + e.what());
  }
  validate(spec);
  return spec;
}

int default_thread_count() {
  if (const char* env = std::getenv("SPLITBOX_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

SweepGrid run_sweep(const SweepSpec& spec) {
  validate(spec);
  SweepGrid grid;
  grid.rates = spec.rates;
  grid.epsilons = spec.epsilons;
  grid.config = sweep_config_json(spec);
  grid.config_hash = config_hash(grid.config);

  const std::size_t total = spec.rates.size() * spec.epsilons.size();
  grid.cells.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t e = i / spec.rates.size();
      const std::size_t r = i % spec.rates.size();
      grid.cells[i] = run_cell(spec, spec.rates[r], spec.epsilons[e]);
    }
  };

  const int requested = spec.threads > 0 ? spec.threads : default_thread_count();
  const auto workers = static_cast<std::size_t>(std::max(1, requested));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(std::min(workers, total));
    for (std::size_t i = 0; i < std::min(workers, total); ++i) pool.emplace_back(worker);
  }

  bool any_ok = false;
  for (const SweepCell& c : grid.cells) any_ok = any_ok || c.ok();
  if (!any_ok) {
    throw Error(ErrorKind::all_cells_failed,
                "every sweep cell failed; first error: " + grid.cells.front().error);
  }
  return grid;
}

void emit_grid(const SweepGrid& grid, GridFormat format, std::ostream& out) {
  if (format == GridFormat::json) {
    nlohmann::json cells = nlohmann::json::array();
    for (const SweepCell& c : grid.cells) {
      nlohmann::json cell = {{"A", c.rate}, {"epsilon", c.epsilon}};
      if (c.ok()) {
        cell["P_larger"] = c.p_larger;
        cell["P_excite"] = c.p_excite;
        cell["norm_dev"] = c.norm_deviation;
        cell["populations"] =
            std::vector<double>(c.populations.data(), c.populations.data() + c.populations.size());
        cell["error"] = nullptr;
      } else {
        cell["P_larger"] = nullptr;
        cell["P_excite"] = nullptr;
        cell["norm_dev"] = nullptr;
        cell["populations"] = nlohmann::json::array();
        cell["error"] = c.error;
      }
      cells.push_back(cell);
    }
    const nlohmann::json doc = {{"format", "splitbox-sweep"},
                                {"version", 1},
                                {"config_hash", grid.config_hash},
                                {"config", grid.config},
                                {"units", units_json()},
                                {"note", kGridNote},
                                {"A_grid", grid.rates},
                                {"epsilon_grid", grid.epsilons},
                                {"cells", cells}};
    out << doc.dump(2) << '\n';
  } else {
    out << "# splitbox sweep\n";
    out << "# config_hash=" << grid.config_hash << '\n';
    out << "# config=" << grid.config.dump() << '\n';
    out << "# units: A in natural units (hbar = m = 1); P_larger is the larger (left) "
           "compartment; P_excite sums levels n >= 3\n";
    out << "# note: " << kGridNote << '\n';
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
      if (!grid.cells[i].ok()) out << "# error cell " << i << ": " << grid.cells[i].error << '\n';
    }
    out << "A,epsilon,P_larger,P_excite,norm_dev\n";
    for (const SweepCell& c : grid.cells) {
      out << format_double(c.rate) << ',' << format_double(c.epsilon) << ','
          << format_double(c.p_larger) << ',' << format_double(c.p_excite) << ','
          << format_double(c.norm_deviation) << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::io_failure, "failed to write sweep grid");
}

void write_grid(const SweepGrid& grid, GridFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_failure, "cannot open '" + path + "' for writing");
  emit_grid(grid, format, out);
}

SweepGrid load_grid(std::istream& in, GridFormat format) {
  SweepGrid grid;
  if (format == GridFormat::json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::invalid_config, std::string("cannot parse sweep grid: ") + e.what());
    }
    grid.config_hash = doc.value("config_hash", "");
    grid.config = doc.value("config", nlohmann::json::object());
    for (const nlohmann::json& j : doc.at("cells")) {
      SweepCell c;
      c.rate = j.at("A").get<double>();
      c.epsilon = j.at("epsilon").get<double>();
      if (j.at("error").is_null()) {
        c.p_larger = j.at("P_larger").get<double>();
        c.p_excite = j.at("P_excite").get<double>();
        c.norm_deviation = j.at("norm_dev").get<double>();
        const auto pops = j.at("populations").get<std::vector<double>>();
        c.populations = Eigen::Map<const Eigen::VectorXd>(pops.data(),
                                                          static_cast<Eigen::Index>(pops.size()));
      } else {
        c.error = j.at("error").get<std::string>();
        c.p_larger = c.p_excite = c.norm_deviation = std::numeric_limits<double>::quiet_NaN();
      }
      grid.cells.push_back(std::move(c));
    }
  } else {
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.front() == '#') {
        const std::string key = "# config_hash=";
        if (line.rfind(key, 0) == 0) grid.config_hash = line.substr(key.size());
        const std::string cfg = "# config=";
        if (line.rfind(cfg, 0) == 0) grid.config = nlohmann::json::parse(line.substr(cfg.size()));
        continue;
      }
      if (!header_seen) {
        header_seen = true;
        continue;
      }
      std::istringstream row(line);
      std::string field;
      std::vector<double> values;
      while (std::getline(row, field, ',')) values.push_back(parse_double(field));
      if (values.size() != 5) {
        throw Error(ErrorKind::invalid_config, "sweep CSV rows need 5 columns: " + line);
      }
      SweepCell c;
      c.rate = values[0];
      c.epsilon = values[1];
      c.p_larger = values[2];
      c.p_excite = values[3];
      c.norm_deviation = values[4];
      if (std::isnan(c.p_larger)) c.error = "failed";
      grid.cells.push_back(std::move(c));
    }
  }
  rebuild_axes(grid);
  return grid;
}

MonotonicityReport check_monotonicity(const SweepGrid& grid, double slack) {
  MonotonicityReport report;
  const std::size_t nr = grid.rates.size(), ne = grid.epsilons.size();
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t r = 0; r + 1 < nr; ++r) {
      const SweepCell& lo = grid.cell(e, r);
      const SweepCell& hi = grid.cell(e, r + 1);
      if (!lo.ok() || !hi.ok()) continue;
      if (hi.p_larger > lo.p_larger + slack) ++report.larger_vs_rate;
      if (hi.p_excite < lo.p_excite - slack) ++report.excite_vs_rate;
    }
  }
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t e = 0; e + 1 < ne; ++e) {
      const SweepCell& lo = grid.cell(e, r);
      const SweepCell& hi = grid.cell(e + 1, r);
      if (!lo.ok() || !hi.ok()) continue;
      if (hi.p_larger < lo.p_larger - slack) ++report.larger_vs_epsilon;
    }
  }
  return report;
}

}  // namespace splitbox
