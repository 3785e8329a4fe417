#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splitbox/config.hpp"

namespace splitbox {

// Rate constants and asymmetries to scan; every other setting comes from
// `base` (its own epsilon and rate are overridden per cell).
struct SweepSpec {
  std::vector<double> rates;
  std::vector<double> epsilons;
  RunConfig base;
  // Worker threads; 0 picks SPLITBOX_THREADS or the hardware concurrency.
  int threads = 0;
};

struct SweepCell {
  double rate = 0.0;
  double epsilon = 0.0;
  double p_larger = 0.0;
  double p_excite = 0.0;
  Eigen::VectorXd populations;
  double norm_deviation = 0.0;
  double runtime_seconds = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

// Cells are stored epsilon-major: cell(e, r) = cells[e * rates.size() + r],
// so A increases within each epsilon block.
struct SweepGrid {
  std::vector<double> rates;
  std::vector<double> epsilons;
  std::vector<SweepCell> cells;
  std::string config_hash;
  nlohmann::json config;

  const SweepCell& cell(std::size_t epsilon_index, std::size_t rate_index) const {
    return cells[epsilon_index * rates.size() + rate_index];
  }
};

enum class GridFormat { json, csv };

std::vector<double> log_spaced(double first, double last, int count);
std::vector<double> linear_spaced(double first, double last, int count);

// Validates grids (non-empty, strictly increasing, epsilon in [0, 1/2)).
void validate(const SweepSpec& spec);

nlohmann::json sweep_config_json(const SweepSpec& spec);

// Default reconstruction of the rate/asymmetry contour grid: A log-spaced
// over [10, 1e5] with 10 points, epsilon in {0, 0.005, 0.01, 0.02, 0.05, 0.1}.
SweepSpec default_sweep_spec();

// Reads the "sweep" block of a configuration: "A_grid" is either an explicit
// list or {"min", "max", "count", "spacing": "log" | "linear"};
// "epsilon_grid" is a list; "threads" is optional. The rest of the document
// is the base RunConfig.
SweepSpec parse_sweep_spec(const nlohmann::json& j);

// One evolve + observables per cell. Results do not depend on the number of
// threads or the order in which cells finish. Failed cells keep their error
// message; throws all_cells_failed if nothing succeeded.
SweepGrid run_sweep(const SweepSpec& spec);

// Reads SPLITBOX_THREADS, falling back to the hardware concurrency.
int default_thread_count();

void emit_grid(const SweepGrid& grid, GridFormat format, std::ostream& out);
void write_grid(const SweepGrid& grid, GridFormat format, const std::string& path);
SweepGrid load_grid(std::istream& in, GridFormat format);

// Counts of monotonicity violations across the grid.
struct MonotonicityReport {
  int larger_vs_rate = 0;      // P_larger must not increase with A
  int larger_vs_epsilon = 0;   // P_larger must not decrease with epsilon
  int excite_vs_rate = 0;      // P_excite must not decrease with A
  int total() const { return larger_vs_rate + larger_vs_epsilon + excite_vs_rate; }
};

MonotonicityReport check_monotonicity(const SweepGrid& grid, double slack = 1e-8);

}  // namespace splitbox
