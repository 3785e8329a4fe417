#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "splitbox/eigensolver.hpp"
#include "splitbox/geometry.hpp"
#include "splitbox/ode.hpp"

namespace splitbox {

// Psi(t) = sum_n c_n(t) psi_n(t) exp(i theta_n(t)),  theta_n = -(1/hbar) int_0^t E_n.
struct StateVector {
  double t = 0.0;
  Eigen::VectorXcd c;
  Eigen::VectorXd theta;
  double alpha = 0.0;

  double norm_squared() const { return c.squaredNorm(); }
  Eigen::VectorXd populations() const { return c.cwiseAbs2(); }
};

struct StateDerivative {
  Eigen::VectorXcd dc;
  Eigen::VectorXd dtheta;
};

// dc_m/dt = -alpha_rate sum_{n != m} c_n psi_m(0) psi_n(0) / (E_n - E_m) e^{i(theta_n - theta_m)}
// dtheta_n/dt = -E_n / hbar
StateDerivative rhs(const StateVector& sv, const Spectrum& spectrum, double alpha_rate);

struct EvolveOptions {
  int n_levels = 6;
  OdeTolerances tolerances{};
  // Number of recorded samples, evenly spaced over [0, tau], both ends included.
  int samples = 101;
};

struct TrajectorySample {
  StateVector state;
  Spectrum spectrum;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  double final_norm_deviation = 0.0;
  double max_norm_deviation = 0.0;
  OdeStats ode;
  std::size_t spectrum_solves = 0;

  const TrajectorySample& final_sample() const { return samples.back(); }
  const StateVector& final_state() const { return samples.back().state; }
};

// Ground-state initial condition c = e_1.
Eigen::VectorXcd ground_state_coefficients(int n_levels);

TrajectoryRecord evolve(const BoxGeometry& geom, const BarrierProtocol& protocol,
                        const EvolveOptions& options);
TrajectoryRecord evolve(const BoxGeometry& geom, const BarrierProtocol& protocol,
                        const EvolveOptions& options, const Eigen::VectorXcd& c0);

struct ConvergenceReport {
  int n_levels = 0;
  int reference_levels = 0;
  // max_n | |c_n|^2 (N levels) - |c_n|^2 (N + 2 levels) | at t = tau.
  double max_population_deviation = 0.0;
  double larger_side_deviation = 0.0;
  double threshold = 1e-4;
  bool converged = true;
};

// Re-runs the trajectory with two extra levels and compares final populations.
ConvergenceReport convergence_check(const TrajectoryRecord& record, const BoxGeometry& geom,
                                    const BarrierProtocol& protocol,
                                    const EvolveOptions& options, double threshold = 1e-4);

}  // namespace splitbox
