#pragma once

#include <Eigen/Dense>

#include "splitbox/dynamics.hpp"
#include "splitbox/geometry.hpp"
#include "splitbox/observables.hpp"
#include "splitbox/ode.hpp"

namespace splitbox {

// Eigenbasis of the barrier-free box, phi_n(x) = sqrt(2/L) sin(n pi (x + a) / L).
// Shares nothing with the transcendental eigensolver.
struct BareBasis {
  BoxGeometry geometry;
  int size = 0;
  Eigen::VectorXd energies;        // n^2 pi^2 hbar^2 / (2 m L^2)
  Eigen::VectorXd barrier_values;  // phi_n(0), exactly 0 where phi_n has a node at x = 0
  // sum_{n > size} phi_n(0)^2 / E_n, the part of the zero-energy Green's
  // function G(0, 0) = 2 m a b / (hbar^2 L) that the truncated basis misses.
  double tail_weight = 0.0;
};

BareBasis make_bare_basis(const BoxGeometry& geom, int size = 40);

// H_mn = delta_mn E_n + alpha phi_m(0) phi_n(0), real symmetric.
Eigen::MatrixXd bare_hamiltonian(double alpha, const BareBasis& basis);

// Barrier strength for the truncated basis that reproduces the low-lying
// spectrum of the full problem: 1/alpha_eff = 1/alpha + tail_weight.
double renormalized_coupling(double alpha, const BareBasis& basis);

enum class BareCoupling { renormalized, raw };

struct BarePropagation {
  Eigen::VectorXcd amplitudes;
  double norm_deviation = 0.0;
  OdeStats ode;
};

// Integrates i hbar d' = H(alpha(t)) d from 0 to tau.
BarePropagation propagate_bare(const BoxGeometry& geom, const BarrierProtocol& protocol,
                               const BareBasis& basis, const Eigen::VectorXcd& d0,
                               const OdeTolerances& tolerances = {},
                               BareCoupling coupling = BareCoupling::renormalized);

// |<psi_n | Psi>|^2 for every instantaneous level n, using closed-form
// sine-product overlaps between the two bases.
Eigen::VectorXd project_onto_instantaneous(const Eigen::VectorXcd& d, const Spectrum& spectrum,
                                           const BareBasis& basis);

// Compartment probabilities evaluated directly in the bare basis.
SideProbabilities bare_side_probabilities(const Eigen::VectorXcd& d, const BareBasis& basis);

struct OracleReport {
  int n_levels = 0;
  int basis_size = 0;
  double p_larger_evolve = 0.0;
  double p_larger_bare = 0.0;
  Eigen::VectorXd populations_evolve;
  Eigen::VectorXd populations_bare;
  double p_larger_deviation = 0.0;
  double max_population_deviation = 0.0;
  double max_deviation = 0.0;
  // Doubled-basis rerun; negative when not requested.
  double p_larger_bare_doubled = -1.0;
  double doubling_deviation = -1.0;
  double evolve_norm_deviation = 0.0;
  double bare_norm_deviation = 0.0;
  double threshold = 1e-3;
  bool passed = false;
};

// Runs both propagators from the ground state and compares the final
// larger-compartment probability and level populations.
OracleReport oracle_check(const BoxGeometry& geom, const BarrierProtocol& protocol,
                          const EvolveOptions& options, int basis_size = 40,
                          double threshold = 1e-3, bool doubling = false);

}  // namespace splitbox
