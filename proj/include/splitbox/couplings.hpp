#pragma once

#include <Eigen/Dense>

#include "splitbox/eigensolver.hpp"

namespace splitbox {

// Matrix elements of the barrier operator between instantaneous eigenstates.
//   delta(m, n) = <psi_m | delta(x) | psi_n> = psi_m(0) psi_n(0)
//   ratio(m, n) = delta(m, n) / (E_n - E_m),  ratio(m, m) = 0
// Multiplying by the barrier rate gives <psi_m|dH/dt|psi_n> / (E_n - E_m).
struct CouplingMatrix {
  double alpha = 0.0;
  Eigen::MatrixXd delta;
  Eigen::MatrixXd ratio;
};

double delta_matrix_element(const EigenState& sm, const EigenState& sn, const BoxGeometry& geom);

// Levels are 1-based. Throws degenerate_levels when E_n and E_m coincide to
// within floating-point resolution.
double coupling_ratio(const Spectrum& spectrum, int m, int n);

CouplingMatrix coupling_table(const Spectrum& spectrum);

// Ratio in units of 1/(E0 L), the scale used for all I/O.
inline double scaled_ratio(double ratio, const BoxGeometry& geom) {
  return ratio * geom.alpha_unit();
}

}  // namespace splitbox
