#pragma once

#include <Eigen/Dense>

#include "splitbox/dynamics.hpp"
#include "splitbox/eigensolver.hpp"

namespace splitbox {

enum class Region { left, right };

// int_0^width sin(k1 u) sin(k2 u) du, with the k1 -> k2 limit taken analytically.
template <typename Scalar>
Scalar sine_product_integral(Scalar k1, Scalar k2, Scalar width) {
  using std::abs;
  using std::sin;
  const Scalar diff = k1 - k2;
  const Scalar sum = k1 + k2;
  Scalar first;
  if (abs(diff) * width < Scalar(1e-8)) {
    const Scalar x = diff * width;
    first = width * (Scalar(1) - x * x / Scalar(6));
  } else {
    first = sin(diff * width) / diff;
  }
  return Scalar(0.5) * (first - sin(sum * width) / sum);
}

// int psi_m psi_n over [-a, 0] (left) or [0, b] (right).
double partial_overlap(const EigenState& sm, const EigenState& sn, Region region,
                       const BoxGeometry& geom);

// Full N x N overlap matrix over one compartment.
Eigen::MatrixXd overlap_matrix(const Spectrum& spectrum, Region region);

struct SideProbabilities {
  double left = 0.0;
  double right = 0.0;
};

// P_region = sum_{m,n} conj(c_m) c_n e^{i(theta_n - theta_m)} O_mn. The left
// compartment is the larger one. Throws non_real_probability if the imaginary
// part exceeds 1e-6.
SideProbabilities side_probabilities(const StateVector& sv, const Spectrum& spectrum);

// sum_{n >= 3} |c_n|^2
double excitation_probability(const StateVector& sv);

struct ObservableSet {
  double p_left = 0.0;
  double p_right = 0.0;
  double p_excite = 0.0;
  Eigen::VectorXd populations;
};

ObservableSet observe(const StateVector& sv, const Spectrum& spectrum);

}  // namespace splitbox
