#include "splitbox/observables.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "splitbox/error.hpp"

namespace splitbox {

double partial_overlap(const EigenState& sm, const EigenState& sn, Region region,
                       const BoxGeometry& geom) {
  // On the right, sin(k(x - b)) = -sin(k(b - x)); the two signs cancel.
  if (region == Region::left) {
    return sm.left_amplitude * sn.left_amplitude * sine_product_integral(sm.k, sn.k, geom.a);
  }
  return sm.right_amplitude * sn.right_amplitude * sine_product_integral(sm.k, sn.k, geom.b);
}

Eigen::MatrixXd overlap_matrix(const Spectrum& spectrum, Region region) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      out(i, j) = partial_overlap(spectrum[static_cast<std::size_t>(i)],
                                  spectrum[static_cast<std::size_t>(j)], region,
                                  spectrum.geometry);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

SideProbabilities side_probabilities(const StateVector& sv, const Spectrum& spectrum) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  if (sv.c.size() != n || sv.theta.size() != n) {
    throw Error(ErrorKind::dimension_mismatch, "state and spectrum sizes differ");
  }
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = sv.c[i] * std::polar(1.0, sv.theta[i]);

  const std::complex<double> left = v.dot(overlap_matrix(spectrum, Region::left) * v);
  const std::complex<double> right = v.dot(overlap_matrix(spectrum, Region::right) * v);
  const double imag = std::max(std::abs(left.imag()), std::abs(right.imag()));
  if (imag > 1e-6) {
    throw Error(ErrorKind::non_real_probability,
                "compartment probability has imaginary part " + std::to_string(imag));
  }
  return {left.real(), right.real()};
}

double excitation_probability(const StateVector& sv) {
  if (sv.c.size() <= 2) return 0.0;
  return sv.c.tail(sv.c.size() - 2).squaredNorm();
}

ObservableSet observe(const StateVector& sv, const Spectrum& spectrum) {
  const SideProbabilities sides = side_probabilities(sv, spectrum);
  ObservableSet out;
  out.p_left = sides.left;
  out.p_right = sides.right;
  out.p_excite = excitation_probability(sv);
  out.populations = sv.populations();
  return out;
}

}  // namespace splitbox
