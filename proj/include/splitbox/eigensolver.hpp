#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "splitbox/geometry.hpp"

namespace splitbox {

// One instantaneous eigenstate of the box with a delta barrier at x = 0:
//   psi(x) = A sin(k (x + a))   on [-a, 0]
//   psi(x) = B sin(k (x - b))   on [0, b]
// A > 0 always. `node` marks states with psi(0) = 0, which exist only when a
// multiple of pi/a coincides with a multiple of pi/b; they do not feel the
// barrier at all.
struct EigenState {
  int n = 0;
  double k = 0.0;
  double energy = 0.0;
  double left_amplitude = 0.0;
  double right_amplitude = 0.0;
  bool node = false;
};

struct Spectrum {
  double alpha = 0.0;
  BoxGeometry geometry;
  std::vector<EigenState> states;

  std::size_t size() const { return states.size(); }
  const EigenState& operator[](std::size_t i) const { return states[i]; }

  Eigen::VectorXd wavevectors() const;
  Eigen::VectorXd energies() const;
  // psi_n(0) for every level.
  Eigen::VectorXd barrier_values() const;
};

struct Amplitudes {
  double left = 0.0;
  double right = 0.0;
};

// f(k) = sin(kL) + (2 m alpha / (k hbar^2)) sin(ka) sin(kb); its positive
// roots are the eigen-wavevectors.
template <typename Scalar>
Scalar characteristic(Scalar k, Scalar alpha, const BoxGeometry& geom) {
  using std::sin;
  const Scalar a = static_cast<Scalar>(geom.a);
  const Scalar b = static_cast<Scalar>(geom.b);
  const Scalar coupling = Scalar(2) * static_cast<Scalar>(UnitSystem::mass) * alpha /
                          (k * static_cast<Scalar>(UnitSystem::hbar * UnitSystem::hbar));
  return sin(k * (a + b)) + coupling * sin(k * a) * sin(k * b);
}

// |f(k)| divided by its natural magnitude 1 + 2 m alpha / (k hbar^2).
double scaled_residual(double k, double alpha, const BoxGeometry& geom);

// The n_levels lowest eigenstates at barrier strength alpha (natural units).
// Roots are bracketed exactly by the interlacing poles of cot(ka) + cot(kb):
// one root lies strictly between consecutive poles, and a coincident pole is
// itself a node-state root. The warm-start overload seeds each refinement with
// the previous wavevector of the same level.
Spectrum solve_spectrum(double alpha, const BoxGeometry& geom, int n_levels);
Spectrum solve_spectrum(double alpha, const BoxGeometry& geom, int n_levels,
                        const Spectrum& warm_start);

// Unit-norm amplitudes for a root k. Uses the A-parameterized closed form when
// |sin kb| >= |sin ka| and the mirrored B-parameterized form otherwise.
Amplitudes normalize(double k, double alpha, const BoxGeometry& geom);

double eigenfunction_at_barrier(const EigenState& state, const BoxGeometry& geom);

// psi(x) for x in [-a, b]; zero outside.
double eigenfunction(const EigenState& state, const BoxGeometry& geom, double x);

}  // namespace splitbox
