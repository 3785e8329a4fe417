#include "doctest.h"

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "splitbox/error.hpp"
#include "splitbox/observables.hpp"

using namespace splitbox;
using cd = std::complex<double>;

namespace {

StateVector make_state(const Spectrum& s, Eigen::VectorXcd c, Eigen::VectorXd theta = {}) {
  StateVector sv;
  sv.alpha = s.alpha;
  if (theta.size() == 0) theta = Eigen::VectorXd::Zero(c.size());
  sv.theta = std::move(theta);
  sv.c = std::move(c);
  return sv;
}

oracle_ref::Wave wave(const EigenState& st, const BoxGeometry& g) {
  return {st.k, st.left_amplitude, st.right_amplitude, g.a, g.b};
}

}  // namespace

TEST_CASE("sine product integral") {
  for (double k1 : {1.0, 3.7, 20.0}) {
    for (double k2 : {1.0, 2.2, 3.7 + 1e-10, 19.0}) {
      const double w = 0.6;
      const double ref = oracle_ref::simpson(
          [&](double x) { return std::sin(k1 * x) * std::sin(k2 * x); }, 0.0, w, 4000);
      CHECK(sine_product_integral(k1, k2, w) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("overlaps against quadrature") {
  for (double eps : {0.0, 0.1, 0.3}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    for (double a_e0 : {0.0, 3.0, 400.0}) {
      const Spectrum s = solve_spectrum(a_e0 * g.alpha_unit(), g, 6);
      const Eigen::MatrixXd left = overlap_matrix(s, Region::left);
      const Eigen::MatrixXd right = overlap_matrix(s, Region::right);
      CHECK((left - left.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((right - right.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
      CHECK((left + right - id).cwiseAbs().maxCoeff() < 1e-10);
      for (std::size_t m = 0; m < 6; ++m) {
        for (std::size_t n = 0; n < 6; ++n) {
          const double ref = oracle_ref::overlap(wave(s[m], g), wave(s[n], g), -g.a, 0.0);
          CHECK(left(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) ==
                doctest::Approx(ref).scale(1.0).epsilon(1e-9));
          CHECK(partial_overlap(s[m], s[n], Region::left, g) ==
                left(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)));
        }
      }
    }
  }
}

TEST_CASE("ground state is localized in the larger compartment") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(400.0 * g.alpha_unit(), g, 2);
  CHECK(partial_overlap(s[0], s[0], Region::left, g) > 0.99);
  const SideProbabilities e2 = side_probabilities(make_state(s, Eigen::Vector2cd(0.0, 1.0)), s);
  CHECK(e2.right > 0.99);
}

TEST_CASE("symmetric ground state splits evenly") {
  const BoxGeometry g = make_geometry(1.0, 0.0);
  for (double alpha : {0.0, 10.0, 1e5}) {
    const Spectrum s = solve_spectrum(alpha, g, 4);
    const SideProbabilities p = side_probabilities(make_state(s, Eigen::Vector4cd(1, 0, 0, 0)), s);
    CHECK(p.left == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.right == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("side probabilities against a grid integral of |Psi|^2") {
  const BoxGeometry g = make_geometry(1.0, 0.15);
  const Spectrum s = solve_spectrum(25.0, g, 4);
  Eigen::VectorXcd c(4);
  c << cd(0.5, 0.1), cd(-0.3, 0.6), cd(0.2, 0.2), cd(0.1, -0.35);
  c.normalize();
  Eigen::VectorXd theta(4);
  theta << -0.3, -1.7, -2.9, -5.5;
  const SideProbabilities p = side_probabilities(make_state(s, c, theta), s);
  auto density = [&](double x) {
    cd psi = 0.0;
    for (int n = 0; n < 4; ++n) {
      psi += c[n] * std::polar(1.0, theta[n]) * wave(s[static_cast<std::size_t>(n)], g)(x);
    }
    return std::norm(psi);
  };
  CHECK(p.left == doctest::Approx(oracle_ref::simpson(density, -g.a, 0.0, 20000)).epsilon(1e-9));
  CHECK(p.right == doctest::Approx(oracle_ref::simpson(density, 0.0, g.b, 20000)).epsilon(1e-9));
  CHECK(p.left + p.right == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("excitation probability") {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(5);
  c[0] = 1.0;
  StateVector sv;
  sv.c = c;
  CHECK(excitation_probability(sv) == 0.0);
  sv.c[0] = sv.c[1] = 1.0 / std::sqrt(2.0);
  CHECK(excitation_probability(sv) == 0.0);
  sv.c << 0.5, 0.5, 0.5, 0.5, 0.0;
  CHECK(excitation_probability(sv) == doctest::Approx(0.5));
}

TEST_CASE("observe bundles everything") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(40.0, g, 3);
  Eigen::VectorXcd c(3);
  c << 0.6, cd(0.0, 0.64), 0.48;
  const ObservableSet o = observe(make_state(s, c), s);
  CHECK(o.populations.sum() == doctest::Approx(1.0));
  CHECK(o.p_excite == doctest::Approx(0.48 * 0.48));
  CHECK(o.p_left + o.p_right == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(o.p_left >= 0.0);
  CHECK(o.p_right >= 0.0);
}

TEST_CASE("observable errors") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(1.0, g, 3);
  try {
    side_probabilities(make_state(s, Eigen::Vector2cd(1, 0)), s);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension_mismatch);
  }
}
