#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "splitbox/couplings.hpp"
#include "splitbox/eigensolver.hpp"
#include "splitbox/error.hpp"

using namespace splitbox;
using oracle_ref::pi;

TEST_CASE("delta matrix element examples") {
  const BoxGeometry sym = make_geometry(1.0, 0.0);
  for (double alpha : {0.0, 10.0, 1e4}) {
    const Spectrum s = solve_spectrum(alpha, sym, 2);
    CHECK(delta_matrix_element(s[0], s[1], sym) == 0.0);
    CHECK(coupling_ratio(s, 1, 2) == 0.0);
  }
  const Spectrum bare = solve_spectrum(0.0, sym, 1);
  CHECK(delta_matrix_element(bare[0], bare[0], sym) == doctest::Approx(2.0));

  // direct evaluation of the wavefunctions at the barrier
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(4.0 * g.alpha_unit(), g, 2);
  const oracle_ref::Wave w1{s[0].k, s[0].left_amplitude, s[0].right_amplitude, g.a, g.b};
  const oracle_ref::Wave w2{s[1].k, s[1].left_amplitude, s[1].right_amplitude, g.a, g.b};
  const double direct = w1(0.0) * w2(0.0);
  CHECK(direct != 0.0);
  CHECK(delta_matrix_element(s[0], s[1], g) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("bare box ratio in closed form") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(0.0, g, 3);
  const double a = g.a;
  const double expect = 2.0 * std::sin(pi * a) * std::sin(2 * pi * a) / (3.0 * pi * pi / 2.0);
  CHECK(coupling_ratio(s, 1, 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ground to first excited coupling dominates above 4 E0") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  for (int i = 0; i < 100; ++i) {
    const double a_e0 = 4.0 * std::pow(100.0, i / 99.0);
    const Spectrum s = solve_spectrum(a_e0 * g.alpha_unit(), g, 6);
    const double r12 = std::abs(coupling_ratio(s, 1, 2));
    for (int m = 3; m <= 6; ++m) {
      CAPTURE(a_e0);
      CHECK(r12 > std::abs(coupling_ratio(s, 1, m)));
    }
  }
}

TEST_CASE("coupling table invariants") {
  for (double eps : {0.0, 0.02, 0.1, 0.3}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    for (double a_e0 : {0.0, 2.0, 50.0, 800.0}) {
      const Spectrum s = solve_spectrum(a_e0 * g.alpha_unit(), g, 6);
      const CouplingMatrix t = coupling_table(s);
      const Eigen::VectorXd v = s.barrier_values();
      CHECK((t.delta - v * v.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((t.delta - t.delta.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((t.ratio + t.ratio.transpose()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK(t.ratio.diagonal().cwiseAbs().maxCoeff() == 0.0);
      for (int m = 1; m <= 6; ++m) {
        for (int n = 1; n <= 6; ++n) {
          if (m != n) CHECK(t.ratio(m - 1, n - 1) == doctest::Approx(coupling_ratio(s, m, n)));
        }
      }
    }
  }
  const Spectrum two = solve_spectrum(10.0, make_geometry(1.0, 0.0), 2);
  const CouplingMatrix t = coupling_table(two);
  CHECK(t.ratio(0, 1) == 0.0);
  CHECK(t.delta(0, 1) == 0.0);
}

TEST_CASE("couplings decay with alpha") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s0 = solve_spectrum(0.0, g, 6);
  const Spectrum s1 = solve_spectrum(400.0 * g.alpha_unit(), g, 6);
  CHECK(std::abs(delta_matrix_element(s1[0], s1[1], g)) <
        0.05 * std::abs(delta_matrix_element(s0[0], s0[1], g)));

  // higher ratios fall below 1% of their peak by 20 E0 while (1,2) stays larger
  for (int m = 3; m <= 6; ++m) {
    double peak = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const Spectrum s = solve_spectrum(i * 0.1 * g.alpha_unit(), g, 6);
      peak = std::max(peak, std::abs(coupling_ratio(s, 1, m)));
    }
    const Spectrum late = solve_spectrum(20.0 * g.alpha_unit(), g, 6);
    CAPTURE(m);
    if (peak > 0.0) CHECK(std::abs(coupling_ratio(late, 1, m)) < 0.01 * peak);
  }
}

TEST_CASE("scaled ratio") {
  const BoxGeometry g = make_geometry(2.0, 0.1);
  CHECK(scaled_ratio(1.0, g) == doctest::Approx(pi * pi / 8.0 * 2.0));
}

TEST_CASE("coupling errors") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(1.0, g, 3);
  auto kind = [&](int m, int n) {
    try {
      coupling_ratio(s, m, n);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io_failure;
  };
  CHECK(kind(1, 1) == ErrorKind::degenerate_levels);
  CHECK(kind(0, 2) == ErrorKind::dimension_mismatch);
  CHECK(kind(1, 4) == ErrorKind::dimension_mismatch);
}
