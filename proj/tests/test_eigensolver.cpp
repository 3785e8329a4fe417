#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "splitbox/eigensolver.hpp"
#include "splitbox/error.hpp"

using namespace splitbox;
using oracle_ref::pi;

namespace {

oracle_ref::Wave wave(const EigenState& s, const BoxGeometry& g) {
  return {s.k, s.left_amplitude, s.right_amplitude, g.a, g.b};
}

double in_e0(double alpha_e0, const BoxGeometry& g) { return alpha_e0 * g.alpha_unit(); }

}  // namespace

TEST_CASE("characteristic examples") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(characteristic(n * pi, 0.0, g)) < 1e-13);
  const BoxGeometry sym = make_geometry(1.0, 0.0);
  for (double alpha : {0.0, 3.0, 500.0, 1e5}) {
    for (int n = 1; n <= 4; ++n) {
      CHECK(std::abs(characteristic(2 * n * pi, alpha, sym)) < 1e-12 * (1 + alpha));
    }
  }
  // sign change around the perturbed ground state, located by a dense scan
  const double k1 = oracle_ref::scan_roots(10.0, g.a, g.b, 1)[0];
  CHECK(k1 > pi);
  CHECK(k1 < 2 * pi);
  CHECK(characteristic(k1 - 1e-6, 10.0, g) * characteristic(k1 + 1e-6, 10.0, g) < 0.0);
  CHECK(characteristic(pi, 10.0, g) * characteristic(1.99 * pi, 10.0, g) < 0.0);
}

TEST_CASE("roots agree with an independent dense scan") {
  for (double eps : {0.03, 0.1, 0.27}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    for (double a_e0 : {0.0, 0.5, 4.0, 40.0, 400.0}) {
      const Spectrum s = solve_spectrum(in_e0(a_e0, g), g, 6);
      const auto ref = oracle_ref::scan_roots(in_e0(a_e0, g), g.a, g.b, 6);
      for (std::size_t i = 0; i < 6; ++i) {
        CAPTURE(eps);
        CAPTURE(a_e0);
        CAPTURE(i);
        CHECK(s[i].k == doctest::Approx(ref[i]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("bare box spectrum") {
  for (double eps : {0.0, 0.05, 0.1, 0.3, -0.2}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    const Spectrum s = solve_spectrum(0.0, g, 8);
    for (int n = 1; n <= 8; ++n) {
      CHECK(s[n - 1].n == n);
      CHECK(std::abs(s[n - 1].k - n * pi) < 1e-12 * n * pi);
      CHECK(std::abs(s[n - 1].energy - n * n * pi * pi / 2) < 1e-11 * n * n * pi * pi);
    }
  }
}

TEST_CASE("hard wall limit") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(in_e0(1e6, g), g, 6);
  const auto ref = oracle_ref::hard_wall_energies(0.6, 0.4, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(s[i].energy - ref[i]) / ref[i] < 1e-3);
  }
}

TEST_CASE("level pairing at 400 E0") {
  double prev_gap = 0.0;
  for (double eps : {0.01, 0.02, 0.05, 0.1}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    const Spectrum s = solve_spectrum(in_e0(400.0, g), g, 2);
    const double gap = s[1].energy - s[0].energy;
    CHECK(gap > 0.0);
    CHECK(gap > prev_gap);
    prev_gap = gap;
  }
}

// The gap falls from the bare value, bottoms out, then creeps up to the
// hard-wall value E0 (1/b^2 - 1/a^2) from below: the smaller compartment's
// level carries the larger 1/alpha correction.
TEST_CASE("gap versus alpha") {
  for (double eps : {0.01, 0.05}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    const double e0 = g.ground_energy();
    const double limit = e0 * (1.0 / (g.b * g.b) - 1.0 / (g.a * g.a));
    Spectrum prev = solve_spectrum(0.0, g, 2);
    bool rising = false;
    for (int i = 1; i <= 400; ++i) {
      const double a_e0 = std::pow(10.0, -1.0 + 6.0 * i / 400.0);
      const Spectrum s = solve_spectrum(in_e0(a_e0, g), g, 2, prev);
      const double gap = s[1].energy - s[0].energy;
      const double before = prev[1].energy - prev[0].energy;
      if (gap > before) rising = true;
      CAPTURE(a_e0);
      CHECK(gap > 0.0);
      if (rising) CHECK(gap >= before);  // a single minimum
      if (a_e0 > 100.0) CHECK(gap < limit);
      prev = s;
    }
    CHECK(rising);
    CHECK(prev[1].energy - prev[0].energy == doctest::Approx(limit).epsilon(1e-4));
  }
  // symmetric box: the gap closes monotonically
  const BoxGeometry sym = make_geometry(1.0, 0.0);
  Spectrum prev = solve_spectrum(0.0, sym, 2);
  for (int i = 1; i <= 100; ++i) {
    const Spectrum s = solve_spectrum(in_e0(10.0 * i, sym), sym, 2, prev);
    CHECK(s[1].energy - s[0].energy < prev[1].energy - prev[0].energy);
    prev = s;
  }
}

TEST_CASE("residual, continuity, normalization, orthonormality") {
  for (double eps : {0.0, 0.01, 0.1, 0.25}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    for (double a_e0 : {0.0, 1.0, 30.0, 400.0, 1e4}) {
      const Spectrum s = solve_spectrum(in_e0(a_e0, g), g, 6);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const EigenState& st = s[i];
        CHECK(scaled_residual(st.k, s.alpha, g) < 1e-9);
        CHECK(st.left_amplitude * std::sin(st.k * g.a) ==
              doctest::Approx(-st.right_amplitude * std::sin(st.k * g.b)).scale(1.0).epsilon(1e-10));
        CHECK(st.energy == doctest::Approx(st.k * st.k / 2).epsilon(1e-15));
        if (i > 0) CHECK(st.k > s[i - 1].k);
        CHECK((st.left_amplitude > 0.0 || (st.left_amplitude == 0.0 && st.right_amplitude > 0.0)));
      }
      for (std::size_t m = 0; m < s.size(); ++m) {
        for (std::size_t n = m; n < s.size(); ++n) {
          const double o = oracle_ref::overlap(wave(s[m], g), wave(s[n], g), -g.a, g.b);
          CAPTURE(eps);
          CAPTURE(a_e0);
          CHECK(std::abs(o - (m == n ? 1.0 : 0.0)) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("jump condition") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  for (double a_e0 : {1.0, 10.0, 100.0}) {
    const Spectrum s = solve_spectrum(in_e0(a_e0, g), g, 6);
    for (const EigenState& st : s.states) {
      if (st.node) continue;
      const oracle_ref::Wave w = wave(st, g);
      const double jump = oracle_ref::derivative_right(w) - oracle_ref::derivative_left(w);
      const double expect = 2.0 * s.alpha * w(0.0);
      CHECK(std::abs(jump - expect) < 1e-6 * std::abs(expect));
    }
  }
}

// A rank-one barrier shifts levels up but never past the next bare level,
// so no level is created or lost: n pi <= k_n <= (n + 1) pi.
TEST_CASE("levels interlace with the bare box") {
  for (double eps : {0.0, 0.1, 0.2}) {
    const BoxGeometry g = make_geometry(1.0, eps);
    for (double a_e0 : {0.0, 10.0, 1000.0, 1e6}) {
      const Spectrum s = solve_spectrum(in_e0(a_e0, g), g, 12);
      for (const EigenState& st : s.states) {
        CHECK(st.k >= st.n * pi * (1 - 1e-14));
        CHECK(st.k <= (st.n + 1) * pi * (1 + 1e-14));
      }
    }
  }
}

TEST_CASE("normalize examples") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Amplitudes bare = normalize(pi, 0.0, g);
  CHECK(std::abs(bare.left) == doctest::Approx(std::sqrt(2.0)));
  CHECK(bare.right == doctest::Approx(-bare.left));

  const BoxGeometry sym = make_geometry(1.0, 0.0);
  for (double alpha : {0.0, 7.0, 1e4}) {
    const Amplitudes node = normalize(2 * pi, alpha, sym);
    CHECK(node.left == doctest::Approx(std::sqrt(2.0)));
    CHECK(node.right == doctest::Approx(std::sqrt(2.0)));
  }

  const Spectrum s = solve_spectrum(in_e0(400.0, g), g, 2);
  CHECK(std::abs(s[0].left_amplitude) == doctest::Approx(std::sqrt(2.0 / 0.6)).epsilon(1e-3));
  CHECK(std::abs(s[0].right_amplitude) < 0.05);
  const double larger = oracle_ref::overlap(wave(s[0], g), wave(s[0], g), -g.a, 0.0);
  CHECK(larger > 0.999);
}

TEST_CASE("eigenfunction at barrier") {
  const BoxGeometry sym = make_geometry(1.0, 0.0);
  for (double alpha : {0.0, 50.0, 5000.0}) {
    const Spectrum s = solve_spectrum(alpha, sym, 6);
    CHECK(eigenfunction_at_barrier(s[1], sym) == 0.0);
    CHECK(eigenfunction_at_barrier(s[3], sym) == 0.0);
    CHECK(s[1].node);
  }
  const Spectrum bare = solve_spectrum(0.0, sym, 1);
  CHECK(eigenfunction_at_barrier(bare[0], sym) == doctest::Approx(std::sqrt(2.0)));

  const BoxGeometry g = make_geometry(1.0, 0.1);
  const Spectrum s = solve_spectrum(in_e0(400.0, g), g, 1);
  const double at_zero = eigenfunction_at_barrier(s[0], g);
  CHECK(std::abs(at_zero) < 0.05);
  CHECK(at_zero == doctest::Approx(eigenfunction(s[0], g, 0.0)));
  CHECK(at_zero == doctest::Approx(wave(s[0], g)(1e-12)).epsilon(1e-6));
}

TEST_CASE("coincident pole at eps = 0.1 is a node state") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  for (double a_e0 : {0.0, 400.0}) {
    const Spectrum s = solve_spectrum(in_e0(a_e0, g), g, 6);
    CHECK(s[4].node);
    CHECK(s[4].k == doctest::Approx(5 * pi).epsilon(1e-14));
  }
}

TEST_CASE("warm start matches cold start") {
  const BoxGeometry g = make_geometry(1.0, 0.07);
  Spectrum prev = solve_spectrum(0.0, g, 6);
  for (int i = 1; i <= 100; ++i) {
    const double alpha = in_e0(i * 5.0, g);
    const Spectrum warm = solve_spectrum(alpha, g, 6, prev);
    const Spectrum cold = solve_spectrum(alpha, g, 6);
    for (std::size_t n = 0; n < 6; ++n) {
      CHECK(warm[n].k == doctest::Approx(cold[n].k).epsilon(1e-13));
      CHECK(warm[n].k >= prev[n].k);
    }
    prev = warm;
  }
}

TEST_CASE("eigensolver errors") {
  const BoxGeometry g = make_geometry(1.0, 0.1);
  CHECK_THROWS_AS(solve_spectrum(-1.0, g, 3), Error);
  CHECK_THROWS_AS(solve_spectrum(1.0, g, 0), Error);
  CHECK_THROWS_AS(normalize(0.0, 1.0, g), Error);
  try {
    solve_spectrum(std::nan(""), g, 3);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::out_of_range);
  }
}
