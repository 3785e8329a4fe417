#include "doctest.h"

#include <cmath>
#include <complex>

#include "splitbox/error.hpp"
#include "splitbox/ode.hpp"

using namespace splitbox;
using cd = std::complex<double>;

TEST_CASE("exponential decay") {
  DormandPrince<double> dp;
  Eigen::VectorXd y(2);
  y << 1.0, 2.0;
  dp.integrate([](double, const Eigen::VectorXd& v, Eigen::VectorXd& d) { d = -v; }, y, 0.0, 3.0);
  CHECK(y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-7));
  CHECK(y[1] == doctest::Approx(2 * std::exp(-3.0)).epsilon(1e-7));
  CHECK(dp.stats().accepted > 0);
}

TEST_CASE("complex rotation keeps its modulus") {
  DormandPrince<cd> dp;
  Eigen::VectorXcd y(1);
  y[0] = 1.0;
  const double w = 25.0;
  dp.integrate([&](double, const Eigen::VectorXcd& v, Eigen::VectorXcd& d) { d = cd(0, -w) * v; },
               y, 0.0, 4.0);
  CHECK(std::abs(std::abs(y[0]) - 1.0) < 1e-6);
  CHECK(std::abs(y[0] - std::polar(1.0, -w * 4.0)) < 1e-6);
}

TEST_CASE("piecewise calls match one call") {
  auto f = [](double t, const Eigen::VectorXd& v, Eigen::VectorXd& d) {
    d.resize(1);
    d[0] = std::cos(t) * v[0];
  };
  Eigen::VectorXd a = Eigen::VectorXd::Ones(1), b = a;
  DormandPrince<double> one, many;
  one.integrate(f, a, 0.0, 5.0);
  for (int i = 0; i < 10; ++i) many.integrate(f, b, 0.5 * i, 0.5 * (i + 1));
  const double exact = std::exp(std::sin(5.0));
  CHECK(a[0] == doctest::Approx(exact).epsilon(1e-7));
  CHECK(b[0] == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("tighter tolerance is more accurate") {
  auto f = [](double, const Eigen::VectorXd& v, Eigen::VectorXd& d) {
    d.resize(2);
    d[0] = v[1];
    d[1] = -v[0];
  };
  double prev = 1.0;
  for (double rtol : {1e-4, 1e-7, 1e-10}) {
    DormandPrince<double> dp({rtol, rtol * 1e-2, 50'000'000});
    Eigen::VectorXd y(2);
    y << 0.0, 1.0;
    dp.integrate(f, y, 0.0, 10.0);
    const double err = std::abs(y[0] - std::sin(10.0));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("blow-up raises step underflow") {
  DormandPrince<double> dp;
  Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  try {
    dp.integrate([](double, const Eigen::VectorXd& v, Eigen::VectorXd& d) { d = v.cwiseAbs2(); },
                 y, 0.0, 2.0);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::step_underflow);
  }
}
