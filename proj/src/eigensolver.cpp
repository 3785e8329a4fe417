#include "splitbox/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "splitbox/error.hpp"

namespace splitbox {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Poles closer than this (relative) are treated as one coincident pole.
constexpr double kCoincidenceTolerance = 1e-12;
// Both sines below this mark a node state in normalize().
constexpr double kNodeTolerance = 1e-10;

double barrier_coupling(double alpha) {
  return 2.0 * UnitSystem::mass * alpha / (UnitSystem::hbar * UnitSystem::hbar);
}

// Merged ascending walk over the poles {i pi / a} and {j pi / b}.
class PoleWalk {
 public:
  struct Pole {
    double k;
    bool coincident;
  };

  explicit PoleWalk(const BoxGeometry& geom) : step_a_(kPi / geom.a), step_b_(kPi / geom.b) {}

  Pole next() {
    const double pa = static_cast<double>(i_) * step_a_;
    const double pb = static_cast<double>(j_) * step_b_;
    if (std::abs(pa - pb) <= kCoincidenceTolerance * std::max(pa, pb)) {
      ++i_;
      ++j_;
      return {0.5 * (pa + pb), true};
    }
    if (pa < pb) {
      ++i_;
      return {pa, false};
    }
    ++j_;
    return {pb, false};
  }

 private:
  double step_a_;
  double step_b_;
  long i_ = 1;
  long j_ = 1;
};

// h(k) = cot(ka) + cot(kb) + g/k. Strictly decreasing between consecutive
// poles, from +inf to -inf; same roots as the characteristic function away
// from the poles.
struct Secular {
  double a;
  double b;
  double g;

  void eval(double k, double& h, double& dh) const {
    const double sa = std::sin(k * a), ca = std::cos(k * a);
    const double sb = std::sin(k * b), cb = std::cos(k * b);
    h = ca / sa + cb / sb + g / k;
    dh = -a / (sa * sa) - b / (sb * sb) - g / (k * k);
  }
};

// Safeguarded Newton iteration on (lo, hi), falling back to bisection
// whenever the Newton step leaves the bracket or stalls.
double refine_root(const Secular& fn, double lo, double hi, double guess, int level) {
  double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
  double step_old = hi - lo;
  double step = step_old;
  for (int iter = 0; iter < 300; ++iter) {
    double h = 0.0, dh = 0.0;
    fn.eval(x, h, dh);
    if (!std::isfinite(h) || !std::isfinite(dh)) {
      // Only reachable next to a pole; step back towards the middle.
      x = 0.5 * (lo + hi);
      fn.eval(x, h, dh);
      if (!std::isfinite(h)) break;
    }
    if (h == 0.0) return x;
    if (h > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * kEps * hi) return 0.5 * (lo + hi);

    const double newton = x - h / dh;
    const bool inside = newton > lo && newton < hi;
    if (!inside || std::abs(2.0 * h) > std::abs(step_old * dh)) {
      step_old = step;
      step = 0.5 * (hi - lo);
      x = lo + step;
    } else {
      step_old = step;
      step = newton - x;
      x = newton;
    }
    if (std::abs(step) <= 2.0 * kEps * x) return x;
  }
  throw Error(ErrorKind::bracket_failure,
              "root refinement did not converge for level " + std::to_string(level));
}

void check_inputs(double alpha, int n_levels) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::out_of_range,
                "barrier strength must be finite and non-negative, got " + std::to_string(alpha));
  }
  if (n_levels < 1) {
    throw Error(ErrorKind::invalid_config, "n_levels must be at least 1");
  }
}

Spectrum solve_impl(double alpha, const BoxGeometry& geom, int n_levels, const Spectrum* warm) {
  check_inputs(alpha, n_levels);
  Spectrum spec;
  spec.alpha = alpha;
  spec.geometry = geom;
  spec.states.reserve(static_cast<std::size_t>(n_levels));

  const Secular fn{geom.a, geom.b, barrier_coupling(alpha)};
  PoleWalk poles(geom);

  auto guess_for = [&](std::size_t index) {
    if (warm != nullptr && index < warm->states.size()) return warm->states[index].k;
    return -1.0;
  };

  auto push = [&](double k, bool node) {
    EigenState s;
    s.n = static_cast<int>(spec.states.size()) + 1;
    s.k = k;
    s.energy = UnitSystem::hbar * UnitSystem::hbar * k * k / (2.0 * UnitSystem::mass);
    s.node = node;
    if (node) {
      const double amp = std::sqrt(2.0 / geom.length);
      s.left_amplitude = amp;
      s.right_amplitude = std::copysign(amp, std::cos(k * geom.a) * std::cos(k * geom.b));
    } else {
      const Amplitudes amps = normalize(k, alpha, geom);
      s.left_amplitude = amps.left;
      s.right_amplitude = amps.right;
    }
    spec.states.push_back(s);
  };

  double lo = 0.0;
  while (spec.states.size() < static_cast<std::size_t>(n_levels)) {
    const PoleWalk::Pole pole = poles.next();
    const std::size_t index = spec.states.size();
    const double k = refine_root(fn, lo, pole.k, guess_for(index), static_cast<int>(index) + 1);
    if (!(k > lo && k < pole.k)) {
      throw Error(ErrorKind::bracket_failure,
                  "root for level " + std::to_string(index + 1) + " escaped its bracket");
    }
    push(k, false);
    if (pole.coincident && spec.states.size() < static_cast<std::size_t>(n_levels)) {
      push(pole.k, true);
    }
    lo = pole.k;
  }
  return spec;
}

double half_integral(double k, double width) {
  // int_0^width sin^2(k u) du
  return 0.5 * width - std::sin(2.0 * k * width) / (4.0 * k);
}

}  // namespace

Eigen::VectorXd Spectrum::wavevectors() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) v[static_cast<Eigen::Index>(i)] = states[i].k;
  return v;
}

Eigen::VectorXd Spectrum::energies() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = states[i].energy;
  }
  return v;
}

Eigen::VectorXd Spectrum::barrier_values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = eigenfunction_at_barrier(states[i], geometry);
  }
  return v;
}

double scaled_residual(double k, double alpha, const BoxGeometry& geom) {
  return std::abs(characteristic(k, alpha, geom)) / (1.0 + barrier_coupling(alpha) / k);
}

Spectrum solve_spectrum(double alpha, const BoxGeometry& geom, int n_levels) {
  return solve_impl(alpha, geom, n_levels, nullptr);
}

Spectrum solve_spectrum(double alpha, const BoxGeometry& geom, int n_levels,
                        const Spectrum& warm_start) {
  return solve_impl(alpha, geom, n_levels, &warm_start);
}

Amplitudes normalize(double k, double alpha, const BoxGeometry& geom) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::degenerate_amplitude, "wavevector must be positive and finite");
  }
  const double sa = std::sin(k * geom.a);
  const double sb = std::sin(k * geom.b);
  const double ia = half_integral(k, geom.a);
  const double ib = half_integral(k, geom.b);

  Amplitudes out;
  if (std::abs(sa) < kNodeTolerance && std::abs(sb) < kNodeTolerance) {
    // psi(0) = 0; the derivative jump vanishes, so B cos(kb) = A cos(ka).
    const double ca = std::cos(k * geom.a);
    const double cb = std::cos(k * geom.b);
    const double norm = ia + ib;
    out.left = 1.0 / std::sqrt(norm);
    out.right = out.left * ca / cb;
  } else if (std::abs(sb) >= std::abs(sa)) {
    const double ratio = sa / sb;
    out.left = 1.0 / std::sqrt(ia + ratio * ratio * ib);
    out.right = -out.left * ratio;
  } else {
    const double ratio = sb / sa;
    const double right = 1.0 / std::sqrt(ib + ratio * ratio * ia);
    const double left = -right * ratio;
    const double sign = left < 0.0 ? -1.0 : 1.0;
    out.left = sign * left;
    out.right = sign * right;
  }
  if (!std::isfinite(out.left) || !std::isfinite(out.right)) {
    throw Error(ErrorKind::degenerate_amplitude,
                "amplitudes are not finite at k = " + std::to_string(k) +
                    ", alpha = " + std::to_string(alpha));
  }
  return out;
}

double eigenfunction_at_barrier(const EigenState& state, const BoxGeometry& geom) {
  if (state.node) return 0.0;
  return state.left_amplitude * std::sin(state.k * geom.a);
}

double eigenfunction(const EigenState& state, const BoxGeometry& geom, double x) {
  if (x < -geom.a || x > geom.b) return 0.0;
  if (x <= 0.0) return state.left_amplitude * std::sin(state.k * (x + geom.a));
  return state.right_amplitude * std::sin(state.k * (x - geom.b));
}

}  // namespace splitbox
