#include "splitbox/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "splitbox/error.hpp"
#include "splitbox/observables.hpp"

namespace splitbox {

namespace {

using cd = std::complex<double>;

// Spectrum of the last barrier strength seen, reused when the integrator
// evaluates at the same alpha and chained as warm start otherwise.
class SpectrumCache {
 public:
  SpectrumCache(const BoxGeometry& geom, int n_levels)
      : geom_(geom), n_levels_(n_levels), spectrum_(solve_spectrum(0.0, geom, n_levels)) {
    refresh();
  }

  const Spectrum& at(double alpha) {
    if (std::abs(alpha - spectrum_.alpha) > 1e-14 * std::max(1.0, std::abs(alpha))) {
      spectrum_ = solve_spectrum(alpha, geom_, n_levels_, spectrum_);
      refresh();
    }
    return spectrum_;
  }

  const Eigen::VectorXd& barrier_values() const { return psi0_; }
  const Eigen::VectorXd& energies() const { return energy_; }
  std::size_t solves() const { return solves_; }

 private:
  void refresh() {
    psi0_ = spectrum_.barrier_values();
    energy_ = spectrum_.energies();
    ++solves_;
  }

  BoxGeometry geom_;
  int n_levels_;
  Spectrum spectrum_;
  Eigen::VectorXd psi0_;
  Eigen::VectorXd energy_;
  std::size_t solves_ = 0;
};

// Coefficient derivative from barrier values, energies, coefficients and phases.
template <typename CoeffIn, typename PhaseIn, typename CoeffOut>
void coefficient_rate(const Eigen::VectorXd& psi0, const Eigen::VectorXd& energy,
                      const CoeffIn& c, const PhaseIn& theta, double alpha_rate,
                      CoeffOut&& dc) {
  const Eigen::Index n = psi0.size();
  if (alpha_rate == 0.0) {
    dc.setZero();
    return;
  }
  Eigen::VectorXcd weighted(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    weighted[j] = psi0[j] * c[j] * std::polar(1.0, static_cast<double>(theta[j]));
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    cd sum = 0.0;
    if (psi0[m] != 0.0) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == m || psi0[j] == 0.0) continue;
        sum += weighted[j] / (energy[j] - energy[m]);
      }
    }
    dc[m] = -alpha_rate * psi0[m] * std::polar(1.0, -static_cast<double>(theta[m])) * sum;
  }
}

void check_normalized(const Eigen::VectorXcd& c0) {
  const double norm = c0.squaredNorm();
  if (std::abs(norm - 1.0) > 1e-10) {
    throw Error(ErrorKind::invalid_config,
                "initial coefficients must be normalized, |c|^2 = " + std::to_string(norm));
  }
}

}  // namespace

StateDerivative rhs(const StateVector& sv, const Spectrum& spectrum, double alpha_rate) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  if (sv.c.size() != n || sv.theta.size() != n) {
    throw Error(ErrorKind::dimension_mismatch,
                "state has " + std::to_string(sv.c.size()) + " coefficients but the spectrum has " +
                    std::to_string(n) + " levels");
  }
  StateDerivative out;
  out.dc.resize(n);
  coefficient_rate(spectrum.barrier_values(), spectrum.energies(), sv.c, sv.theta, alpha_rate,
                   out.dc);
  out.dtheta = -spectrum.energies() / UnitSystem::hbar;
  return out;
}

Eigen::VectorXcd ground_state_coefficients(int n_levels) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_levels);
  c[0] = 1.0;
  return c;
}

TrajectoryRecord evolve(const BoxGeometry& geom, const BarrierProtocol& protocol,
                        const EvolveOptions& options) {
  return evolve(geom, protocol, options, ground_state_coefficients(options.n_levels));
}

TrajectoryRecord evolve(const BoxGeometry& geom, const BarrierProtocol& protocol,
                        const EvolveOptions& options, const Eigen::VectorXcd& c0) {
  const int n_levels = options.n_levels;
  if (n_levels < 2) {
    throw Error(ErrorKind::invalid_config, "evolve needs at least two levels");
  }
  if (c0.size() != n_levels) {
    throw Error(ErrorKind::dimension_mismatch,
                "initial state has " + std::to_string(c0.size()) + " coefficients, expected " +
                    std::to_string(n_levels));
  }
  if (options.samples < 2) {
    throw Error(ErrorKind::invalid_config, "at least two samples are required");
  }
  check_normalized(c0);

  const Eigen::Index n = n_levels;
  SpectrumCache cache(geom, n_levels);

  // Packed real state: [Re c, Im c, theta].
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3 * n);
  y.segment(0, n) = c0.real();
  y.segment(n, n) = c0.imag();

  auto system = [&](double t, const Eigen::VectorXd& state, Eigen::VectorXd& dydt) {
    const double alpha = protocol.alpha_at(t);
    cache.at(alpha);
    const Eigen::VectorXcd c =
        state.segment(0, n).cast<cd>() + cd(0.0, 1.0) * state.segment(n, n).cast<cd>();
    Eigen::VectorXcd dc(n);
    coefficient_rate(cache.barrier_values(), cache.energies(), c, state.segment(2 * n, n),
                     protocol.rate_at(t), dc);
    dydt.segment(0, n) = dc.real();
    dydt.segment(n, n) = dc.imag();
    dydt.segment(2 * n, n) = -cache.energies() / UnitSystem::hbar;
  };

  TrajectoryRecord record;
  auto capture = [&](double t) {
    TrajectorySample sample;
    sample.state.t = t;
    sample.state.alpha = protocol.alpha_at(t);
    sample.state.c =
        y.segment(0, n).cast<cd>() + cd(0.0, 1.0) * y.segment(n, n).cast<cd>();
    sample.state.theta = y.segment(2 * n, n);
    sample.spectrum = cache.at(sample.state.alpha);
    const double deviation = std::abs(sample.state.norm_squared() - 1.0);
    record.max_norm_deviation = std::max(record.max_norm_deviation, deviation);
    record.final_norm_deviation = deviation;
    record.samples.push_back(std::move(sample));
  };

  const double tau = protocol.duration();
  capture(0.0);
  if (tau > 0.0) {
    DormandPrince<double> stepper(options.tolerances);
    const int intervals = options.samples - 1;
    double t_prev = 0.0;
    for (int i = 1; i <= intervals; ++i) {
      const double t_next = i == intervals ? tau : tau * static_cast<double>(i) / intervals;
      stepper.integrate(system, y, t_prev, t_next);
      capture(t_next);
      t_prev = t_next;
    }
    record.ode = stepper.stats();
  }
  record.spectrum_solves = cache.solves();
  return record;
}

ConvergenceReport convergence_check(const TrajectoryRecord& record, const BoxGeometry& geom,
                                    const BarrierProtocol& protocol,
                                    const EvolveOptions& options, double threshold) {
  const StateVector& initial = record.samples.front().state;
  const auto n = initial.c.size();

  EvolveOptions wider = options;
  wider.n_levels = static_cast<int>(n) + 2;
  Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(n + 2);
  c0.head(n) = initial.c;
  const TrajectoryRecord reference = evolve(geom, protocol, wider, c0);

  ConvergenceReport report;
  report.n_levels = static_cast<int>(n);
  report.reference_levels = wider.n_levels;
  report.threshold = threshold;

  const Eigen::VectorXd base = record.final_state().populations();
  const Eigen::VectorXd ref = reference.final_state().populations();
  report.max_population_deviation = (base - ref.head(n)).cwiseAbs().maxCoeff();

  const double larger = side_probabilities(record.final_state(), record.final_sample().spectrum).left;
  const double larger_ref =
      side_probabilities(reference.final_state(), reference.final_sample().spectrum).left;
  report.larger_side_deviation = std::abs(larger - larger_ref);
  report.converged = report.max_population_deviation <= threshold;
  return report;
}

}  // namespace splitbox
