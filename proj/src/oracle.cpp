#include "splitbox/oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "splitbox/error.hpp"

namespace splitbox {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double parity(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

Eigen::VectorXd bare_wavevectors(const BareBasis& basis) {
  return Eigen::VectorXd::LinSpaced(basis.size, 1.0, basis.size) * (kPi / basis.geometry.length);
}

}  // namespace

BareBasis make_bare_basis(const BoxGeometry& geom, int size) {
  if (size < 1) throw Error(ErrorKind::invalid_config, "bare basis size must be positive");
  BareBasis basis;
  basis.geometry = geom;
  basis.size = size;
  basis.energies.resize(size);
  basis.barrier_values.resize(size);

  const double length = geom.length;
  const double amplitude = std::sqrt(2.0 / length);
  const double green = 2.0 * UnitSystem::mass * geom.a * geom.b /
                       (UnitSystem::hbar * UnitSystem::hbar * length);
  double captured = 0.0;
  for (int i = 0; i < size; ++i) {
    const double n = i + 1;
    const double k = n * kPi / length;
    basis.energies[i] = UnitSystem::hbar * UnitSystem::hbar * k * k / (2.0 * UnitSystem::mass);
    const double turns = n * geom.a / length;
    const bool node = std::abs(turns - std::round(turns)) < 1e-12 * std::max(1.0, turns);
    basis.barrier_values[i] = node ? 0.0 : amplitude * std::sin(k * geom.a);
    captured += basis.barrier_values[i] * basis.barrier_values[i] / basis.energies[i];
  }
  basis.tail_weight = std::max(0.0, green - captured);
  return basis;
}

Eigen::MatrixXd bare_hamiltonian(double alpha, const BareBasis& basis) {
  // outer product first so h stays bit-for-bit symmetric
  Eigen::MatrixXd h = basis.barrier_values * basis.barrier_values.transpose();
  h *= alpha;
  h.diagonal() += basis.energies;
  return h;
}

double renormalized_coupling(double alpha, const BareBasis& basis) {
  return alpha / (1.0 + alpha * basis.tail_weight);
}

BarePropagation propagate_bare(const BoxGeometry& geom, const BarrierProtocol& protocol,
                               const BareBasis& basis, const Eigen::VectorXcd& d0,
                               const OdeTolerances& tolerances, BareCoupling coupling) {
  if (d0.size() != basis.size) {
    throw Error(ErrorKind::dimension_mismatch, "initial amplitudes do not match the bare basis");
  }
  if (std::abs(d0.squaredNorm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::invalid_config, "initial amplitudes must be normalized");
  }
  if (geom.a != basis.geometry.a || geom.b != basis.geometry.b) {
    throw Error(ErrorKind::dimension_mismatch, "bare basis was built for another geometry");
  }
  const Eigen::VectorXcd phi = basis.barrier_values.cast<cd>();
  const Eigen::VectorXcd energy = basis.energies.cast<cd>();
  const cd minus_i_over_hbar(0.0, -1.0 / UnitSystem::hbar);

  auto system = [&](double t, const Eigen::VectorXcd& d, Eigen::VectorXcd& dd) {
    const double alpha = protocol.alpha_at(t);
    const double g =
        coupling == BareCoupling::renormalized ? renormalized_coupling(alpha, basis) : alpha;
    const cd projection = phi.dot(d);
    dd = minus_i_over_hbar * (energy.cwiseProduct(d) + (g * projection) * phi);
  };

  BarePropagation out;
  out.amplitudes = d0;
  const double tau = protocol.duration();
  if (tau > 0.0) {
    DormandPrince<cd> stepper(tolerances);
    stepper.integrate(system, out.amplitudes, 0.0, tau);
    out.ode = stepper.stats();
  }
  out.norm_deviation = std::abs(out.amplitudes.squaredNorm() - 1.0);
  return out;
}

Eigen::VectorXd project_onto_instantaneous(const Eigen::VectorXcd& d, const Spectrum& spectrum,
                                           const BareBasis& basis) {
  if (d.size() != basis.size) {
    throw Error(ErrorKind::dimension_mismatch, "amplitudes do not match the bare basis");
  }
  const BoxGeometry& geom = basis.geometry;
  const Eigen::VectorXd q = bare_wavevectors(basis);
  const double amplitude = std::sqrt(2.0 / geom.length);
  const auto levels = static_cast<Eigen::Index>(spectrum.size());

  Eigen::MatrixXd overlap(levels, basis.size);
  for (Eigen::Index n = 0; n < levels; ++n) {
    const EigenState& s = spectrum[static_cast<std::size_t>(n)];
    for (int m = 0; m < basis.size; ++m) {
      overlap(n, m) =
          amplitude * (s.left_amplitude * sine_product_integral(s.k, q[m], geom.a) +
                       parity(m + 1) * s.right_amplitude * sine_product_integral(s.k, q[m], geom.b));
    }
  }
  return (overlap.cast<cd>() * d).cwiseAbs2();
}

SideProbabilities bare_side_probabilities(const Eigen::VectorXcd& d, const BareBasis& basis) {
  const BoxGeometry& geom = basis.geometry;
  const Eigen::VectorXd q = bare_wavevectors(basis);
  const double scale = 2.0 / geom.length;
  Eigen::MatrixXd left(basis.size, basis.size), right(basis.size, basis.size);
  for (int i = 0; i < basis.size; ++i) {
    for (int j = i; j < basis.size; ++j) {
      left(i, j) = left(j, i) = scale * sine_product_integral(q[i], q[j], geom.a);
      right(i, j) = right(j, i) =
          scale * parity(i + j + 2) * sine_product_integral(q[i], q[j], geom.b);
    }
  }
  const cd pl = d.dot(left.cast<cd>() * d);
  const cd pr = d.dot(right.cast<cd>() * d);
  return {pl.real(), pr.real()};
}

OracleReport oracle_check(const BoxGeometry& geom, const BarrierProtocol& protocol,
                          const EvolveOptions& options, int basis_size, double threshold,
                          bool doubling) {
  OracleReport report;
  report.n_levels = options.n_levels;
  report.basis_size = basis_size;
  report.threshold = threshold;

  const TrajectoryRecord record = evolve(geom, protocol, options);
  const TrajectorySample& last = record.final_sample();
  report.p_larger_evolve = side_probabilities(last.state, last.spectrum).left;
  report.populations_evolve = last.state.populations();
  report.evolve_norm_deviation = record.final_norm_deviation;

  auto run_bare = [&](int size) {
    const BareBasis basis = make_bare_basis(geom, size);
    Eigen::VectorXcd d0 = Eigen::VectorXcd::Zero(size);
    d0[0] = 1.0;
    return std::pair{basis, propagate_bare(geom, protocol, basis, d0, options.tolerances)};
  };

  const auto [basis, bare] = run_bare(basis_size);
  report.p_larger_bare = bare_side_probabilities(bare.amplitudes, basis).left;
  report.populations_bare = project_onto_instantaneous(bare.amplitudes, last.spectrum, basis);
  report.bare_norm_deviation = bare.norm_deviation;

  report.p_larger_deviation = std::abs(report.p_larger_evolve - report.p_larger_bare);
  report.max_population_deviation =
      (report.populations_evolve - report.populations_bare).cwiseAbs().maxCoeff();
  report.max_deviation = std::max(report.p_larger_deviation, report.max_population_deviation);

  if (doubling) {
    const auto [wide_basis, wide] = run_bare(2 * basis_size);
    report.p_larger_bare_doubled = bare_side_probabilities(wide.amplitudes, wide_basis).left;
    report.doubling_deviation = std::abs(report.p_larger_bare_doubled - report.p_larger_bare);
  }
  report.passed = report.max_deviation <= threshold;
  return report;
}

}  // namespace splitbox
