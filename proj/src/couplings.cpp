#include "splitbox/couplings.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "splitbox/error.hpp"

namespace splitbox {

namespace {

double checked_gap(double em, double en, int m, int n) {
  const double gap = en - em;
  const double scale = std::max(std::abs(em), std::abs(en));
  if (std::abs(gap) <= 4.0 * std::numeric_limits<double>::epsilon() * scale ||
      std::abs(gap) < std::numeric_limits<double>::min()) {
    throw Error(ErrorKind::degenerate_levels,
                "levels " + std::to_string(m) + " and " + std::to_string(n) + " are degenerate");
  }
  return gap;
}

}  // namespace

double delta_matrix_element(const EigenState& sm, const EigenState& sn, const BoxGeometry& geom) {
  return eigenfunction_at_barrier(sm, geom) * eigenfunction_at_barrier(sn, geom);
}

double coupling_ratio(const Spectrum& spectrum, int m, int n) {
  const int size = static_cast<int>(spectrum.size());
  if (m < 1 || n < 1 || m > size || n > size) {
    throw Error(ErrorKind::dimension_mismatch,
                "level index outside 1.." + std::to_string(size));
  }
  if (m == n) {
    throw Error(ErrorKind::degenerate_levels, "coupling ratio needs two distinct levels");
  }
  const EigenState& sm = spectrum[static_cast<std::size_t>(m - 1)];
  const EigenState& sn = spectrum[static_cast<std::size_t>(n - 1)];
  const double gap = checked_gap(sm.energy, sn.energy, m, n);
  return delta_matrix_element(sm, sn, spectrum.geometry) / gap;
}

CouplingMatrix coupling_table(const Spectrum& spectrum) {
  const Eigen::VectorXd psi0 = spectrum.barrier_values();
  const Eigen::VectorXd energy = spectrum.energies();
  const Eigen::Index n = psi0.size();

  CouplingMatrix out;
  out.alpha = spectrum.alpha;
  out.delta = psi0 * psi0.transpose();
  out.ratio = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double gap = checked_gap(energy[i], energy[j], static_cast<int>(i) + 1,
                                     static_cast<int>(j) + 1);
      out.ratio(i, j) = out.delta(i, j) / gap;
    }
  }
  return out;
}

}  // namespace splitbox
