#pragma once

#include <numbers>
#include <vector>

namespace splitbox {

// Natural units: hbar = m = 1. Formulas keep the constants explicit so the
// dimensions stay readable.
struct UnitSystem {
  static constexpr double hbar = 1.0;
  static constexpr double mass = 1.0;

  // Ground-state energy of the barrier-free box of total width L.
  static constexpr double ground_energy(double length) {
    return std::numbers::pi * std::numbers::pi * hbar * hbar /
           (2.0 * mass * length * length);
  }

  // Scale that converts a barrier strength in natural units to E0*L units.
  static constexpr double alpha_unit(double length) {
    return ground_energy(length) * length;
  }
};

// Box on [-a, b] with the barrier at x = 0. The left compartment is always the
// larger one (a >= b); a negative asymmetry is folded in by mirroring.
struct BoxGeometry {
  double a = 0.5;
  double b = 0.5;
  double length = 1.0;
  double epsilon = 0.0;
  bool mirrored = false;

  double ground_energy() const { return UnitSystem::ground_energy(length); }
  double alpha_unit() const { return UnitSystem::alpha_unit(length); }
};

// a = L(1/2 + |eps|), b = L(1/2 - |eps|). Throws invalid_length for L <= 0 and
// invalid_asymmetry for |eps| >= 1/2.
BoxGeometry make_geometry(double length, double epsilon);

enum class ProtocolKind { quadratic, linear, table };

// Barrier strength alpha(t) on [0, tau], alpha(0) = 0, non-decreasing.
// All strengths are in natural units.
class BarrierProtocol {
 public:
  // alpha(t) = rate * t^2, tau = sqrt(alpha_max / rate).
  static BarrierProtocol quadratic(double rate, double alpha_max);
  // alpha(t) = slope * t, tau = alpha_max / slope.
  static BarrierProtocol linear(double slope, double alpha_max);
  // Piecewise-linear interpolation through (times[i], alphas[i]); times must
  // start at 0 and increase strictly, alphas must start at 0 and never decrease.
  static BarrierProtocol table(std::vector<double> times, std::vector<double> alphas);

  ProtocolKind kind() const { return kind_; }
  double rate() const { return rate_; }
  double duration() const { return duration_; }
  double alpha_max() const { return alpha_max_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& alphas() const { return alphas_; }

  double alpha_at(double t) const;
  double rate_at(double t) const;

 private:
  BarrierProtocol() = default;

  double clamp_time(double t) const;
  double interpolate(double t) const;

  ProtocolKind kind_ = ProtocolKind::quadratic;
  double rate_ = 0.0;
  double duration_ = 0.0;
  double alpha_max_ = 0.0;
  std::vector<double> times_;
  std::vector<double> alphas_;
};

inline double alpha_at(const BarrierProtocol& protocol, double t) {
  return protocol.alpha_at(t);
}

inline double alpha_rate_at(const BarrierProtocol& protocol, double t) {
  return protocol.rate_at(t);
}

}  // namespace splitbox
