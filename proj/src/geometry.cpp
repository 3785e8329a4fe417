#include "splitbox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "splitbox/error.hpp"

namespace splitbox {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_asymmetry: return "invalid-asymmetry";
    case ErrorKind::invalid_length: return "invalid-length";
    case ErrorKind::invalid_protocol: return "invalid-protocol";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::bracket_failure: return "bracket-failure";
    case ErrorKind::degenerate_amplitude: return "degenerate-amplitude";
    case ErrorKind::degenerate_levels: return "degenerate-levels";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::step_underflow: return "step-underflow";
    case ErrorKind::non_real_probability: return "non-real-probability";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::all_cells_failed: return "all-cells-failed";
    case ErrorKind::io_failure: return "io-failure";
  }
  return "unknown";
}

BoxGeometry make_geometry(double length, double epsilon) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw Error(ErrorKind::invalid_length,
                "box length must be positive, got " + std::to_string(length));
  }
  if (!(std::abs(epsilon) < 0.5)) {
    throw Error(ErrorKind::invalid_asymmetry,
                "asymmetry must satisfy |epsilon| < 1/2, got " + std::to_string(epsilon));
  }
  BoxGeometry g;
  g.length = length;
  g.epsilon = std::abs(epsilon);
  g.mirrored = epsilon < 0.0;
  g.a = length * (0.5 + g.epsilon);
  g.b = length * (0.5 - g.epsilon);
  return g;
}

BarrierProtocol BarrierProtocol::quadratic(double rate, double alpha_max) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorKind::invalid_protocol, "quadratic protocol needs a positive rate constant");
  }
  if (!(alpha_max >= 0.0) || !std::isfinite(alpha_max)) {
    throw Error(ErrorKind::invalid_protocol, "alpha_max must be finite and non-negative");
  }
  BarrierProtocol p;
  p.kind_ = ProtocolKind::quadratic;
  p.rate_ = rate;
  p.alpha_max_ = alpha_max;
  p.duration_ = std::sqrt(alpha_max / rate);
  return p;
}

BarrierProtocol BarrierProtocol::linear(double slope, double alpha_max) {
  if (!(slope > 0.0) || !std::isfinite(slope)) {
    throw Error(ErrorKind::invalid_protocol, "linear protocol needs a positive slope");
  }
  if (!(alpha_max >= 0.0) || !std::isfinite(alpha_max)) {
    throw Error(ErrorKind::invalid_protocol, "alpha_max must be finite and non-negative");
  }
  BarrierProtocol p;
  p.kind_ = ProtocolKind::linear;
  p.rate_ = slope;
  p.alpha_max_ = alpha_max;
  p.duration_ = alpha_max / slope;
  return p;
}

BarrierProtocol BarrierProtocol::table(std::vector<double> times, std::vector<double> alphas) {
  if (times.size() != alphas.size() || times.size() < 2) {
    throw Error(ErrorKind::invalid_protocol,
                "table protocol needs at least two (t, alpha) pairs of equal length");
  }
  if (times.front() != 0.0 || alphas.front() != 0.0) {
    throw Error(ErrorKind::invalid_protocol, "table protocol must start at t = 0 with alpha = 0");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]) || !std::isfinite(times[i])) {
      throw Error(ErrorKind::invalid_protocol, "table times must increase strictly");
    }
    if (!(alphas[i] >= alphas[i - 1]) || !std::isfinite(alphas[i])) {
      throw Error(ErrorKind::invalid_protocol,
                  "table alphas must be non-decreasing (entry " + std::to_string(i) + ")");
    }
  }
  BarrierProtocol p;
  p.kind_ = ProtocolKind::table;
  p.duration_ = times.back();
  p.alpha_max_ = alphas.back();
  p.times_ = std::move(times);
  p.alphas_ = std::move(alphas);
  return p;
}

double BarrierProtocol::clamp_time(double t) const {
  const double slack = 1e-12 * std::max(1.0, duration_);
  if (!(t >= -slack && t <= duration_ + slack)) {
    throw Error(ErrorKind::out_of_range,
                "time " + std::to_string(t) + " outside [0, " + std::to_string(duration_) + "]");
  }
  return std::clamp(t, 0.0, duration_);
}

double BarrierProtocol::interpolate(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return alphas_.back();
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return alphas_[lo] + w * (alphas_[hi] - alphas_[lo]);
}

double BarrierProtocol::alpha_at(double t) const {
  t = clamp_time(t);
  switch (kind_) {
    case ProtocolKind::quadratic: return rate_ * t * t;
    case ProtocolKind::linear: return rate_ * t;
    case ProtocolKind::table: return interpolate(t);
  }
  return 0.0;
}

double BarrierProtocol::rate_at(double t) const {
  t = clamp_time(t);
  switch (kind_) {
    case ProtocolKind::quadratic: return 2.0 * rate_ * t;
    case ProtocolKind::linear: return rate_;
    case ProtocolKind::table: {
      // Centered difference of the interpolant, one-sided at the ends.
      const double h = 1e-6 * duration_;
      const double lo = std::max(0.0, t - h);
      const double hi = std::min(duration_, t + h);
      return (interpolate(hi) - interpolate(lo)) / (hi - lo);
    }
  }
  return 0.0;
}

}  // namespace splitbox
