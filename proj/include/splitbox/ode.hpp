#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "splitbox/error.hpp"

namespace splitbox {

struct OdeTolerances {
  double rtol = 1e-8;
  double atol = 1e-10;
  // Hard cap on accepted + rejected steps for one integrate() call.
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

// Dormand-Prince 5(4) with first-same-as-last reuse and the classic
// elementary step-size controller. Error is measured per component as
// |err_i| / (atol + rtol * max(|y_i|, |y_new_i|)) in the RMS norm, so complex
// scalars are controlled on their modulus.
//
// System: callable void(double t, const Vector& y, Vector& dydt).
template <typename Scalar>
class DormandPrince {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit DormandPrince(OdeTolerances tol = {}) : tol_(tol) {}

  const OdeStats& stats() const { return stats_; }
  void reset() { fsal_valid_ = false; step_ = 0.0; }
  double last_step() const { return step_; }

  // Advances y from t0 to exactly t1. The step size and the cached derivative
  // carry over between calls so a caller can integrate sample-to-sample; call
  // reset() if y is modified in between.
  template <typename System>
  void integrate(System&& f, Vector& y, double t0, double t1) {
    if (!(t1 > t0)) return;
    double t = t0;
    if (!fsal_valid_ || last_t_ != t0 || k1_.size() != y.size()) {
      k1_.resize(y.size());
      f(t, y, k1_);
      ++stats_.evaluations;
      fsal_valid_ = true;
    }
    if (!(step_ > 0.0)) step_ = initial_step(f, y, t, t1 - t0);

    std::size_t steps = 0;
    while (t < t1) {
      if (++steps > tol_.max_steps) {
        throw Error(ErrorKind::step_underflow,
                    "step budget exhausted at t = " + std::to_string(t));
      }
      const bool last = t + step_ >= t1;
      const double h = last ? t1 - t : step_;
      if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
        throw Error(ErrorKind::step_underflow,
                    "step size underflow at t = " + std::to_string(t));
      }
      const double err = attempt(f, y, t, h);
      if (err <= 1.0) {
        t = last ? t1 : t + h;
        y.swap(y_new_);
        k1_.swap(k7_);
        ++stats_.accepted;
        const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        const double proposal = h * std::max(0.2, grow);
        // A truncated final step says nothing about the natural step size.
        step_ = last ? std::max(step_, proposal) : proposal;
      } else {
        ++stats_.rejected;
        step_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
    last_t_ = t1;
  }

 private:
  template <typename System>
  double initial_step(System&& f, const Vector& y, double t, double span) {
    const Eigen::ArrayXd scale = tol_.atol + tol_.rtol * y.array().abs();
    const double d0 = std::sqrt((y.array().abs() / scale).square().mean());
    const double d1 = std::sqrt((k1_.array().abs() / scale).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vector y1 = y + h0 * k1_;
    Vector f1(y.size());
    f(t + h0, y1, f1);
    ++stats_.evaluations;
    const double d2 = std::sqrt(((f1 - k1_).array().abs() / scale).square().mean()) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
  }

  template <typename System>
  double attempt(System&& f, const Vector& y, double t, double h) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat for the embedded fourth-order solution.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index n = y.size();
    k2_.resize(n), k3_.resize(n), k4_.resize(n), k5_.resize(n), k6_.resize(n), k7_.resize(n);

    tmp_ = y + h * (a21 * k1_);
    f(t + c2 * h, tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    f(t + c3 * h, tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    f(t + c4 * h, tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    f(t + c5 * h, tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    f(t + h, tmp_, k6_);
    y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    f(t + h, y_new_, k7_);
    stats_.evaluations += 6;

    tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    const Eigen::ArrayXd scale =
        tol_.atol + tol_.rtol * y.array().abs().max(y_new_.array().abs());
    const double err = std::sqrt((tmp_.array().abs() / scale).square().mean());
    return std::isfinite(err) ? err : 1e10;
  }

  OdeTolerances tol_;
  OdeStats stats_;
  double step_ = 0.0;
  double last_t_ = 0.0;
  bool fsal_valid_ = false;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_;
};

}  // namespace splitbox
