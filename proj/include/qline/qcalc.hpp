#pragma once

#include "qline/types.hpp"

#include <functional>
#include <optional>

namespace qline {

/// Dilation parameter of a q-difference quotient, restricted to (0, 1).
class QValue {
public:
  explicit QValue(double q);
  double value() const { return q_; }

private:
  double q_;
};

/// State of the q_k sequence driving the q-line-search iteration.
///
/// Each advance sets q <- 1 - q^gamma / max(k, 1) and then increments k, so
/// the sequence tends to 1 with |1 - q_k| <= 1/(k-1) for k >= 2.
class QSchedule {
public:
  QSchedule(double q0, int gamma);

  double q0() const { return q0_; }
  int gamma() const { return gamma_; }
  int k() const { return k_; }
  QValue current() const { return QValue(q_); }
  double q() const { return q_; }

  QSchedule next() const;

  /// Builds a schedule at an arbitrary point of the sequence; used by tests
  /// and by callers resuming a run.
  static QSchedule at(double q, int gamma, int k);

private:
  double q0_;
  int gamma_;
  int k_ = 0;
  double q_;
};

QSchedule next_q(const QSchedule& schedule);

/// True when coordinate i is treated as zero, i.e.
/// |x_i| <= 1e-12 * max(1, ||x||_inf).
bool is_zero_coordinate(const Vector& x, Eigen::Index i);

/// Central-difference step used on the x_i = 0 branch.
double default_fd_step(double xi);

/// Jackson q-derivative (f(x) - f(qx)) / ((1-q) x). At x = 0 it returns
/// `derivative_at_zero(0)` if supplied, otherwise a central difference.
double q_derivative_1d(const std::function<double(double)>& f, double x,
                       QValue q,
                       const std::function<double(double)>& derivative_at_zero = {});

/// Copy of x with coordinate i multiplied by q.
Vector q_shift(const Vector& x, Eigen::Index i, QValue q);

/// q-partial derivative of g in coordinate i. Falls back to a central
/// difference with step `fd_step` (or default_fd_step when <= 0) when x_i is
/// numerically zero.
double q_partial(const ScalarFunction& g, const Vector& x, Eigen::Index i,
                 QValue q, double fd_step = 0.0);

}  // namespace qline
