#include "qline/qcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qline {

namespace {

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericFailure(std::string("non-finite evaluation in ") + what);
  }
  return value;
}

double checked(double value, const char* what, const Vector& at) {
  if (!std::isfinite(value)) {
    throw NumericFailure(std::string("non-finite evaluation in ") + what, at);
  }
  return value;
}

}  // namespace

QValue::QValue(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "q must lie in (0,1), got " << q;
    throw InvalidArgument(os.str());
  }
}

QSchedule::QSchedule(double q0, int gamma) : q0_(q0), gamma_(gamma), q_(q0) {
  QValue{q0};
  if (gamma < 1) throw InvalidArgument("gamma must be a positive integer");
}

QSchedule QSchedule::at(double q, int gamma, int k) {
  if (k < 0) throw InvalidArgument("schedule index must be non-negative");
  QSchedule s(q, gamma);
  s.k_ = k;
  return s;
}

QSchedule QSchedule::next() const {
  QSchedule s = *this;
  const double divisor = static_cast<double>(k_ < 1 ? 1 : k_);
  s.q_ = 1.0 - std::pow(q_, gamma_) / divisor;
  // q^gamma / k can fall below half an ulp of 1.
  s.q_ = std::min(s.q_, std::nextafter(1.0, 0.0));
  s.k_ = k_ + 1;
  return s;
}

QSchedule next_q(const QSchedule& schedule) { return schedule.next(); }

bool is_zero_coordinate(const Vector& x, Eigen::Index i) {
  const double scale = std::max(1.0, x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0);
  return std::abs(x[i]) <= 1e-12 * scale;
}

double default_fd_step(double xi) {
  static const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  return cbrt_eps * std::max(1.0, std::abs(xi));
}

double q_derivative_1d(const std::function<double(double)>& f, double x, QValue q,
                       const std::function<double(double)>& derivative_at_zero) {
  if (x == 0.0) {
    if (derivative_at_zero) return checked(derivative_at_zero(0.0), "q_derivative_1d");
    const double h = default_fd_step(0.0);
    const double fp = checked(f(h), "q_derivative_1d");
    const double fm = checked(f(-h), "q_derivative_1d");
    return (fp - fm) / (2.0 * h);
  }
  const double fx = checked(f(x), "q_derivative_1d");
  const double fqx = checked(f(q.value() * x), "q_derivative_1d");
  return (fx - fqx) / ((1.0 - q.value()) * x);
}

Vector q_shift(const Vector& x, Eigen::Index i, QValue q) {
  if (i < 0 || i >= x.size()) {
    std::ostringstream os;
    os << "coordinate index " << i << " out of range for dimension " << x.size();
    throw InvalidArgument(os.str());
  }
  Vector shifted = x;
  shifted[i] = q.value() * x[i];
  return shifted;
}

double q_partial(const ScalarFunction& g, const Vector& x, Eigen::Index i, QValue q,
                 double fd_step) {
  if (i < 0 || i >= x.size()) throw InvalidArgument("coordinate index out of range");
  if (is_zero_coordinate(x, i)) {
    const double h = fd_step > 0.0 ? fd_step : default_fd_step(x[i]);
    Vector plus = x, minus = x;
    plus[i] += h;
    minus[i] -= h;
    const double gp = checked(g(plus), "q_partial", plus);
    const double gm = checked(g(minus), "q_partial", minus);
    return (gp - gm) / (plus[i] - minus[i]);
  }
  const Vector shifted = q_shift(x, i, q);
  const double gx = checked(g(x), "q_partial", x);
  const double gs = checked(g(shifted), "q_partial", shifted);
  return (gx - gs) / ((1.0 - q.value()) * x[i]);
}

}  // namespace qline
