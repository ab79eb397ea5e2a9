#include "qline/problems.hpp"

#include "qline/qcalc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qline {

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Problem finish(Problem p, double side = 1.0) {
  p.dimension = static_cast<int>(p.known_minimizers.front().size());
  p.known_min_value = p.objective(p.known_minimizers.front());
  p.start_box = {p.known_minimizers.front(), side};
  return p;
}

Problem bohachevsky() {
  Problem p;
  p.name = "bohachevsky";
  p.objective = [](const Vector& x) {
    return x[0] * x[0] + 2.0 * x[1] * x[1] - 0.3 * std::cos(3.0 * kPi * x[0]) -
           0.4 * std::cos(4.0 * kPi * x[1]) + 0.7;
  };
  p.gradient = [](const Vector& x) {
    return vec({2.0 * x[0] + 0.9 * kPi * std::sin(3.0 * kPi * x[0]),
                4.0 * x[1] + 1.6 * kPi * std::sin(4.0 * kPi * x[1])});
  };
  p.known_minimizers = {Vector::Zero(2)};
  return finish(std::move(p));
}

Problem branin() {
  static constexpr double a = 1.0, r = 6.0, s = 10.0;
  static const double b = 5.1 / (4.0 * kPi * kPi), c = 5.0 / kPi, t = 1.0 / (8.0 * kPi);
  Problem p;
  p.name = "branin";
  p.objective = [](const Vector& x) {
    const double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return a * u * u + s * (1.0 - t) * std::cos(x[0]) + s;
  };
  p.gradient = [](const Vector& x) {
    const double u = x[1] - b * x[0] * x[0] + c * x[0] - r;
    return vec({2.0 * a * u * (c - 2.0 * b * x[0]) - s * (1.0 - t) * std::sin(x[0]),
                2.0 * a * u});
  };
  p.known_minimizers = {vec({kPi, 2.275}), vec({-kPi, 12.275}), vec({3.0 * kPi, 2.475})};
  return finish(std::move(p));
}

Problem cross_in_tray() {
  Problem p;
  p.name = "crossintray";
  p.objective = [](const Vector& x) {
    const double s = std::sin(x[0]) * std::sin(x[1]);
    const double e = std::exp(std::abs(100.0 - std::hypot(x[0], x[1]) / kPi));
    return -1e-4 * std::pow(std::abs(s) * e + 1.0, 0.1);
  };
  // Piecewise gradient; undefined where sin x_i = 0 or r = 100 pi.
  p.gradient = [](const Vector& x) {
    const double s = std::sin(x[0]) * std::sin(x[1]);
    const double rad = std::hypot(x[0], x[1]);
    const double inner = 100.0 - rad / kPi;
    const double e = std::exp(std::abs(inner));
    const double sgn_s = s >= 0.0 ? 1.0 : -1.0;
    const double sgn_in = inner >= 0.0 ? 1.0 : -1.0;
    const double outer = -1e-5 * std::pow(std::abs(s) * e + 1.0, -0.9);
    Vector g(2);
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      const double ds = std::cos(x[i]) * std::sin(x[j]);
      const double de = rad > 0.0 ? e * sgn_in * (-x[i] / (kPi * rad)) : 0.0;
      g[i] = outer * (sgn_s * ds * e + std::abs(s) * de);
    }
    return g;
  };
  const double m = 1.349406617153911;
  p.known_minimizers = {vec({m, m}), vec({-m, m}), vec({m, -m}), vec({-m, -m})};
  return finish(std::move(p));
}

Problem dixon_price() {
  Problem p;
  p.name = "dixonprice";
  p.objective = [](const Vector& x) {
    const double t = 2.0 * x[1] * x[1] - x[0];
    return (x[0] - 1.0) * (x[0] - 1.0) + 2.0 * t * t;
  };
  p.gradient = [](const Vector& x) {
    const double t = 2.0 * x[1] * x[1] - x[0];
    return vec({2.0 * (x[0] - 1.0) - 4.0 * t, 16.0 * x[1] * t});
  };
  const double m = std::sqrt(0.5);
  p.known_minimizers = {vec({1.0, m}), vec({1.0, -m})};
  return finish(std::move(p));
}

Problem easom() {
  Problem p;
  p.name = "easom";
  p.objective = [](const Vector& x) {
    const double e = std::exp(-((x[0] - kPi) * (x[0] - kPi) + (x[1] - kPi) * (x[1] - kPi)));
    return -std::cos(x[0]) * std::cos(x[1]) * e;
  };
  p.gradient = [](const Vector& x) {
    const double e = std::exp(-((x[0] - kPi) * (x[0] - kPi) + (x[1] - kPi) * (x[1] - kPi)));
    const double c0 = std::cos(x[0]), c1 = std::cos(x[1]);
    return vec({e * (std::sin(x[0]) * c1 + 2.0 * (x[0] - kPi) * c0 * c1),
                e * (c0 * std::sin(x[1]) + 2.0 * (x[1] - kPi) * c0 * c1)});
  };
  p.known_minimizers = {vec({kPi, kPi})};
  return finish(std::move(p));
}

Problem griewank() {
  Problem p;
  p.name = "griewank";
  p.objective = [](const Vector& x) {
    double sum = 0.0, prod = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      sum += x[i] * x[i] / 4000.0;
      prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return sum - prod + 1.0;
  };
  p.gradient = [](const Vector& x) {
    Vector g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double rk = std::sqrt(static_cast<double>(k + 1));
      double others = 1.0;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (j != k) others *= std::cos(x[j] / std::sqrt(static_cast<double>(j + 1)));
      }
      g[k] = x[k] / 2000.0 + std::sin(x[k] / rk) / rk * others;
    }
    return g;
  };
  p.known_minimizers = {Vector::Zero(4)};
  return finish(std::move(p));
}

Problem hartmann3d() {
  static const double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static const double a[4][3] = {{3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0},
                                 {0.1, 10.0, 35.0}};
  static const double pm[4][3] = {{0.3689, 0.1170, 0.2673}, {0.4699, 0.4387, 0.7470},
                                  {0.1091, 0.8732, 0.5547}, {0.0381, 0.5743, 0.8828}};
  auto term = [](const Vector& x, int i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += a[i][j] * (x[j] - pm[i][j]) * (x[j] - pm[i][j]);
    return alpha[i] * std::exp(-s);
  };
  Problem p;
  p.name = "hartmann3d";
  p.objective = [term](const Vector& x) {
    double f = 0.0;
    for (int i = 0; i < 4; ++i) f -= term(x, i);
    return f;
  };
  p.gradient = [term](const Vector& x) {
    Vector g = Vector::Zero(3);
    for (int i = 0; i < 4; ++i) {
      const double e = term(x, i);
      for (int k = 0; k < 3; ++k) g[k] += 2.0 * e * a[i][k] * (x[k] - pm[i][k]);
    }
    return g;
  };
  p.known_minimizers = {vec({0.11458887665506896, 0.5556488946169300, 0.8525469846866774})};
  return finish(std::move(p));
}

Problem levy() {
  Problem p;
  p.name = "levy";
  p.objective = [](const Vector& x) {
    const Eigen::Index d = x.size();
    const Vector w = (x.array() - 1.0) / 4.0 + 1.0;
    const double s0 = std::sin(kPi * w[0]);
    double f = s0 * s0;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      const double si = std::sin(kPi * w[i] + 1.0);
      f += (w[i] - 1.0) * (w[i] - 1.0) * (1.0 + 10.0 * si * si);
    }
    const double sd = std::sin(2.0 * kPi * w[d - 1]);
    f += (w[d - 1] - 1.0) * (w[d - 1] - 1.0) * (1.0 + sd * sd);
    return f;
  };
  p.gradient = [](const Vector& x) {
    const Eigen::Index d = x.size();
    const Vector w = (x.array() - 1.0) / 4.0 + 1.0;
    Vector dw = Vector::Zero(d);
    dw[0] += kPi * std::sin(2.0 * kPi * w[0]);
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      const double si = std::sin(kPi * w[i] + 1.0);
      dw[i] += 2.0 * (w[i] - 1.0) * (1.0 + 10.0 * si * si) +
               (w[i] - 1.0) * (w[i] - 1.0) * 10.0 * kPi * std::sin(2.0 * (kPi * w[i] + 1.0));
    }
    const double wd = w[d - 1];
    const double sd = std::sin(2.0 * kPi * wd);
    dw[d - 1] += 2.0 * (wd - 1.0) * (1.0 + sd * sd) +
                 (wd - 1.0) * (wd - 1.0) * 2.0 * kPi * std::sin(4.0 * kPi * wd);
    return Vector(dw / 4.0);
  };
  p.known_minimizers = {Vector::Ones(4)};
  return finish(std::move(p));
}

Problem mccormick() {
  Problem p;
  p.name = "mccormick";
  p.objective = [](const Vector& x) {
    return std::sin(x[0] + x[1]) + (x[0] - x[1]) * (x[0] - x[1]) - 1.5 * x[0] + 2.5 * x[1] + 1.0;
  };
  p.gradient = [](const Vector& x) {
    const double c = std::cos(x[0] + x[1]);
    return vec({c + 2.0 * (x[0] - x[1]) - 1.5, c - 2.0 * (x[0] - x[1]) + 2.5});
  };
  // Stationarity gives x1 + x2 = -2 pi / 3 and x1 - x2 = 1.
  const double x1 = (1.0 - 2.0 * kPi / 3.0) / 2.0;
  p.known_minimizers = {vec({x1, x1 - 1.0})};
  return finish(std::move(p));
}

Problem rotated_hyper_ellipsoid() {
  Problem p;
  p.name = "rotatedhyperellipsoid";
  p.objective = [](const Vector& x) {
    double f = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      f += static_cast<double>(x.size() - j) * x[j] * x[j];
    }
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      g[j] = 2.0 * static_cast<double>(x.size() - j) * x[j];
    }
    return g;
  };
  p.known_minimizers = {Vector::Zero(4)};
  return finish(std::move(p));
}

Problem schwefel() {
  Problem p;
  p.name = "schwefel";
  p.objective = [](const Vector& x) {
    double f = 418.9829 * static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) f -= x[i] * std::sin(std::sqrt(std::abs(x[i])));
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double r = std::sqrt(std::abs(x[i]));
      g[i] = -(std::sin(r) + 0.5 * r * std::cos(r));
    }
    return g;
  };
  const double m = 420.9687463599820;
  p.known_minimizers = {vec({m, m})};
  return finish(std::move(p));
}

Problem styblinski_tang() {
  Problem p;
  p.name = "styblinskitang";
  p.objective = [](const Vector& x) {
    return 0.5 * (x.array().pow(4) - 16.0 * x.array().square() + 5.0 * x.array()).sum();
  };
  p.gradient = [](const Vector& x) {
    return Vector(2.0 * x.array().cube() - 16.0 * x.array() + 2.5);
  };
  // Root of 4x^3 - 32x + 5 = 0; the commonly tabulated -2.0953 is not stationary.
  p.known_minimizers = {Vector::Constant(4, -2.903534027771177)};
  return finish(std::move(p));
}

Problem sum_squares() {
  Problem p;
  p.name = "sumsquares";
  p.objective = [](const Vector& x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) f += static_cast<double>(i + 1) * x[i] * x[i];
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = 2.0 * static_cast<double>(i + 1) * x[i];
    return g;
  };
  p.known_minimizers = {Vector::Zero(10)};
  return finish(std::move(p));
}

Problem zakharov() {
  Problem p;
  p.name = "zakharov";
  auto weighted = [](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += 0.5 * static_cast<double>(i + 1) * x[i];
    return s;
  };
  p.objective = [weighted](const Vector& x) {
    const double s = weighted(x);
    return x.squaredNorm() + s * s + s * s * s * s;
  };
  p.gradient = [weighted](const Vector& x) {
    const double s = weighted(x);
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] = 2.0 * x[i] + (2.0 * s + 4.0 * s * s * s) * 0.5 * static_cast<double>(i + 1);
    }
    return g;
  };
  p.known_minimizers = {Vector::Zero(2)};
  return finish(std::move(p));
}

}  // namespace

double fc_upper_branch(double c, double x, double y) {
  const double t = y - x * x;
  return 0.05 * t * t + (1.0 - x) * (1.0 - x) + c;
}

double fc_lower_branch(double c, double x, double y) {
  const double t = y - x * x;
  return x / c * (1.0 - x) * (1.0 - x) + 0.05 * t * t - (1.0 - c) * (1.0 - c) / c * (x - c) + c;
}

Problem make_fc(double c) {
  if (c == 0.0 || !std::isfinite(c)) throw InvalidArgument("fc requires a finite c != 0");
  Problem p;
  std::ostringstream name;
  name << "fc:" << c;
  p.name = name.str();
  p.dimension = 2;
  p.objective = [c](const Vector& v) {
    return v[0] >= c ? fc_upper_branch(c, v[0], v[1]) : fc_lower_branch(c, v[0], v[1]);
  };
  p.gradient = [c](const Vector& v) {
    const double x = v[0], y = v[1];
    const double t = y - x * x;
    Vector g(2);
    g[1] = 0.1 * t;
    if (x >= c) {
      g[0] = -0.2 * x * t - 2.0 * (1.0 - x);
    } else {
      g[0] = (1.0 - x) * (1.0 - 3.0 * x) / c - 0.2 * x * t - (1.0 - c) * (1.0 - c) / c;
    }
    return g;
  };
  Vector minimizer(2);
  if (c <= 1.0) {
    minimizer << 1.0, 1.0;
  } else {
    const double shift = (1.0 - c) * (1.0 - c);
    const double xs = (4.0 + std::sqrt(16.0 - 12.0 * (1.0 - shift))) / 6.0;
    minimizer << xs, xs * xs;
  }
  p.known_minimizers = {minimizer};
  p.known_min_value = p.objective(minimizer);
  Vector center(2);
  center << 1.0, 1.0;
  p.start_box = {center, 1.8};
  return p;
}

Problem make_sphere(int n) {
  if (n < 1) throw InvalidArgument("dimension must be positive");
  Problem p;
  p.name = "sphere";
  p.objective = [](const Vector& x) { return x.squaredNorm(); };
  p.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  p.known_minimizers = {Vector::Zero(n)};
  return finish(std::move(p));
}

Problem make_quartic(int n) {
  if (n < 1) throw InvalidArgument("dimension must be positive");
  Problem p;
  p.name = "quartic";
  p.objective = [](const Vector& x) { return (x.array().pow(4) + x.array().square()).sum(); };
  p.gradient = [](const Vector& x) {
    return Vector(4.0 * x.array().cube() + 2.0 * x.array());
  };
  p.known_minimizers = {Vector::Zero(n)};
  return finish(std::move(p));
}

std::vector<Problem> standard_suite() {
  return {bohachevsky(), branin(),   cross_in_tray(), dixon_price(),
          easom(),       griewank(), hartmann3d(),    levy(),
          mccormick(),   rotated_hyper_ellipsoid(),   schwefel(),
          make_sphere(8), styblinski_tang(), sum_squares(), zakharov()};
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names;
  for (const Problem& p : standard_suite()) names.push_back(p.name);
  names.push_back("fc");
  return names;
}

Problem problem_by_name(const std::string& name, std::optional<double> c) {
  if (name == "fc") {
    if (!c) throw InvalidArgument("problem fc requires the parameter c");
    return make_fc(*c);
  }
  if (name == "quartic") return make_quartic(4);
  for (Problem& p : standard_suite()) {
    if (p.name == name) return std::move(p);
  }
  throw InvalidArgument("unknown problem '" + name + "'");
}

double check_gradient(const Problem& problem, const Vector& x, double step) {
  const Vector analytic = problem.gradient(x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step > 0.0 ? step : default_fd_step(x[i]);
    Vector plus = x, minus = x;
    plus[i] += h;
    minus[i] -= h;
    const double fd = (problem.objective(plus) - problem.objective(minus)) / (plus[i] - minus[i]);
    worst = std::max(worst, std::abs(analytic[i] - fd) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

double distance_to_minimizers(const Problem& problem, const Vector& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& m : problem.known_minimizers) best = std::min(best, (x - m).norm());
  return best;
}

}  // namespace qline
