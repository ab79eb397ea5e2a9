#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "qline/qcalc.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace qline;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}
}  // namespace

TEST_CASE("QValue accepts only the open unit interval") {
  CHECK(QValue(0.5).value() == 0.5);
  CHECK_THROWS_AS(QValue(0.0), InvalidArgument);
  CHECK_THROWS_AS(QValue(1.0), InvalidArgument);
  CHECK_THROWS_AS(QValue(-0.2), InvalidArgument);
  CHECK_THROWS_AS(QValue(std::nan("")), InvalidArgument);
}

TEST_CASE("q_derivative_1d worked values") {
  auto sq = [](double x) { return x * x; };
  auto cube = [](double x) { return x * x * x; };
  CHECK(q_derivative_1d(sq, 2.0, QValue(0.5)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::abs(q_derivative_1d(sq, 0.0, QValue(0.5))) < 1e-10);
  CHECK(q_derivative_1d(sq, 0.0, QValue(0.5), [](double x) { return 2 * x; }) == 0.0);
  // x^2 (1 + q + q^2) at x = 1, q = 0.5
  CHECK(q_derivative_1d(cube, 1.0, QValue(0.5)) == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("q_derivative_1d propagates non-finite values") {
  auto bad = [](double x) { return x > 0.9 ? std::numeric_limits<double>::infinity() : x; };
  CHECK_THROWS_AS(q_derivative_1d(bad, 1.0, QValue(0.5)), NumericFailure);
}

TEST_CASE("q_shift scales exactly one coordinate") {
  CHECK(q_shift(vec({1, 2}), 0, QValue(0.5)) == vec({0.5, 2}));
  CHECK(q_shift(vec({0, 3}), 0, QValue(0.9)) == vec({0, 3}));
  CHECK(q_shift(vec({1, 2, 3}), 2, QValue(0.25)) == vec({1, 2, 0.75}));
  CHECK_THROWS_AS(q_shift(vec({1, 2}), 2, QValue(0.5)), InvalidArgument);
  CHECK_THROWS_AS(q_shift(vec({1, 2}), -1, QValue(0.5)), InvalidArgument);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 100; ++t) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = u(rng);
    const double q = 0.05 + 0.9 * (u(rng) + 5) / 10;
    const Vector s = q_shift(x, t % 4, QValue(q));
    for (int i = 0; i < 4; ++i) CHECK(s[i] == (i == t % 4 ? q * x[i] : x[i]));
  }
}

TEST_CASE("q_partial on y^2 + 4x^3") {
  ScalarFunction g = [](const Vector& v) { return v[1] * v[1] + 4 * v[0] * v[0] * v[0]; };
  for (double q : {0.1, 0.5, 0.9}) {
    for (double x : {-1.5, 0.3, 2.0}) {
      const double expected = 4 * x * x * (1 + q + q * q);
      CHECK(q_partial(g, vec({x, 0.7}), 0, QValue(q)) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK(q_partial(g, vec({1, 2}), 1, QValue(0.5)) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("q_partial falls back to a central difference at x_i = 0") {
  ScalarFunction g = [](const Vector& v) { return v[0] * v[0] * v[1]; };
  CHECK(std::abs(q_partial(g, vec({0, 1}), 0, QValue(0.5))) < 1e-10);
  ScalarFunction h = [](const Vector& v) { return std::sin(v[0]) + v[1]; };
  CHECK(q_partial(h, vec({0, 1}), 0, QValue(0.5)) == doctest::Approx(1.0).epsilon(1e-9));
  // Numerically zero coordinates also take the fallback.
  CHECK(is_zero_coordinate(vec({1e-13, 1}), 0));
  CHECK_FALSE(is_zero_coordinate(vec({1e-11, 1}), 0));
  CHECK(is_zero_coordinate(vec({1e-10, 1e3}), 0));
}

TEST_CASE("q_partial is exact for functions linear in x_i") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 50; ++t) {
    const double a = u(rng), b = u(rng);
    ScalarFunction g = [a, b](const Vector& v) { return a * v[0] + b * v[1] * v[1] + v[1]; };
    Vector x = vec({u(rng), u(rng)});
    if (std::abs(x[0]) < 0.05) x[0] = 0.5;
    const double q = 0.01 + 0.98 * (u(rng) + 3) / 6;
    CHECK(q_partial(g, x, 0, QValue(q)) == doctest::Approx(a).epsilon(1e-9));
  }
}

TEST_CASE("q_partial error shrinks linearly as q approaches 1") {
  // d/dx of x^3 at 1 is 3; the q-difference gives 1 + q + q^2.
  ScalarFunction g = [](const Vector& v) { return v[0] * v[0] * v[0]; };
  double prev = 0.0;
  for (double gap : {1e-1, 1e-2, 1e-3}) {
    const double err = std::abs(q_partial(g, vec({1.0}), 0, QValue(1.0 - gap)) - 3.0);
    CHECK(err == doctest::Approx(3.0 * gap - gap * gap).epsilon(1e-6));
    if (prev > 0) CHECK(err < prev / 5);
    prev = err;
  }
}

TEST_CASE("next_q worked values") {
  CHECK(next_q(QSchedule::at(0.9, 1, 1)).q() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(next_q(QSchedule::at(0.9, 3, 1)).q() == doctest::Approx(0.271).epsilon(1e-15));
  CHECK(next_q(QSchedule::at(0.5, 2, 2)).q() == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(next_q(QSchedule::at(0.5, 2, 2)).k() == 3);
  // k = 0 uses divisor 1
  CHECK(QSchedule(0.9, 1).next().q() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(QSchedule(0.9, 0), InvalidArgument);
  CHECK_THROWS_AS(QSchedule(1.0, 1), InvalidArgument);
}

TEST_CASE("schedule stays in (0,1) and approaches 1") {
  for (double q0 : {0.01, 0.3, 0.9, 0.999}) {
    for (int gamma : {1, 2, 3, 5}) {
      QSchedule s(q0, gamma);
      for (int step = 0; step < 500; ++step) {
        CHECK(s.q() > 0.0);
        CHECK(s.q() < 1.0);
        if (s.k() >= 2) CHECK(1.0 - s.q() <= 1.0 / (s.k() - 1) + 1e-15);
        s = s.next();
      }
    }
  }
}
