#pragma once

#include "qline/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qline {

/// Axis-aligned hypercube used to draw random starting points.
struct StartBox {
  Vector center;
  double side = 1.0;
};

/// Unconstrained test problem with analytic gradient.
struct Problem {
  std::string name;
  int dimension = 0;
  ScalarFunction objective;
  VectorFunction gradient;
  /// Every global minimizer (symmetric copies included). The first entry is
  /// the representative used to center random starts.
  std::vector<Vector> known_minimizers;
  double known_min_value = 0.0;
  StartBox start_box;
};

/// Two-branch family with minimum (1, 1) of value c for c <= 1:
///   x >= c: 0.05 (y - x^2)^2 + (1 - x)^2 + c
///   x <  c: (x / c)(1 - x)^2 + 0.05 (y - x^2)^2 - (1 - c)^2 / c * (x - c) + c
/// The function is C^1 but d^2f/dx^2 jumps across x = c. For c > 1 the point
/// (1, 1) lies in the lower branch and is no longer stationary; the listed
/// minimizer is then the local minimizer of the lower branch, x* = larger root
/// of 3x^2 - 4x + 1 - (1-c)^2 = 0, y* = x*^2.
Problem make_fc(double c);

double fc_upper_branch(double c, double x, double y);
double fc_lower_branch(double c, double x, double y);

/// sum x_i^2 in n dimensions.
Problem make_sphere(int n);

/// sum (x_i^4 + x_i^2) in n dimensions; strongly convex, minimizer 0.
Problem make_quartic(int n);

/// The fifteen low-dimensional test functions, in table order.
std::vector<Problem> standard_suite();

/// Looks up a suite problem by lowercase, hyphenless name, or "fc" with the
/// parameter c. Throws InvalidArgument for unknown names.
Problem problem_by_name(const std::string& name, std::optional<double> c = std::nullopt);

std::vector<std::string> problem_names();

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|).
/// A non-positive step selects cbrt(eps) * max(1, |x_i|).
double check_gradient(const Problem& problem, const Vector& x, double step = 0.0);

/// Distance from x to the nearest listed minimizer.
double distance_to_minimizers(const Problem& problem, const Vector& x);

}  // namespace qline
