#pragma once

#include "qline/types.hpp"

#include <functional>

namespace qline {

struct LineSearchParams {
  double c1 = 1e-4;               // sufficient decrease
  double c2 = 0.9;                // curvature
  double alpha0 = 1.0;
  double backtrack_factor = 0.5;
  int max_halvings = 60;
  /// When set, keep backtracking past Armijo points until the curvature
  /// condition also holds; if no trial satisfies both, the first Armijo point
  /// is used.
  bool enforce_curvature = true;

  /// Throws InvalidArgument unless 0 < c1 < c2 < 1, 0 < factor < 1, alpha0 > 0.
  void validate() const;
};

struct StepResult {
  double alpha = 0.0;
  bool armijo_holds = false;
  bool curvature_holds = false;
  int trials = 0;
  double phi_alpha = 0.0;  // phi at the accepted step
};

/// Backtracks alpha0 * factor^j, j = 0..max_halvings. Without
/// `enforce_curvature` the first trial with
/// phi(alpha) <= phi0 + c1 * alpha * slope0 is accepted.
///
/// `dphi` may be empty, in which case curvature is never checked and the flag
/// stays false. Throws NotDescentDirection when slope0 >= 0 and
/// LineSearchFailure when no trial satisfies sufficient decrease. Non-finite
/// phi values count as failed trials.
StepResult backtrack(const std::function<double(double)>& phi,
                     const std::function<double(double)>& dphi, double phi0, double slope0,
                     const LineSearchParams& params);

/// Backtracking on phi with slope dphi(0); reports whether
/// dphi(alpha) >= c2 * dphi(0) also holds at the accepted step.
StepResult backtracking_step(const std::function<double(double)>& phi,
                             const std::function<double(double)>& dphi,
                             const LineSearchParams& params);

}  // namespace qline
