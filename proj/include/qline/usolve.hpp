#pragma once

#include "qline/linesearch.hpp"
#include "qline/problems.hpp"
#include "qline/qcalc.hpp"
#include "qline/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qline {

struct SolverConfig {
  double grad_tolerance = 1e-5;
  int max_iterations = 10000;
  double time_cap_seconds = 100.0;
  LineSearchParams line_search;
  /// Eigenvalue floor for the positive-definite modification of A_q.
  std::function<double(const Matrix&)> delta_policy;

  void validate() const;
  double delta_for(const Matrix& a) const;
};

enum class SolveStatus {
  converged,
  max_iterations,
  time_cap,
  line_search_failure,
  numeric_failure,
  qp_failure,
};

std::string to_string(SolveStatus status);

/// delta = max(default_delta(A), floor). Bounds the step length when A_q is
/// nearly singular or indefinite.
std::function<double(const Matrix&)> floored_delta(double floor);

/// One accepted step x_k -> x_{k+1}; f_value and grad_norm refer to x_k.
struct IterationRecord {
  int k = 0;
  Vector x;
  double f_value = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;
  std::optional<double> q_k;  // q-solver only
  double cos_theta = 0.0;
  /// 2-norm condition number of the matrix used for the direction.
  double condition_number = 1.0;
  int fallback_count = 0;
  bool curvature_holds = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::numeric_failure;
  Vector x_final;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  int iterations = 0;
  double elapsed_seconds = 0.0;
  std::vector<IterationRecord> trace;
  std::string message;
};

/// q-line-search (Newton-like step with the modified q-Hessian).
SolveResult solve_qls(const Problem& problem, const Vector& x0, const SolverConfig& config,
                      QSchedule schedule);

/// BFGS update of B with s = x_{k+1} - x_k, y = grad_{k+1} - grad_k. The
/// update is skipped (B returned unchanged) when y^T s <= 1e-10 ||s|| ||y||.
Matrix bfgs_update(const Matrix& b, const Vector& s, const Vector& y);

/// BFGS baseline with B_0 = I and the same line search and stopping rules.
SolveResult solve_bfgs(const Problem& problem, const Vector& x0, const SolverConfig& config);

/// 2-norm condition number of a symmetric positive definite matrix.
double spd_condition_number(const Matrix& b);

}  // namespace qline
