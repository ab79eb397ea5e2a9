#pragma once

#include "qline/qcalc.hpp"
#include "qline/types.hpp"
#include "qline/usolve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qline {

/// min f(x) s.t. h(x) = 0 (m rows), g(x) <= 0 (p rows).
/// Jacobians are m x n and p x n. Either constraint block may be absent, in
/// which case its callbacks are empty and the count is 0.
struct ConstrainedProblem {
  std::string name;
  int dimension = 0;
  ScalarFunction objective;
  VectorFunction gradient;
  int num_eq = 0;
  VectorFunction eq;
  MatrixFunction eq_jacobian;
  int num_ineq = 0;
  VectorFunction ineq;
  MatrixFunction ineq_jacobian;
  Vector x0;
  Vector u0;  // equality multipliers, size num_eq
  Vector v0;  // inequality multipliers, size num_ineq, >= 0

  void validate() const;
};

/// Solution of the equality-constrained QP
///   min grad^T d + 1/2 d^T B d  s.t.  A d = rhs,
/// with B d + grad + A^T lambda = 0.
struct KktSolution {
  Vector d;
  Vector lambda;
};

/// Solves the (n+m) KKT system through ldl_factor. Throws
/// DegenerateConstraints when A is rank deficient.
KktSolution kkt_solve(const Matrix& b, const Vector& grad, const Matrix& a_eq,
                      const Vector& rhs);

struct QpSolution {
  Vector d_x;
  Vector lambda;  // equality multipliers
  Vector mu;      // inequality multipliers, 0 off the active set
  std::vector<int> active_set;
  int iterations = 0;
};

/// Primal active-set method for
///   min grad^T d + 1/2 d^T B d  s.t.  A_eq d = rhs_eq,  A_in d <= rhs_in.
/// `warm_start` seeds the working set. A feasible starting point is found by
/// adding the most violated inequality to the working set until the
/// equality-constrained solution is feasible. Throws QpFailure when no
/// feasible point is found or the iteration limit is hit.
QpSolution qp_active_set(const Matrix& b, const Vector& grad, const Matrix& a_eq,
                         const Vector& rhs_eq, const Matrix& a_in, const Vector& rhs_in,
                         const std::vector<int>& warm_start = {});

/// f + mu * (sum |h_i| + sum max(0, g_j)).
double merit_l1(double f_val, const Vector& h_vals, const Vector& g_vals, double mu);

struct SqpTraceRecord {
  int k = 0;
  Vector x;
  Vector u;
  Vector v;
  double merit_value = 0.0;   // at x_k, with the penalty used for the step
  double merit_next = 0.0;    // at x_{k+1}, same penalty
  double penalty = 0.0;
  double kkt_residual = 0.0;  // ||grad_x L|| at (x_k, u_k, v_k)
  double alpha = 0.0;
  double q_k = 0.0;
  double beta1_observed = 0.0;  // min eigenvalue of Z^T B Z, Z spanning null(grad h^T)
  double beta2_observed = 0.0;  // ||B||_2
  double beta3_observed = 0.0;  // ||B^{-1}||_2
  std::vector<int> active_set;
};

struct SqpResult {
  SolveStatus status = SolveStatus::max_iterations;
  Vector x_final;
  Vector u_final;
  Vector v_final;
  double f_final = 0.0;
  double kkt_residual_final = 0.0;
  double infeasibility_final = 0.0;
  int iterations = 0;
  double elapsed_seconds = 0.0;
  std::vector<SqpTraceRecord> trace;
  std::string message;
};

/// q-line-search SQP. Stops when ||grad_x L|| < eps and the constraint
/// violation is below eps. With no constraints the direction and line search
/// are the ones of solve_qls.
SqpResult solve_qsqp(const ConstrainedProblem& problem, const SolverConfig& config,
                     QSchedule schedule);

/// min x1 + x2 s.t. x1^2 + x2^2 = 2, start (-0.5, -1.5), u0 = 0.
ConstrainedProblem circle_problem();

/// min ||x||^2 s.t. x1 = 1 in dimension n.
ConstrainedProblem shifted_plane_problem(int n, const Vector& x0);

/// Wraps an unconstrained problem with empty constraint blocks.
ConstrainedProblem unconstrained(const Problem& problem, const Vector& x0);

}  // namespace qline
