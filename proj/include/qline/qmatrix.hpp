#pragma once

#include "qline/qcalc.hpp"
#include "qline/types.hpp"

namespace qline {

/// Symmetrized q-Hessian surrogate of a gradient field.
struct QHessian {
  Matrix matrix;
  double q_used = 0.0;
  /// Rows computed by central differences because x_i was numerically zero.
  int fallback_count = 0;
};

/// Assembles A_q with a_ij = D_{q,x_i} [grad f]_j and returns (A + A^T)/2.
///
/// Costs one gradient call at x, one per q-shifted point, and two per
/// fallback row.
QHessian q_hessian(const VectorFunction& gradient, const Vector& x, QValue q);

/// q-Hessian of the Lagrangian f + u^T h + v^T g in x, multipliers held fixed.
/// `eq_jacobian` and `ineq_jacobian` return m x n and p x n matrices and may be
/// empty when the corresponding constraint block is absent.
QHessian q_hessian_lagrangian(const VectorFunction& grad_f,
                              const MatrixFunction& eq_jacobian,
                              const MatrixFunction& ineq_jacobian, const Vector& u,
                              const Vector& v, const Vector& x, QValue q);

/// x-gradient of the Lagrangian as a callable, for reuse by the SQP loop.
VectorFunction lagrangian_gradient(const VectorFunction& grad_f,
                                   const MatrixFunction& eq_jacobian,
                                   const MatrixFunction& ineq_jacobian, Vector u,
                                   Vector v);

}  // namespace qline
