#include "qline/qmatrix.hpp"

#include <sstream>

namespace qline {

namespace {

Vector evaluate_checked(const VectorFunction& gradient, const Vector& at, Eigen::Index n) {
  Vector g = gradient(at);
  if (g.size() != n) {
    std::ostringstream os;
    os << "gradient returned " << g.size() << " components, expected " << n;
    throw InvalidArgument(os.str());
  }
  if (!g.allFinite()) throw NumericFailure("non-finite gradient evaluation", at);
  return g;
}

}  // namespace

QHessian q_hessian(const VectorFunction& gradient, const Vector& x, QValue q) {
  const Eigen::Index n = x.size();
  const Vector g0 = evaluate_checked(gradient, x, n);

  Matrix a(n, n);
  int fallbacks = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_zero_coordinate(x, i)) {
      ++fallbacks;
      const double h = default_fd_step(x[i]);
      Vector plus = x, minus = x;
      plus[i] += h;
      minus[i] -= h;
      const Vector gp = evaluate_checked(gradient, plus, n);
      const Vector gm = evaluate_checked(gradient, minus, n);
      a.row(i) = ((gp - gm) / (plus[i] - minus[i])).transpose();
    } else {
      const Vector shifted = q_shift(x, i, q);
      const Vector gs = evaluate_checked(gradient, shifted, n);
      a.row(i) = ((g0 - gs) / ((1.0 - q.value()) * x[i])).transpose();
    }
  }

  QHessian out;
  out.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.matrix(i, i) = a(i, i);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      out.matrix(i, j) = s;
      out.matrix(j, i) = s;
    }
  }
  if (!out.matrix.allFinite()) throw NumericFailure("non-finite q-Hessian entry", x);
  out.q_used = q.value();
  out.fallback_count = fallbacks;
  return out;
}

VectorFunction lagrangian_gradient(const VectorFunction& grad_f,
                                   const MatrixFunction& eq_jacobian,
                                   const MatrixFunction& ineq_jacobian, Vector u,
                                   Vector v) {
  return [=](const Vector& x) -> Vector {
    Vector g = grad_f(x);
    if (u.size() > 0) g += eq_jacobian(x).transpose() * u;
    if (v.size() > 0) g += ineq_jacobian(x).transpose() * v;
    return g;
  };
}

QHessian q_hessian_lagrangian(const VectorFunction& grad_f,
                              const MatrixFunction& eq_jacobian,
                              const MatrixFunction& ineq_jacobian, const Vector& u,
                              const Vector& v, const Vector& x, QValue q) {
  return q_hessian(lagrangian_gradient(grad_f, eq_jacobian, ineq_jacobian, u, v), x, q);
}

}  // namespace qline
