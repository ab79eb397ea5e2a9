#include "qline/sqp.hpp"

#include "qline/linesearch.hpp"
#include "qline/psdfactor.hpp"
#include "qline/qmatrix.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace qline {

namespace {

using Clock = std::chrono::steady_clock;

Matrix rows_of(const Matrix& a, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = a.row(idx[r]);
  return out;
}

Vector entries_of(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (size_t r = 0; r < idx.size(); ++r) out[static_cast<Eigen::Index>(r)] = v[idx[r]];
  return out;
}

Matrix stack(const Matrix& top, const Matrix& bottom, Eigen::Index cols) {
  Matrix out(top.rows() + bottom.rows(), cols);
  if (top.rows()) out.topRows(top.rows()) = top;
  if (bottom.rows()) out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Vector stack(const Vector& top, const Vector& bottom) {
  Vector out(top.size() + bottom.size());
  out << top, bottom;
  return out;
}

int matrix_rank(const Matrix& a) {
  if (a.rows() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(a.transpose());
  qr.setThreshold(1e-12);
  return static_cast<int>(qr.rank());
}

double violation(const Vector& h, const Vector& g) {
  double s = h.cwiseAbs().sum();
  for (Eigen::Index j = 0; j < g.size(); ++j) s += std::max(0.0, g[j]);
  return s;
}

double max_violation(const Vector& h, const Vector& g) {
  double s = h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) s = std::max(s, g[j]);
  return s;
}

}  // namespace

void ConstrainedProblem::validate() const {
  if (dimension <= 0) throw InvalidArgument("problem dimension must be positive");
  if (!objective || !gradient) throw InvalidArgument("objective and gradient are required");
  if (x0.size() != dimension) throw InvalidArgument("x0 has wrong dimension");
  if (num_eq < 0 || num_ineq < 0) throw InvalidArgument("constraint counts must be >= 0");
  if (num_eq >= dimension) throw InvalidArgument("need fewer equality constraints than variables");
  if (num_eq > 0 && (!eq || !eq_jacobian)) throw InvalidArgument("equality callbacks missing");
  if (num_ineq > 0 && (!ineq || !ineq_jacobian)) {
    throw InvalidArgument("inequality callbacks missing");
  }
  if (u0.size() != num_eq || v0.size() != num_ineq) {
    throw InvalidArgument("initial multipliers have wrong size");
  }
  if (num_ineq > 0 && v0.minCoeff() < 0.0) {
    throw InvalidArgument("inequality multipliers must be non-negative");
  }
}

KktSolution kkt_solve(const Matrix& b, const Vector& grad, const Matrix& a_eq,
                      const Vector& rhs) {
  const Eigen::Index n = b.rows();
  const Eigen::Index m = a_eq.rows();
  if (b.cols() != n || grad.size() != n || rhs.size() != m || (m > 0 && a_eq.cols() != n)) {
    throw InvalidArgument("kkt_solve: inconsistent dimensions");
  }
  if (matrix_rank(a_eq) < m) throw DegenerateConstraints("constraint Jacobian is rank deficient");

  Matrix k = Matrix::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = b;
  if (m > 0) {
    k.topRightCorner(n, m) = a_eq.transpose();
    k.bottomLeftCorner(m, n) = a_eq;
  }
  const Vector sol = ldl_factor(k).solve(stack(Vector(-grad), rhs));
  return {sol.head(n), sol.tail(m)};
}

QpSolution qp_active_set(const Matrix& b, const Vector& grad, const Matrix& a_eq,
                         const Vector& rhs_eq, const Matrix& a_in, const Vector& rhs_in,
                         const std::vector<int>& warm_start) {
  const Eigen::Index n = b.rows();
  const int p = static_cast<int>(a_in.rows());
  const int m = static_cast<int>(a_eq.rows());
  if (rhs_in.size() != p || (p > 0 && a_in.cols() != n)) {
    throw InvalidArgument("qp_active_set: inconsistent inequality block");
  }
  const double feas_tol = 1e-10 * (1.0 + (p ? rhs_in.cwiseAbs().maxCoeff() : 0.0));

  std::vector<int> work;
  for (int i : warm_start) {
    if (i < 0 || i >= p) continue;
    std::vector<int> trial = work;
    trial.push_back(i);
    if (matrix_rank(stack(a_eq, rows_of(a_in, trial), n)) == m + static_cast<int>(trial.size())) {
      work = trial;
    }
  }

  auto solve_on = [&](const std::vector<int>& w, const Vector& g) {
    const Matrix a = stack(a_eq, rows_of(a_in, w), n);
    const Vector r = stack(rhs_eq, entries_of(rhs_in, w));
    return kkt_solve(b, g, a, r);
  };

  QpSolution out;
  const int max_iter = 10 * (static_cast<int>(n) + p) + 50;

  // Crash to a feasible point: solve on the working set, add the most
  // violated inequality, repeat.
  Vector d;
  for (;;) {
    d = solve_on(work, grad).d;
    int worst = -1;
    double worst_val = feas_tol;
    for (int i = 0; i < p; ++i) {
      const double r = a_in.row(i).dot(d) - rhs_in[i];
      if (r > worst_val) {
        worst_val = r;
        worst = i;
      }
    }
    if (worst < 0) break;
    work.push_back(worst);
    if (matrix_rank(stack(a_eq, rows_of(a_in, work), n)) < m + static_cast<int>(work.size()) ||
        ++out.iterations > max_iter) {
      throw QpFailure("no feasible point found for the QP subproblem");
    }
  }

  for (;; ++out.iterations) {
    if (out.iterations > max_iter) throw QpFailure("active-set iteration limit reached");
    // Step p from d toward the minimizer on the working set.
    const Vector g_here = grad + b * d;
    const Matrix a_w = stack(a_eq, rows_of(a_in, work), n);
    const KktSolution step = kkt_solve(b, g_here, a_w, Vector::Zero(a_w.rows()));
    const double scale = 1.0 + d.norm();
    if (step.d.norm() <= 1e-12 * scale) {
      const Vector mult = step.lambda;
      int drop = -1;
      double most_negative = 0.0;
      for (size_t j = 0; j < work.size(); ++j) {
        const double mu = mult[m + static_cast<Eigen::Index>(j)];
        if (mu < most_negative) {
          most_negative = mu;
          drop = static_cast<int>(j);
        }
      }
      if (drop < 0) {
        out.d_x = d;
        out.lambda = mult.head(m);
        out.mu = Vector::Zero(p);
        for (size_t j = 0; j < work.size(); ++j) {
          out.mu[work[j]] = mult[m + static_cast<Eigen::Index>(j)];
        }
        out.active_set = work;
        std::sort(out.active_set.begin(), out.active_set.end());
        return out;
      }
      work.erase(work.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < p; ++i) {
      if (std::find(work.begin(), work.end(), i) != work.end()) continue;
      const double ap = a_in.row(i).dot(step.d);
      if (ap <= 0.0) continue;
      const double room = std::max(0.0, rhs_in[i] - a_in.row(i).dot(d));
      if (room / ap < alpha) {
        alpha = room / ap;
        blocking = i;
      }
    }
    d += alpha * step.d;
    if (blocking >= 0) work.push_back(blocking);
  }
}

double merit_l1(double f_val, const Vector& h_vals, const Vector& g_vals, double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("merit penalty must be positive");
  return f_val + mu * violation(h_vals, g_vals);
}

SqpResult solve_qsqp(const ConstrainedProblem& problem, const SolverConfig& config,
                     QSchedule schedule) {
  problem.validate();
  config.validate();
  const auto start = Clock::now();
  const Eigen::Index n = problem.dimension;
  const bool has_eq = problem.num_eq > 0;
  const bool has_in = problem.num_ineq > 0;
  const bool constrained = has_eq || has_in;

  SqpResult result;
  Vector x = problem.x0;
  Vector u = problem.u0;
  Vector v = problem.v0;
  double penalty = 1.0;
  std::vector<int> active;

  auto h_at = [&](const Vector& y) { return has_eq ? problem.eq(y) : Vector(Vector::Zero(0)); };
  auto g_at = [&](const Vector& y) { return has_in ? problem.ineq(y) : Vector(Vector::Zero(0)); };
  auto jh_at = [&](const Vector& y) { return has_eq ? problem.eq_jacobian(y) : Matrix(0, n); };
  auto jg_at = [&](const Vector& y) { return has_in ? problem.ineq_jacobian(y) : Matrix(0, n); };

  auto finish = [&](SolveStatus status, std::string message = {}) {
    result.status = status;
    result.message = std::move(message);
    result.x_final = x;
    result.u_final = u;
    result.v_final = v;
    result.iterations = static_cast<int>(result.trace.size());
    result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  };

  if (!x.allFinite()) return finish(SolveStatus::numeric_failure, "non-finite start");

  try {
    for (int k = 0;; ++k) {
      const double f = problem.objective(x);
      const Vector grad = problem.gradient(x);
      const Vector h = h_at(x);
      const Vector g = g_at(x);
      const Matrix jh = jh_at(x);
      const Matrix jg = jg_at(x);
      Vector grad_l = grad;
      if (has_eq) grad_l += jh.transpose() * u;
      if (has_in) grad_l += jg.transpose() * v;
      if (!std::isfinite(f) || !grad_l.allFinite() || !h.allFinite() || !g.allFinite()) {
        throw NumericFailure("non-finite problem data", x);
      }
      result.f_final = f;
      result.kkt_residual_final = grad_l.norm();
      result.infeasibility_final = max_violation(h, g);
      if (result.kkt_residual_final < config.grad_tolerance &&
          result.infeasibility_final < config.grad_tolerance) {
        return finish(SolveStatus::converged);
      }
      if (k >= config.max_iterations) return finish(SolveStatus::max_iterations);
      if (std::chrono::duration<double>(Clock::now() - start).count() > config.time_cap_seconds) {
        return finish(SolveStatus::time_cap);
      }

      const QHessian a =
          constrained
              ? q_hessian_lagrangian(problem.gradient, problem.eq_jacobian,
                                     problem.ineq_jacobian, u, v, x, schedule.current())
              : q_hessian(problem.gradient, x, schedule.current());
      const PsdModification bmod = psd_modify(a.matrix, config.delta_for(a.matrix));
      const Matrix& bl = bmod.modified_matrix;

      SqpTraceRecord rec;
      rec.k = k;
      rec.x = x;
      rec.u = u;
      rec.v = v;
      rec.kkt_residual = result.kkt_residual_final;
      rec.q_k = schedule.q();
      {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(bl, Eigen::EigenvaluesOnly);
        rec.beta2_observed = eig.eigenvalues().cwiseAbs().maxCoeff();
        rec.beta3_observed = 1.0 / eig.eigenvalues().minCoeff();
        if (has_eq && jh.rows() < n) {
          Eigen::HouseholderQR<Matrix> qr(jh.transpose());
          const Matrix q_full = qr.householderQ() * Matrix::Identity(n, n);
          const Matrix z = q_full.rightCols(n - jh.rows());
          Eigen::SelfAdjointEigenSolver<Matrix> zeig(z.transpose() * bl * z,
                                                     Eigen::EigenvaluesOnly);
          rec.beta1_observed = zeig.eigenvalues().minCoeff();
        } else {
          rec.beta1_observed = eig.eigenvalues().minCoeff();
        }
      }

      Vector d_x, d_u = Vector::Zero(u.size()), d_v = Vector::Zero(v.size());
      if (!constrained) {
        d_x = bmod.solve(-grad);
      } else {
        const QpSolution qp = qp_active_set(bl, grad, jh, -h, jg, -g, active);
        d_x = qp.d_x;
        d_u = qp.lambda - u;
        d_v = qp.mu - v;
        active = qp.active_set;
        double mult = 0.0;
        if (has_eq) mult = std::max({mult, u.cwiseAbs().maxCoeff(), qp.lambda.cwiseAbs().maxCoeff()});
        if (has_in) mult = std::max({mult, v.cwiseAbs().maxCoeff(), qp.mu.cwiseAbs().maxCoeff()});
        penalty = std::max(penalty, mult + 1.0);
      }
      rec.active_set = active;
      rec.penalty = penalty;

      StepResult step;
      if (!constrained) {
        const auto phi = [&](double al) { return problem.objective(x + al * d_x); };
        const auto dphi = [&](double al) { return problem.gradient(x + al * d_x).dot(d_x); };
        rec.merit_value = f;
        step = backtrack(phi, dphi, f, grad.dot(d_x), config.line_search);
      } else {
        const double phi0 = merit_l1(f, h, g, penalty);
        rec.merit_value = phi0;
        const auto phi = [&](double al) {
          const Vector y = x + al * d_x;
          return merit_l1(problem.objective(y), h_at(y), g_at(y), penalty);
        };
        const double slope = grad.dot(d_x) - penalty * violation(h, g);
        if (d_x.norm() <= 1e-14 * (1.0 + x.norm())) {
          // Primal point is already the QP solution: only the multipliers move.
          step.alpha = 1.0;
          step.armijo_holds = true;
          step.phi_alpha = phi0;
        } else {
          step = backtrack(phi, {}, phi0, slope, config.line_search);
        }
      }
      rec.alpha = step.alpha;
      rec.merit_next = step.phi_alpha;
      result.trace.push_back(std::move(rec));

      x = x + step.alpha * d_x;
      u = u + step.alpha * d_u;
      v = v + step.alpha * d_v;
      schedule = schedule.next();
    }
  } catch (const NumericFailure& e) {
    return finish(SolveStatus::numeric_failure, e.what());
  } catch (const NotDescentDirection& e) {
    return finish(SolveStatus::line_search_failure, e.what());
  } catch (const LineSearchFailure& e) {
    return finish(SolveStatus::line_search_failure, e.what());
  } catch (const QpFailure& e) {
    return finish(SolveStatus::qp_failure, e.what());
  } catch (const DegenerateConstraints& e) {
    return finish(SolveStatus::qp_failure, e.what());
  }
}

ConstrainedProblem circle_problem() {
  ConstrainedProblem p;
  p.name = "circle";
  p.dimension = 2;
  p.objective = [](const Vector& x) { return x[0] + x[1]; };
  p.gradient = [](const Vector&) { return Vector(Vector::Ones(2)); };
  p.num_eq = 1;
  p.eq = [](const Vector& x) {
    Vector h(1);
    h << x.squaredNorm() - 2.0;
    return h;
  };
  p.eq_jacobian = [](const Vector& x) {
    Matrix j(1, 2);
    j << 2.0 * x[0], 2.0 * x[1];
    return j;
  };
  p.x0 = Vector(2);
  p.x0 << -0.5, -1.5;
  p.u0 = Vector::Zero(1);
  p.v0 = Vector::Zero(0);
  return p;
}

ConstrainedProblem shifted_plane_problem(int n, const Vector& x0) {
  if (n < 2) throw InvalidArgument("shifted plane problem needs n >= 2");
  ConstrainedProblem p;
  p.name = "plane";
  p.dimension = n;
  p.objective = [](const Vector& x) { return x.squaredNorm(); };
  p.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  p.num_eq = 1;
  p.eq = [](const Vector& x) {
    Vector h(1);
    h << x[0] - 1.0;
    return h;
  };
  p.eq_jacobian = [n](const Vector&) {
    Matrix j = Matrix::Zero(1, n);
    j(0, 0) = 1.0;
    return j;
  };
  p.x0 = x0;
  p.u0 = Vector::Zero(1);
  p.v0 = Vector::Zero(0);
  return p;
}

ConstrainedProblem unconstrained(const Problem& problem, const Vector& x0) {
  ConstrainedProblem p;
  p.name = problem.name;
  p.dimension = problem.dimension;
  p.objective = problem.objective;
  p.gradient = problem.gradient;
  p.x0 = x0;
  p.u0 = Vector::Zero(0);
  p.v0 = Vector::Zero(0);
  return p;
}

}  // namespace qline
