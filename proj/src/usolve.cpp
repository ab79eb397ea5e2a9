#include "qline/usolve.hpp"

#include "qline/psdfactor.hpp"
#include "qline/qmatrix.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>

namespace qline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Direction {
  Vector p;
  double condition = 1.0;
  std::optional<double> q;
  int fallbacks = 0;
  double alpha0 = 1.0;
};

struct Evaluated {
  double f;
  Vector g;
};

Evaluated evaluate(const Problem& problem, const Vector& x) {
  Evaluated e{problem.objective(x), problem.gradient(x)};
  if (!std::isfinite(e.f) || !e.g.allFinite()) {
    throw NumericFailure("non-finite objective or gradient", x);
  }
  return e;
}

// Shared descent loop: `direction` builds p at x_k, `after_step` sees each
// accepted step (used for the BFGS update and the q schedule).
SolveResult descend(const Problem& problem, const Vector& x0, const SolverConfig& config,
                    const std::function<Direction(const Vector&, const Vector&)>& direction,
                    const std::function<void(const Vector&, const Vector&, const Vector&,
                                             const Vector&)>& after_step) {
  config.validate();
  const auto start = Clock::now();
  SolveResult result;
  Vector x = x0;
  result.x_final = x;

  auto finish = [&](SolveStatus status, std::string message = {}) {
    result.status = status;
    result.message = std::move(message);
    result.elapsed_seconds = seconds_since(start);
    result.iterations = static_cast<int>(result.trace.size());
    return result;
  };

  if (!x0.allFinite()) return finish(SolveStatus::numeric_failure, "non-finite start");

  try {
    Evaluated cur = evaluate(problem, x);
    result.f_final = cur.f;
    result.grad_norm_final = cur.g.norm();
    for (int k = 0;; ++k) {
      const double gnorm = cur.g.norm();
      if (gnorm < config.grad_tolerance) return finish(SolveStatus::converged);
      if (k >= config.max_iterations) return finish(SolveStatus::max_iterations);
      if (seconds_since(start) > config.time_cap_seconds) {
        return finish(SolveStatus::time_cap);
      }

      const Direction dir = direction(x, cur.g);
      const double slope = cur.g.dot(dir.p);
      const Vector& p = dir.p;

      IterationRecord rec;
      rec.k = k;
      rec.x = x;
      rec.f_value = cur.f;
      rec.grad_norm = gnorm;
      rec.q_k = dir.q;
      rec.condition_number = dir.condition;
      rec.fallback_count = dir.fallbacks;
      rec.cos_theta = -slope / (gnorm * p.norm());

      const auto phi = [&](double a) { return problem.objective(x + a * p); };
      const auto dphi = [&](double a) { return problem.gradient(x + a * p).dot(p); };
      LineSearchParams ls = config.line_search;
      ls.alpha0 *= dir.alpha0;
      const StepResult step = backtrack(phi, dphi, cur.f, slope, ls);

      const Vector x_next = x + step.alpha * p;
      Evaluated next = evaluate(problem, x_next);
      rec.alpha = step.alpha;
      rec.curvature_holds = step.curvature_holds;
      result.trace.push_back(std::move(rec));

      after_step(x, x_next, cur.g, next.g);
      x = x_next;
      cur = std::move(next);
      result.x_final = x;
      result.f_final = cur.f;
      result.grad_norm_final = cur.g.norm();
    }
  } catch (const NumericFailure& e) {
    return finish(SolveStatus::numeric_failure, e.what());
  } catch (const NotDescentDirection& e) {
    return finish(SolveStatus::line_search_failure, e.what());
  } catch (const LineSearchFailure& e) {
    return finish(SolveStatus::line_search_failure, e.what());
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(grad_tolerance > 0.0)) throw InvalidArgument("gradient tolerance must be positive");
  if (!(time_cap_seconds > 0.0)) throw InvalidArgument("time cap must be positive");
  if (max_iterations < 0) throw InvalidArgument("max_iterations must be non-negative");
  line_search.validate();
}

double SolverConfig::delta_for(const Matrix& a) const {
  return delta_policy ? delta_policy(a) : default_delta(a);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::time_cap: return "time_cap";
    case SolveStatus::line_search_failure: return "line_search_failure";
    case SolveStatus::numeric_failure: return "numeric_failure";
    case SolveStatus::qp_failure: return "qp_failure";
  }
  return "unknown";
}

std::function<double(const Matrix&)> floored_delta(double floor) {
  if (!(floor >= 0.0)) throw InvalidArgument("delta floor must be non-negative");
  return [floor](const Matrix& a) { return std::max(default_delta(a), floor); };
}

double spd_condition_number(const Matrix& b) {
  if (b.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double lo = ev.minCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / lo;
}

SolveResult solve_qls(const Problem& problem, const Vector& x0, const SolverConfig& config,
                      QSchedule schedule) {
  auto direction = [&](const Vector& x, const Vector& g) {
    const QHessian a = q_hessian(problem.gradient, x, schedule.current());
    const PsdModification b = psd_modify(a.matrix, config.delta_for(a.matrix));
    Direction d;
    d.p = b.solve(-g);
    d.condition = spd_condition_number(b.modified_matrix);
    d.q = schedule.q();
    d.fallbacks = a.fallback_count;
    return d;
  };
  auto advance = [&](const Vector&, const Vector&, const Vector&, const Vector&) {
    schedule = schedule.next();
  };
  return descend(problem, x0, config, direction, advance);
}

Matrix bfgs_update(const Matrix& b, const Vector& s, const Vector& y) {
  const double ys = y.dot(s);
  if (!(ys > 1e-10 * s.norm() * y.norm())) return b;
  const Vector bs = b * s;
  const double sbs = s.dot(bs);
  Matrix next = b - bs * bs.transpose() / sbs + y * y.transpose() / ys;
  return 0.5 * (next + next.transpose());
}

SolveResult solve_bfgs(const Problem& problem, const Vector& x0, const SolverConfig& config) {
  Matrix b = Matrix::Identity(x0.size(), x0.size());
  bool first = true;
  auto direction = [&](const Vector&, const Vector& g) {
    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success) throw NumericFailure("BFGS matrix lost positive definiteness");
    Direction d;
    d.p = llt.solve(-g);
    d.condition = spd_condition_number(b);
    // B0 = I carries no scale, so the first trial step is cut to unit length.
    if (first) d.alpha0 = std::min(1.0, 1.0 / d.p.norm());
    first = false;
    return d;
  };
  auto update = [&](const Vector& x, const Vector& x_next, const Vector& g, const Vector& g_next) {
    b = bfgs_update(b, x_next - x, g_next - g);
  };
  return descend(problem, x0, config, direction, update);
}

}  // namespace qline
