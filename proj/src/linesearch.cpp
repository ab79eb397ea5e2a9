#include "qline/linesearch.hpp"

#include "qline/types.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace qline {

void LineSearchParams::validate() const {
  if (!(0.0 < c1 && c1 < c2 && c2 < 1.0)) {
    throw InvalidArgument("line search constants must satisfy 0 < c1 < c2 < 1");
  }
  if (!(0.0 < backtrack_factor && backtrack_factor < 1.0)) {
    throw InvalidArgument("backtracking factor must lie in (0,1)");
  }
  if (!(alpha0 > 0.0)) throw InvalidArgument("initial step must be positive");
  if (max_halvings < 0) throw InvalidArgument("max_halvings must be non-negative");
}

StepResult backtrack(const std::function<double(double)>& phi,
                     const std::function<double(double)>& dphi, double phi0, double slope0,
                     const LineSearchParams& params) {
  params.validate();
  if (!(slope0 < 0.0)) {
    std::ostringstream os;
    os << "not a descent direction: slope " << slope0;
    throw NotDescentDirection(os.str());
  }
  const bool check_curvature = static_cast<bool>(dphi);
  std::optional<StepResult> first_armijo;
  int trials = 0;
  double alpha = params.alpha0;
  for (int j = 0; j <= params.max_halvings; ++j, alpha *= params.backtrack_factor) {
    ++trials;
    const double value = phi(alpha);
    if (!(std::isfinite(value) && value <= phi0 + params.c1 * alpha * slope0)) continue;

    StepResult step;
    step.alpha = alpha;
    step.armijo_holds = true;
    step.phi_alpha = value;
    if (check_curvature) step.curvature_holds = dphi(alpha) >= params.c2 * slope0;
    if (!first_armijo) first_armijo = step;
    if (!params.enforce_curvature || step.curvature_holds) {
      step.trials = trials;
      return step;
    }
  }
  if (first_armijo) {
    first_armijo->trials = trials;
    return *first_armijo;
  }
  std::ostringstream os;
  os << "sufficient decrease not reached after " << params.max_halvings << " halvings";
  throw LineSearchFailure(os.str());
}

StepResult backtracking_step(const std::function<double(double)>& phi,
                             const std::function<double(double)>& dphi,
                             const LineSearchParams& params) {
  return backtrack(phi, dphi, phi(0.0), dphi(0.0), params);
}

}  // namespace qline
