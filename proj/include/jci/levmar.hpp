#pragma once

#include <functional>
#include <span>
#include <vector>

namespace jci {

// Residual evaluator: fills `out` (fixed length) with r_i(params).
using ResidualFn =
    std::function<void(std::span<const double> params, std::vector<double>& out)>;

// Optional feasibility predicate; candidate steps landing outside the
// feasible set are rejected as if they had not decreased the objective.
using FeasibleFn = std::function<bool(std::span<const double> params)>;

struct LeastSquaresOptions {
  int max_iterations = 500;
  // Converged when an accepted step decreases the objective by less than
  // this relative amount.
  double relative_tolerance = 1e-10;
  double damping_init = 1e-3;
  double damping_up = 10.0;
  double damping_down = 0.1;
};

struct LeastSquaresResult {
  std::vector<double> params;
  double objective = 0.0;  // sum of squared residuals at `params`
  // sqrt of the residual-variance-scaled covariance diagonal; zeros when the
  // residual is exactly zero or the problem has no spare degrees of freedom.
  std::vector<double> standard_errors;
  int iterations = 0;
  bool converged = false;
  bool used_simplex_fallback = false;
  // Objective after every accepted step, starting with the initial value.
  // Non-increasing by construction.
  std::vector<double> objective_trace;
};

// Damped least-squares descent (Levenberg-Marquardt style) with a numerical
// Jacobian. Only steps that decrease the objective are accepted; on a
// degenerate Jacobian the search falls back to a deterministic Nelder-Mead
// simplex over the same objective. Does not throw on non-convergence; the
// caller inspects `converged`.
LeastSquaresResult fit_least_squares(const ResidualFn& residuals,
                                     std::size_t n_residuals,
                                     std::vector<double> initial,
                                     const LeastSquaresOptions& options = {},
                                     const FeasibleFn& feasible = nullptr);

}  // namespace jci
