#include "jci/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sum_of_squares(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x * x;
  return total;
}

// Objective wrapper returning +inf outside the feasible set or on
// non-finite residuals, so such candidates are never accepted.
class Objective {
public:
  Objective(const ResidualFn& residuals, std::size_t n_residuals,
            const FeasibleFn& feasible)
      : residuals_(residuals), feasible_(feasible), buffer_(n_residuals) {}

  double operator()(std::span<const double> params) {
    if (feasible_ && !feasible_(params)) return kInf;
    residuals_(params, buffer_);
    double total = 0.0;
    for (double r : buffer_) {
      if (!std::isfinite(r)) return kInf;
      total += r * r;
    }
    return total;
  }

private:
  const ResidualFn& residuals_;
  const FeasibleFn& feasible_;
  std::vector<double> buffer_;
};

// Dense Gaussian elimination with partial pivoting; returns false when the
// system is numerically singular. Systems here are tiny (n <= 4).
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& out) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double v = b[row];
    for (std::size_t k = row + 1; k < n; ++k) v -= a[row][k] * out[k];
    out[row] = v / a[row][row];
  }
  return true;
}

// Matrix inverse via per-column solves; false when singular.
bool invert(const std::vector<std::vector<double>>& a,
            std::vector<std::vector<double>>& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> e(n, 0.0);
    e[col] = 1.0;
    std::vector<double> x;
    if (!solve_linear(a, std::move(e), x)) return false;
    for (std::size_t row = 0; row < n; ++row) inv[row][col] = x[row];
  }
  return true;
}

// Central-difference Jacobian, step scaled to the parameter magnitude.
void numerical_jacobian(const ResidualFn& residuals, std::size_t n_residuals,
                        const std::vector<double>& params,
                        std::vector<std::vector<double>>& jacobian) {
  const std::size_t n_params = params.size();
  jacobian.assign(n_residuals, std::vector<double>(n_params, 0.0));
  std::vector<double> forward(n_residuals), backward(n_residuals);
  std::vector<double> p = params;
  for (std::size_t j = 0; j < n_params; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(params[j]));
    p[j] = params[j] + h;
    residuals(p, forward);
    p[j] = params[j] - h;
    residuals(p, backward);
    p[j] = params[j];
    for (std::size_t i = 0; i < n_residuals; ++i)
      jacobian[i][j] = (forward[i] - backward[i]) / (2.0 * h);
  }
}

void standard_errors_from_jacobian(const ResidualFn& residuals,
                                   std::size_t n_residuals,
                                   LeastSquaresResult& result) {
  const std::size_t n_params = result.params.size();
  result.standard_errors.assign(n_params, 0.0);
  if (n_residuals <= n_params) return;
  const double variance =
      result.objective / static_cast<double>(n_residuals - n_params);
  if (variance <= 0.0) return;

  std::vector<std::vector<double>> jacobian;
  numerical_jacobian(residuals, n_residuals, result.params, jacobian);
  std::vector<std::vector<double>> jtj(n_params,
                                       std::vector<double>(n_params, 0.0));
  for (std::size_t i = 0; i < n_residuals; ++i)
    for (std::size_t a = 0; a < n_params; ++a)
      for (std::size_t b = 0; b < n_params; ++b)
        jtj[a][b] += jacobian[i][a] * jacobian[i][b];
  std::vector<std::vector<double>> cov;
  if (!invert(jtj, cov)) return;
  for (std::size_t a = 0; a < n_params; ++a) {
    const double v = variance * cov[a][a];
    result.standard_errors[a] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
}

// Deterministic Nelder-Mead with standard coefficients. Used when the
// Jacobian is rank-deficient and a damped step cannot be formed.
void nelder_mead(Objective& objective, const LeastSquaresOptions& options,
                 LeastSquaresResult& result) {
  const std::size_t n = result.params.size();
  result.used_simplex_fallback = true;

  std::vector<std::vector<double>> simplex;
  std::vector<double> values;
  simplex.push_back(result.params);
  values.push_back(result.objective);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> p = result.params;
    p[j] += 0.05 * std::max(1.0, std::abs(p[j]));
    simplex.push_back(p);
    values.push_back(objective(p));
  }

  const auto order = [&]() {
    std::vector<std::size_t> idx(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (std::size_t i : idx) {
      s2.push_back(std::move(simplex[i]));
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };
  order();

  for (; result.iterations < options.max_iterations; ++result.iterations) {
    if (values.front() < result.objective &&
        std::isfinite(values.front())) {
      const double previous = result.objective;
      result.objective = values.front();
      result.params = simplex.front();
      result.objective_trace.push_back(result.objective);
      if (previous - result.objective <=
          options.relative_tolerance * std::max(1.0, previous)) {
        result.converged = true;
        return;
      }
    }
    if (std::isfinite(values.back()) &&
        values.back() - values.front() <=
            options.relative_tolerance * std::max(1.0, values.front())) {
      // Simplex has collapsed onto one objective value.
      result.converged = true;
      return;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto affine = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + t * (simplex.back()[j] - centroid[j]);
      return p;
    };

    const std::vector<double> reflected = affine(-1.0);
    const double f_reflected = objective(reflected);
    if (f_reflected < values.front()) {
      const std::vector<double> expanded = affine(-2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex.back() = expanded;
        values.back() = f_expanded;
      } else {
        simplex.back() = reflected;
        values.back() = f_reflected;
      }
    } else if (f_reflected < values[values.size() - 2]) {
      simplex.back() = reflected;
      values.back() = f_reflected;
    } else {
      const std::vector<double> contracted = affine(0.5);
      const double f_contracted = objective(contracted);
      if (f_contracted < values.back()) {
        simplex.back() = contracted;
        values.back() = f_contracted;
      } else {
        // shrink toward the best vertex
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] =
                simplex.front()[j] + 0.5 * (simplex[i][j] - simplex.front()[j]);
          values[i] = objective(simplex[i]);
        }
      }
    }
    order();
  }
  // Budget exhausted; keep best-so-far with converged = false.
  if (values.front() < result.objective) {
    result.objective = values.front();
    result.params = simplex.front();
    result.objective_trace.push_back(result.objective);
  }
}

}  // namespace

LeastSquaresResult fit_least_squares(const ResidualFn& residuals,
                                     std::size_t n_residuals,
                                     std::vector<double> initial,
                                     const LeastSquaresOptions& options,
                                     const FeasibleFn& feasible) {
  const std::size_t n_params = initial.size();
  Objective objective(residuals, n_residuals, feasible);

  LeastSquaresResult result;
  result.params = std::move(initial);
  result.objective = objective(result.params);
  result.objective_trace.push_back(result.objective);

  if (!std::isfinite(result.objective)) {
    // Infeasible start; hand straight to the simplex which can walk back in.
    nelder_mead(objective, options, result);
    standard_errors_from_jacobian(residuals, n_residuals, result);
    return result;
  }

  double damping = options.damping_init;
  std::vector<std::vector<double>> jacobian;
  std::vector<double> residual_now(n_residuals);

  for (; result.iterations < options.max_iterations; ++result.iterations) {
    residuals(result.params, residual_now);
    numerical_jacobian(residuals, n_residuals, result.params, jacobian);

    std::vector<std::vector<double>> jtj(n_params,
                                         std::vector<double>(n_params, 0.0));
    std::vector<double> jtr(n_params, 0.0);
    for (std::size_t i = 0; i < n_residuals; ++i) {
      for (std::size_t a = 0; a < n_params; ++a) {
        jtr[a] += jacobian[i][a] * residual_now[i];
        for (std::size_t b = 0; b < n_params; ++b)
          jtj[a][b] += jacobian[i][a] * jacobian[i][b];
      }
    }

    bool degenerate = false;
    for (std::size_t a = 0; a < n_params; ++a) {
      if (jtj[a][a] <= 0.0 || !std::isfinite(jtj[a][a])) degenerate = true;
    }
    if (degenerate) {
      nelder_mead(objective, options, result);
      standard_errors_from_jacobian(residuals, n_residuals, result);
      return result;
    }

    bool stepped = false;
    while (result.iterations < options.max_iterations) {
      // Marquardt scaling: damp proportionally to the curvature diagonal.
      std::vector<std::vector<double>> damped = jtj;
      for (std::size_t a = 0; a < n_params; ++a)
        damped[a][a] += damping * jtj[a][a];
      std::vector<double> rhs(n_params);
      for (std::size_t a = 0; a < n_params; ++a) rhs[a] = -jtr[a];

      std::vector<double> step;
      if (!solve_linear(std::move(damped), std::move(rhs), step)) {
        nelder_mead(objective, options, result);
        standard_errors_from_jacobian(residuals, n_residuals, result);
        return result;
      }

      std::vector<double> candidate(n_params);
      for (std::size_t a = 0; a < n_params; ++a)
        candidate[a] = result.params[a] + step[a];
      const double f_candidate = objective(candidate);

      if (f_candidate < result.objective) {
        const double previous = result.objective;
        result.params = std::move(candidate);
        result.objective = f_candidate;
        result.objective_trace.push_back(f_candidate);
        damping = std::max(1e-12, damping * options.damping_down);
        stepped = true;
        if (previous - f_candidate <=
            options.relative_tolerance * std::max(1.0, previous)) {
          result.converged = true;
          standard_errors_from_jacobian(residuals, n_residuals, result);
          return result;
        }
        break;
      }
      damping *= options.damping_up;
      ++result.iterations;
      if (damping > 1e14) {
        // No downhill direction left at any damping: local optimum.
        result.converged = true;
        standard_errors_from_jacobian(residuals, n_residuals, result);
        return result;
      }
    }
    if (!stepped) break;
  }

  standard_errors_from_jacobian(residuals, n_residuals, result);
  return result;
}

}  // namespace jci
