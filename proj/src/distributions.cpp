#include "jci/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jci/errors.hpp"
#include "jci/levmar.hpp"
#include "linear_fit.hpp"

namespace jci {

namespace {

constexpr double kHalfLogTwoPi = 0.9189385332046727;  // ln(2*pi)/2

// Builds the distribution once per-bin counts and the retained values are
// known. `counts` must have one entry per edge interval.
EmpiricalDistribution finalize_distribution(std::vector<double> retained,
                                            const std::vector<std::size_t>& counts,
                                            std::span<const double> edges,
                                            std::size_t dropped) {
  EmpiricalDistribution dist;
  dist.dropped = dropped;
  dist.values = std::move(retained);
  if (dist.values.size() < 10) {
    throw InsufficientDataError(
        "empirical_pdf needs >= 10 positive in-range values, got " +
        std::to_string(dist.values.size()));
  }
  std::sort(dist.values.begin(), dist.values.end());
  dist.sample_size = dist.values.size();
  double sum = 0.0;
  for (double v : dist.values) sum += v;
  dist.sample_mean = sum / static_cast<double>(dist.sample_size);

  const double total = static_cast<double>(dist.sample_size);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double width = edges[i + 1] - edges[i];
    dist.bin_centers.push_back(std::sqrt(edges[i] * edges[i + 1]));
    dist.bin_widths.push_back(width);
    dist.bin_counts.push_back(counts[i]);
    dist.density.push_back(static_cast<double>(counts[i]) / (total * width));
  }
  return dist;
}

// A curve's support as (log x, log density) points, skipping empty density.
struct LogCurve {
  std::vector<double> log_x;
  std::vector<double> log_density;
};

LogCurve log_curve(const ScaledDistribution& dist) {
  LogCurve curve;
  for (std::size_t i = 0; i < dist.scaled_x.size(); ++i) {
    if (dist.scaled_density[i] > 0.0 && dist.scaled_x[i] > 0.0) {
      curve.log_x.push_back(std::log(dist.scaled_x[i]));
      curve.log_density.push_back(std::log(dist.scaled_density[i]));
    }
  }
  return curve;
}

// Linear interpolation of log density at log-x position u; u must lie
// within [curve.log_x.front(), curve.log_x.back()].
double interpolate(const LogCurve& curve, double u) {
  const auto& xs = curve.log_x;
  if (u <= xs.front()) return curve.log_density.front();
  if (u >= xs.back()) return curve.log_density.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), u);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double t = (u - xs[lo]) / (xs[hi] - xs[lo]);
  return curve.log_density[lo] +
         t * (curve.log_density[hi] - curve.log_density[lo]);
}

// Solves a small symmetric linear system in place; returns false when
// (numerically) singular.
bool solve_small(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    if (std::fabs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * b[k];
    b[i] = acc / a[i][i];
  }
  return true;
}

double log_lognormal_density(double u, double mu, double sigma) {
  const double z = (u - mu) / sigma;
  return -u - std::log(sigma) - kHalfLogTwoPi - 0.5 * z * z;
}

}  // namespace

EmpiricalDistribution empirical_pdf(std::span<const double> values,
                                    int bins_per_decade) {
  if (bins_per_decade < 1)
    throw ValidationError("bins_per_decade must be >= 1");

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = 0.0;
  std::size_t dropped = 0;
  std::vector<double> positive;
  positive.reserve(values.size());
  for (double v : values) {
    if (v <= 0.0 || !std::isfinite(v)) {
      ++dropped;
      continue;
    }
    positive.push_back(v);
    x_min = std::min(x_min, v);
    x_max = std::max(x_max, v);
  }
  if (positive.size() < 10) {
    throw InsufficientDataError(
        "empirical_pdf needs >= 10 positive values, got " +
        std::to_string(positive.size()));
  }

  const double log_step = std::log(10.0) / bins_per_decade;
  const int n_bins =
      std::max(1, static_cast<int>(
                      std::floor(std::log(x_max / x_min) / log_step)) +
                      1);
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i)
    edges[static_cast<std::size_t>(i)] = x_min * std::exp(log_step * i);

  // Assign by log position rather than edge comparison so that values at
  // exact decade multiples of x_min stay in the bin they nominally open
  // (exp(log(10)) rounds past 10, so comparing against materialized edges
  // would shift them down a bin).
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (double v : positive) {
    const int idx = std::clamp(
        static_cast<int>(std::floor(std::log(v / x_min) / log_step)), 0,
        n_bins - 1);
    ++counts[static_cast<std::size_t>(idx)];
  }
  return finalize_distribution(std::move(positive), counts, edges, dropped);
}

EmpiricalDistribution empirical_pdf_with_edges(std::span<const double> values,
                                               std::span<const double> edges) {
  if (edges.size() < 2)
    throw ValidationError("empirical_pdf_with_edges needs >= 2 edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!(edges[i] > 0.0))
      throw ValidationError("bin edges must be > 0");
    if (i > 0 && !(edges[i] > edges[i - 1]))
      throw ValidationError("bin edges must be strictly increasing");
  }
  std::size_t dropped = 0;
  std::vector<double> retained;
  retained.reserve(values.size());
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  const double lo = edges.front();
  const double hi = edges.back();
  for (double v : values) {
    if (v <= 0.0 || !std::isfinite(v) || v < lo || v > hi) {
      ++dropped;
      continue;
    }
    // Top edge is inclusive so the sample maximum is never lost.
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t idx = static_cast<std::size_t>(it - edges.begin());
    idx = idx == 0 ? 0 : idx - 1;
    idx = std::min(idx, counts.size() - 1);
    ++counts[idx];
    retained.push_back(v);
  }
  return finalize_distribution(std::move(retained), counts, edges, dropped);
}

ScaledDistribution scale_collapse(const EmpiricalDistribution& dist,
                                  std::string_view source_label) {
  if (!(dist.sample_mean > 0.0))
    throw DegenerateSampleError("scale_collapse needs sample_mean > 0");
  ScaledDistribution scaled;
  scaled.source_label = std::string(source_label);
  scaled.sample_mean = dist.sample_mean;
  scaled.sample_size = dist.sample_size;
  scaled.scaled_x.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    scaled.scaled_x.push_back(dist.bin_centers[i] / dist.sample_mean);
    scaled.scaled_density.push_back(dist.density[i] * dist.sample_mean);
    scaled.scaled_widths.push_back(dist.bin_widths[i] / dist.sample_mean);
  }
  return scaled;
}

double collapse_distance(const ScaledDistribution& a,
                         const ScaledDistribution& b) {
  const LogCurve ca = log_curve(a);
  const LogCurve cb = log_curve(b);
  if (ca.log_x.empty() || cb.log_x.empty())
    throw DisjointSupportError("collapse_distance: empty curve support");
  const double lo = std::max(ca.log_x.front(), cb.log_x.front());
  const double hi = std::min(ca.log_x.back(), cb.log_x.back());
  if (lo > hi)
    throw DisjointSupportError(
        "collapse_distance: curve supports do not overlap");

  double sum_sq = 0.0;
  std::size_t n = 0;
  const auto accumulate = [&](const LogCurve& self, const LogCurve& other) {
    for (std::size_t i = 0; i < self.log_x.size(); ++i) {
      const double u = self.log_x[i];
      if (u < lo || u > hi) continue;
      const double d = self.log_density[i] - interpolate(other, u);
      sum_sq += d * d;
      ++n;
    }
  };
  accumulate(ca, cb);
  accumulate(cb, ca);
  return n == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(n));
}

ScaledDistribution median_curve(const std::vector<ScaledDistribution>& curves,
                                int points_per_decade) {
  if (curves.empty()) throw EmptyDataError("median_curve: no curves");
  if (points_per_decade < 1)
    throw ValidationError("points_per_decade must be >= 1");

  std::vector<LogCurve> logs;
  logs.reserve(curves.size());
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& curve : curves) {
    LogCurve lc = log_curve(curve);
    if (lc.log_x.empty())
      throw DisjointSupportError("median_curve: empty curve support");
    lo = std::max(lo, lc.log_x.front());
    hi = std::min(hi, lc.log_x.back());
    logs.push_back(std::move(lc));
  }
  if (lo > hi)
    throw DisjointSupportError("median_curve: curve supports do not overlap");

  const double step = std::log(10.0) / points_per_decade;
  const int n_points =
      std::max(1, static_cast<int>(std::floor((hi - lo) / step)) + 1);

  ScaledDistribution median;
  median.source_label = "median";
  median.sample_mean = 1.0;
  std::vector<double> samples(logs.size());
  for (int i = 0; i < n_points; ++i) {
    const double u = std::min(lo + step * i, hi);
    for (std::size_t c = 0; c < logs.size(); ++c)
      samples[c] = interpolate(logs[c], u);
    std::sort(samples.begin(), samples.end());
    const std::size_t m = samples.size();
    const double med = m % 2 == 1
                           ? samples[m / 2]
                           : 0.5 * (samples[m / 2 - 1] + samples[m / 2]);
    median.scaled_x.push_back(std::exp(u));
    median.scaled_density.push_back(std::exp(med));
    median.scaled_widths.push_back(0.0);
  }
  return median;
}

std::vector<double> pool_scaled(
    const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  for (const auto& group : groups) {
    if (group.empty())
      throw EmptyDataError("pool_scaled: empty group");
    double sum = 0.0;
    for (double v : group) sum += v;
    const double mean = sum / static_cast<double>(group.size());
    if (!(mean > 0.0))
      throw DegenerateSampleError("pool_scaled: group mean must be > 0");
    for (double v : group) pooled.push_back(v / mean);
  }
  return pooled;
}

TailFit fit_lognormal(const EmpiricalDistribution& dist,
                      const FitRange& range) {
  std::vector<double> u, z;  // log center, log density
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const double x = dist.bin_centers[i];
    if (x < range.x_lo || x > range.x_hi) continue;
    if (!(dist.density[i] > 0.0)) continue;
    u.push_back(std::log(x));
    z.push_back(std::log(dist.density[i]));
    counts.push_back(dist.bin_counts[i]);
  }

  // Both wings suffer the same occupancy artifact as the power tail: bins
  // that only exist because one or two samples landed there sit above the
  // true density and widen the fitted parabola. Trim each wing back to the
  // outermost bin holding a modest count before fitting.
  constexpr std::size_t kReliableCount = 5;
  std::size_t lo = counts.size(), hi = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < kReliableCount) continue;
    lo = std::min(lo, i);
    hi = i + 1;
  }
  if (lo < hi && hi - lo >= 4) {
    u.assign(u.begin() + static_cast<std::ptrdiff_t>(lo),
             u.begin() + static_cast<std::ptrdiff_t>(hi));
    z.assign(z.begin() + static_cast<std::ptrdiff_t>(lo),
             z.begin() + static_cast<std::ptrdiff_t>(hi));
  }

  const std::size_t n = u.size();
  if (n < 4) {
    throw InsufficientDataError("lognormal fit needs >= 4 bins in range, got " +
                                std::to_string(n));
  }

  // The log of the lognormal density is quadratic in u = log x:
  //   z + u = A u^2 + B u + C with A = -1/(2 sigma^2), B = mu/sigma^2.
  // An exact quadratic least squares therefore provides the start values
  // (and is already the answer on noiseless tabulated densities).
  double mu0 = 0.0, sigma0 = 1.0;
  {
    std::vector<std::vector<double>> ata(3, std::vector<double>(3, 0.0));
    std::vector<double> atb(3, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double basis[3] = {u[i] * u[i], u[i], 1.0};
      const double target = z[i] + u[i];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) ata[a][b] += basis[a] * basis[b];
        atb[a] += basis[a] * target;
      }
    }
    const bool solved = solve_small(ata, atb);
    if (solved && atb[0] < 0.0) {
      const double sigma_sq = -0.5 / atb[0];
      sigma0 = std::sqrt(sigma_sq);
      mu0 = atb[1] * sigma_sq;
    } else if (!dist.values.empty()) {
      double sum = 0.0;
      for (double v : dist.values) sum += std::log(v);
      mu0 = sum / static_cast<double>(dist.values.size());
      double ss = 0.0;
      for (double v : dist.values) {
        const double d = std::log(v) - mu0;
        ss += d * d;
      }
      sigma0 = std::sqrt(
          std::max(ss / static_cast<double>(dist.values.size()), 1e-12));
    }
  }

  const ResidualFn residuals = [&](std::span<const double> params,
                                   std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = z[i] - log_lognormal_density(u[i], params[0], params[1]);
  };
  const FeasibleFn feasible = [](std::span<const double> params) {
    return params[1] > 0.0;
  };
  const LeastSquaresResult solution =
      fit_least_squares(residuals, n, {mu0, sigma0}, {}, feasible);
  if (!solution.converged) {
    throw ConvergenceError("lognormal fit did not converge", solution.params,
                           solution.objective);
  }

  TailFit fit;
  fit.kind = TailKind::lognormal;
  fit.mu = solution.params[0];
  fit.sigma = solution.params[1];
  fit.mu_se = solution.standard_errors[0];
  fit.sigma_se = solution.standard_errors[1];
  fit.fit_range = {std::exp(u.front()), std::exp(u.back())};
  fit.n_bins = n;
  fit.residual_rms = std::sqrt(solution.objective / static_cast<double>(n));
  fit.iterations = static_cast<std::size_t>(solution.iterations);
  fit.used_simplex_fallback = solution.used_simplex_fallback;
  if (!dist.values.empty()) {
    double sum = 0.0;
    for (double v : dist.values) sum += std::log(v);
    fit.moment_mu = sum / static_cast<double>(dist.values.size());
    double ss = 0.0;
    for (double v : dist.values) {
      const double d = std::log(v) - fit.moment_mu;
      ss += d * d;
    }
    fit.moment_sigma =
        std::sqrt(ss / static_cast<double>(dist.values.size()));
  }
  return fit;
}

TailFit fit_power_tail(const EmpiricalDistribution& dist, double x_min) {
  if (!(x_min > 0.0)) throw DomainError("fit_power_tail needs x_min > 0");

  std::vector<double> log_x, log_density;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.bin_centers[i] < x_min) continue;
    if (!(dist.density[i] > 0.0)) continue;
    log_x.push_back(std::log(dist.bin_centers[i]));
    log_density.push_back(std::log(dist.density[i]));
    counts.push_back(dist.bin_counts[i]);
  }
  if (log_x.size() < 3) {
    throw InsufficientDataError(
        "power tail fit needs >= 3 bins with center >= x_min, got " +
        std::to_string(log_x.size()));
  }

  // Far-tail bins where the expected count per bin falls below one reach the
  // histogram only when they happen to be occupied, so the surviving bins
  // sit above the true density and flatten the regression. The straight-line
  // fit therefore stops at the last bin with a modest occupancy; the
  // maximum-likelihood cross-check below still uses every raw value.
  constexpr std::size_t kReliableCount = 5;
  std::size_t last_reliable = 0;
  bool any_reliable = false;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] >= kReliableCount) {
      last_reliable = i;
      any_reliable = true;
    }
  }
  if (any_reliable && last_reliable + 1 >= 3) {
    log_x.resize(last_reliable + 1);
    log_density.resize(last_reliable + 1);
  }

  const std::vector<double> weights(log_x.size(), 1.0);
  const detail::Line line = detail::fit_line(log_x, log_density, weights);

  TailFit fit;
  fit.kind = TailKind::power;
  fit.gamma = -line.slope;
  fit.gamma_se = line.slope_se;
  fit.residual_rms = line.residual_rms;
  fit.n_bins = log_x.size();
  fit.fit_range = {x_min, std::exp(log_x.back())};

  // Pareto/Hill cross-check on the raw tail sample.
  const auto first =
      std::lower_bound(dist.values.begin(), dist.values.end(), x_min);
  const std::size_t m =
      static_cast<std::size_t>(dist.values.end() - first);
  fit.tail_sample_size = m;
  if (m >= 2) {
    double log_sum = 0.0;
    for (auto it = first; it != dist.values.end(); ++it)
      log_sum += std::log(*it / x_min);
    if (log_sum > 0.0) {
      fit.mle_gamma = 1.0 + static_cast<double>(m) / log_sum;
      fit.mle_gamma_se =
          (fit.mle_gamma - 1.0) / std::sqrt(static_cast<double>(m));
    }
  }
  return fit;
}

double xi_from_tail_exponents(double gamma_i, double gamma_r) {
  if (!(gamma_i > 1.0))
    throw DomainError("xi_from_tail_exponents needs gamma_I > 1");
  return (gamma_r - 1.0) / (gamma_i - 1.0);
}

}  // namespace jci
