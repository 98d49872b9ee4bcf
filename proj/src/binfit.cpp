#include "jci/binfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jci/errors.hpp"
#include "jci/levmar.hpp"
#include "jci/rng.hpp"
#include "linear_fit.hpp"

namespace jci {

using detail::Line;
using detail::fit_line;

namespace {

struct WorkBin {
  // Edge indices into the geometric grid: spans [lo, hi) grid steps.
  int edge_lo = 0;
  int edge_hi = 0;
  std::size_t count = 0;
  double sum_y = 0.0;
  double sum_y_sq = 0.0;
};

BinnedSeries finalize(const std::vector<WorkBin>& bins, double x_min,
                      double log_step, std::size_t dropped) {
  BinnedSeries out;
  out.dropped = dropped;
  for (const auto& bin : bins) {
    const double mid = 0.5 * static_cast<double>(bin.edge_lo + bin.edge_hi);
    out.bin_centers.push_back(x_min * std::exp(log_step * mid));
    const double mean = bin.sum_y / static_cast<double>(bin.count);
    out.bin_means.push_back(mean);
    out.bin_counts.push_back(bin.count);
    double sem = 0.0;
    if (bin.count > 1) {
      const double var =
          (bin.sum_y_sq - bin.sum_y * mean) / static_cast<double>(bin.count - 1);
      sem = var > 0.0 ? std::sqrt(var / static_cast<double>(bin.count)) : 0.0;
    }
    out.bin_sems.push_back(sem);
  }
  return out;
}

std::vector<double> bin_weights(const BinnedSeries& binned,
                                const FitConfig& config) {
  std::vector<double> weights(binned.size(), 1.0);
  if (!config.weighted) return weights;
  for (std::size_t i = 0; i < binned.size(); ++i) {
    // Relative weighting; zero-SEM (noiseless) bins get a floor instead of
    // an infinite weight.
    const double sem = std::max(binned.bin_sems[i], 1e-12);
    weights[i] = 1.0 / (sem * sem);
  }
  return weights;
}

void require_positive_means(const BinnedSeries& binned) {
  for (double mean : binned.bin_means) {
    if (!(mean > 0.0))
      throw DomainError("bin mean must be > 0 for a log-space fit");
  }
}

BinnedSeries slice(const BinnedSeries& binned, std::size_t begin,
                   std::size_t end) {
  BinnedSeries out;
  out.bin_centers.assign(binned.bin_centers.begin() + begin,
                         binned.bin_centers.begin() + end);
  out.bin_means.assign(binned.bin_means.begin() + begin,
                       binned.bin_means.begin() + end);
  out.bin_sems.assign(binned.bin_sems.begin() + begin,
                      binned.bin_sems.begin() + end);
  out.bin_counts.assign(binned.bin_counts.begin() + begin,
                        binned.bin_counts.begin() + end);
  return out;
}

double total_squared_residual(const PowerLawFit& fit) {
  return fit.residual_rms * fit.residual_rms * static_cast<double>(fit.n_bins);
}

StretchedLogFit from_least_squares(const LeastSquaresResult& solution,
                                   std::size_t n_bins) {
  StretchedLogFit fit;
  fit.a_coeff = solution.params[0];
  fit.b_expo = solution.params[1];
  fit.c_offset = solution.params[2];
  fit.a_se = solution.standard_errors[0];
  fit.b_se = solution.standard_errors[1];
  fit.c_se = solution.standard_errors[2];
  fit.residual_rms =
      std::sqrt(solution.objective / static_cast<double>(n_bins));
  fit.iterations = static_cast<std::size_t>(solution.iterations);
  fit.used_simplex_fallback = solution.used_simplex_fallback;
  fit.objective_trace = solution.objective_trace;
  return fit;
}

}  // namespace

BinnedSeries log_bin(std::span<const PointXY> points,
                     const LogBinConfig& config) {
  if (config.bins_per_decade < 1)
    throw ValidationError("bins_per_decade must be >= 1");

  double x_min = std::numeric_limits<double>::infinity();
  double x_max = 0.0;
  std::size_t dropped = 0;
  for (const auto& point : points) {
    if (point.x <= 0.0) {
      ++dropped;
      continue;
    }
    x_min = std::min(x_min, point.x);
    x_max = std::max(x_max, point.x);
  }
  const std::size_t retained = points.size() - dropped;
  if (retained == 0)
    throw EmptyDataError("log_bin: no points with x > 0");

  const double log_step = std::log(10.0) / config.bins_per_decade;
  const int n_bins =
      std::max(1, static_cast<int>(
                      std::floor(std::log(x_max / x_min) / log_step)) +
                      1);

  std::vector<WorkBin> bins(static_cast<std::size_t>(n_bins));
  for (int i = 0; i < n_bins; ++i) {
    bins[static_cast<std::size_t>(i)].edge_lo = i;
    bins[static_cast<std::size_t>(i)].edge_hi = i + 1;
  }
  for (const auto& point : points) {
    if (point.x <= 0.0) continue;
    int idx = static_cast<int>(std::floor(std::log(point.x / x_min) / log_step));
    idx = std::clamp(idx, 0, n_bins - 1);
    auto& bin = bins[static_cast<std::size_t>(idx)];
    ++bin.count;
    bin.sum_y += point.y;
    bin.sum_y_sq += point.y * point.y;
  }

  // Drop empty bins, then fold sparse bins into a neighbor until every
  // surviving bin meets the occupancy floor (or only one bin remains).
  std::erase_if(bins, [](const WorkBin& b) { return b.count == 0; });
  const auto merge_into = [&](std::size_t from, std::size_t to) {
    bins[to].edge_lo = std::min(bins[to].edge_lo, bins[from].edge_lo);
    bins[to].edge_hi = std::max(bins[to].edge_hi, bins[from].edge_hi);
    bins[to].count += bins[from].count;
    bins[to].sum_y += bins[from].sum_y;
    bins[to].sum_y_sq += bins[from].sum_y_sq;
    bins.erase(bins.begin() + static_cast<std::ptrdiff_t>(from));
  };
  bool merged = true;
  while (merged && bins.size() > 1) {
    merged = false;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (bins[i].count < static_cast<std::size_t>(config.min_bin_count)) {
        if (i + 1 < bins.size())
          merge_into(i, i + 1);
        else
          merge_into(i, i - 1);
        merged = true;
        break;
      }
    }
  }

  return finalize(bins, x_min, log_step, dropped);
}

PowerLawFit fit_power_law(const BinnedSeries& binned, const FitConfig& config) {
  if (binned.size() < 3) {
    throw InsufficientDataError("power-law fit needs >= 3 bins, got " +
                                std::to_string(binned.size()));
  }
  require_positive_means(binned);

  std::vector<double> log_x(binned.size()), log_y(binned.size());
  for (std::size_t i = 0; i < binned.size(); ++i) {
    log_x[i] = std::log(binned.bin_centers[i]);
    log_y[i] = std::log(binned.bin_means[i]);
  }
  const Line line = fit_line(log_x, log_y, bin_weights(binned, config));

  PowerLawFit fit;
  fit.exponent = line.slope;
  fit.exponent_se = line.slope_se;
  fit.amplitude = std::exp(line.intercept);
  // First-order propagation through exp.
  fit.amplitude_se = fit.amplitude * line.intercept_se;
  fit.residual_rms = line.residual_rms;
  fit.n_bins = binned.size();
  return fit;
}

PiecewisePowerLawFit fit_piecewise_power_law(const BinnedSeries& binned,
                                             std::optional<double> breakpoint,
                                             const FitConfig& config) {
  const auto split_at = [&](double bp) {
    std::size_t split = 0;
    while (split < binned.size() && binned.bin_centers[split] < bp) ++split;
    return split;
  };
  const auto fit_split = [&](double bp, std::size_t split) {
    PiecewisePowerLawFit fit;
    fit.low = fit_power_law(slice(binned, 0, split), config);
    fit.high = fit_power_law(slice(binned, split, binned.size()), config);
    fit.breakpoint = bp;
    return fit;
  };

  if (breakpoint) {
    const std::size_t split = split_at(*breakpoint);
    if (split < 3 || binned.size() - split < 3) {
      throw InsufficientDataError(
          "piecewise fit needs >= 3 bins on each side of the breakpoint");
    }
    return fit_split(*breakpoint, split);
  }

  if (binned.size() < 6)
    throw InsufficientDataError("breakpoint search needs >= 6 bins");

  // Candidates are the shared edges between adjacent bins; for geometric
  // bins that edge is the geometric midpoint of the two centers. Strict
  // improvement keeps the first (smallest) candidate on ties.
  PiecewisePowerLawFit best;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t i = 2; i + 4 <= binned.size(); ++i) {
    const double candidate =
        std::sqrt(binned.bin_centers[i] * binned.bin_centers[i + 1]);
    PiecewisePowerLawFit fit = fit_split(candidate, i + 1);
    const double objective =
        total_squared_residual(fit.low) + total_squared_residual(fit.high);
    if (objective < best_objective) {
      best_objective = objective;
      best = fit;
    }
  }
  best.breakpoint_searched = true;
  return best;
}

StretchedLogFit fit_stretched_log_fixed_b(const BinnedSeries& binned,
                                          double b_expo) {
  if (binned.size() < 4) {
    throw InsufficientDataError("stretched-log fit needs >= 4 bins, got " +
                                std::to_string(binned.size()));
  }
  if (!(b_expo > 0.0)) throw DomainError("stretched-log b must be > 0");
  require_positive_means(binned);
  for (double center : binned.bin_centers) {
    if (!(center > 1.0))
      throw DomainError("stretched-log fit needs bin centers > 1");
  }

  std::vector<double> t(binned.size()), log_y(binned.size()),
      weights(binned.size(), 1.0);
  for (std::size_t i = 0; i < binned.size(); ++i) {
    t[i] = std::pow(std::log(binned.bin_centers[i]), b_expo);
    log_y[i] = std::log(binned.bin_means[i]);
  }
  const Line line = fit_line(t, log_y, weights);

  StretchedLogFit fit;
  fit.a_coeff = line.slope;
  fit.b_expo = b_expo;
  fit.c_offset = line.intercept;
  fit.a_se = line.slope_se;
  fit.c_se = line.intercept_se;
  fit.residual_rms = line.residual_rms;
  return fit;
}

StretchedLogFit fit_stretched_log(const BinnedSeries& binned) {
  if (binned.size() < 4) {
    throw InsufficientDataError("stretched-log fit needs >= 4 bins, got " +
                                std::to_string(binned.size()));
  }
  require_positive_means(binned);
  for (double center : binned.bin_centers) {
    if (!(center > 1.0))
      throw DomainError("stretched-log fit needs bin centers > 1");
  }

  const std::size_t n = binned.size();
  std::vector<double> log_x(n), log_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_x[i] = std::log(binned.bin_centers[i]);
    log_y[i] = std::log(binned.bin_means[i]);
  }
  const ResidualFn residuals = [&](std::span<const double> params,
                                   std::vector<double>& out) {
    const double a = params[0], b = params[1], c = params[2];
    for (std::size_t i = 0; i < n; ++i)
      out[i] = log_y[i] - (c + a * std::pow(log_x[i], b));
  };
  const FeasibleFn feasible = [](std::span<const double> params) {
    return params[1] > 0.0;
  };

  // Table-3-style fits have shallow competing optima; start from several b
  // values with (a, c) linearized at each.
  static constexpr double kStarts[] = {0.25, 0.5, 0.75, 1.0};
  std::optional<LeastSquaresResult> best;
  for (double b0 : kStarts) {
    const StretchedLogFit init = fit_stretched_log_fixed_b(binned, b0);
    LeastSquaresResult solution = fit_least_squares(
        residuals, n, {init.a_coeff, b0, init.c_offset}, {}, feasible);
    if (!best || solution.objective < best->objective) best = std::move(solution);
  }
  if (!best->converged) {
    throw ConvergenceError("stretched-log fit did not converge", best->params,
                           best->objective);
  }
  return from_least_squares(*best, n);
}

BootstrapSe bootstrap_power_law_se(const BinnedSeries& binned, int resamples,
                                   std::uint64_t seed,
                                   const FitConfig& config) {
  if (binned.size() < 3)
    throw InsufficientDataError("bootstrap needs >= 3 bins");
  Rng rng(seed);
  std::vector<double> amplitudes, exponents;
  for (int r = 0; r < resamples; ++r) {
    BinnedSeries sample;
    sample.bin_centers.reserve(binned.size());
    for (std::size_t i = 0; i < binned.size(); ++i) {
      const auto pick = static_cast<std::size_t>(
          rng.uniform01() * static_cast<double>(binned.size()));
      const std::size_t idx = std::min(pick, binned.size() - 1);
      sample.bin_centers.push_back(binned.bin_centers[idx]);
      sample.bin_means.push_back(binned.bin_means[idx]);
      sample.bin_sems.push_back(binned.bin_sems[idx]);
      sample.bin_counts.push_back(binned.bin_counts[idx]);
    }
    try {
      const PowerLawFit fit = fit_power_law(sample, config);
      amplitudes.push_back(fit.amplitude);
      exponents.push_back(fit.exponent);
    } catch (const Error&) {
      // Degenerate resample (all bins identical); skip it.
    }
  }
  BootstrapSe se;
  se.resamples_used = static_cast<int>(exponents.size());
  if (exponents.size() < 2) return se;
  const auto stddev = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  se.amplitude_se = stddev(amplitudes);
  se.exponent_se = stddev(exponents);
  return se;
}

}  // namespace jci
