#pragma once

// Internal helper shared by the fitting translation units; not part of the
// public API.

#include <cmath>
#include <span>

#include "jci/errors.hpp"

namespace jci::detail {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double residual_rms = 0.0;
};

// Weighted straight-line least squares with residual-variance-scaled
// standard errors. residual_rms is the plain (unweighted) RMS.
inline Line fit_line(std::span<const double> x, std::span<const double> y,
                     std::span<const double> weights) {
  const std::size_t n = x.size();
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weights[i];
    swx += weights[i] * x[i];
    swy += weights[i] * y[i];
  }
  const double mean_x = swx / sw;
  const double mean_y = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    sxx += weights[i] * dx * dx;
    sxy += weights[i] * dx * (y[i] - mean_y);
  }
  if (sxx <= 0.0)
    throw DegenerateSampleError("line fit: x values are all equal");

  Line line;
  line.slope = sxy / sxx;
  line.intercept = mean_y - line.slope * mean_x;

  double chi_sq = 0.0, rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    chi_sq += weights[i] * r * r;
    rss += r * r;
  }
  line.residual_rms = std::sqrt(rss / static_cast<double>(n));
  if (n > 2) {
    const double variance = chi_sq / static_cast<double>(n - 2);
    const double var_slope = variance / sxx;
    const double var_intercept =
        variance * (1.0 / sw + mean_x * mean_x / sxx);
    line.slope_se = var_slope > 0.0 ? std::sqrt(var_slope) : 0.0;
    line.intercept_se = var_intercept > 0.0 ? std::sqrt(var_intercept) : 0.0;
  }
  return line;
}

}  // namespace jci::detail
