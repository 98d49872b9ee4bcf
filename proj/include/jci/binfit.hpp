#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace jci {

struct PointXY {
  double x = 0.0;
  double y = 0.0;
};

struct LogBinConfig {
  int bins_per_decade = 10;
  // Bins holding fewer points are merged into a neighbor (right neighbor,
  // leftward for the last bin). A lone bin is never merged away.
  int min_bin_count = 3;
};

// Log-binned scatter data. Centers are the geometric centers of the
// (possibly merged) bin spans; means are arithmetic means of y per bin.
struct BinnedSeries {
  std::vector<double> bin_centers;
  std::vector<double> bin_means;
  std::vector<double> bin_sems;
  std::vector<std::size_t> bin_counts;
  std::size_t dropped = 0;  // points with x <= 0

  std::size_t size() const { return bin_centers.size(); }
};

// Geometric binning spanning [min x, max x]. Points with x <= 0 are dropped
// and counted. Empty bins are omitted. Throws EmptyDataError when nothing
// remains after filtering.
BinnedSeries log_bin(std::span<const PointXY> points,
                     const LogBinConfig& config = {});

struct FitConfig {
  // Weight bins by 1/SEM^2 instead of equally.
  bool weighted = false;
};

struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double amplitude_se = 0.0;
  double exponent_se = 0.0;
  double residual_rms = 0.0;  // RMS residual in log space
  std::size_t n_bins = 0;
};

// Straight-line fit of log(mean) against log(center): exponent = slope,
// amplitude = exp(intercept), standard errors from the regression
// covariance. Needs >= 3 bins and strictly positive means.
PowerLawFit fit_power_law(const BinnedSeries& binned,
                          const FitConfig& config = {});

struct PiecewisePowerLawFit {
  PowerLawFit low;   // bins with center < breakpoint
  PowerLawFit high;  // bins with center >= breakpoint
  double breakpoint = 0.0;
  bool breakpoint_searched = false;
};

// Independent power-law fits below and above the breakpoint. When
// `breakpoint` is absent the interior bin edges are searched and the
// candidate minimizing the total log-space squared residual wins; ties go to
// the smallest breakpoint. Each side needs >= 3 bins.
PiecewisePowerLawFit fit_piecewise_power_law(
    const BinnedSeries& binned, std::optional<double> breakpoint = 50.0,
    const FitConfig& config = {});

struct StretchedLogFit {
  double a_coeff = 0.0;
  double b_expo = 0.0;
  double c_offset = 0.0;
  double a_se = 0.0;
  double b_se = 0.0;
  double c_se = 0.0;
  double residual_rms = 0.0;
  std::size_t iterations = 0;
  bool used_simplex_fallback = false;
  // Objective after each accepted descent step; non-increasing.
  std::vector<double> objective_trace;
};

// Nonlinear least squares of log(mean) = c + a * (log center)^b, multi-start
// over b in {0.25, 0.5, 0.75, 1.0} with (a, c) linearized at each start.
// Needs >= 4 bins with centers > 1. Throws ConvergenceError (carrying the
// best parameters) when the iteration budget runs out.
StretchedLogFit fit_stretched_log(const BinnedSeries& binned);

// Same model with b held fixed: a plain linear fit in (a, c). At b = 1 this
// coincides with fit_power_law up to the exp/log reparameterization.
StretchedLogFit fit_stretched_log_fixed_b(const BinnedSeries& binned,
                                          double b_expo);

struct BootstrapSe {
  double amplitude_se = 0.0;
  double exponent_se = 0.0;
  int resamples_used = 0;
};

// Seeded bootstrap over bins (resampled with replacement) as a cross-check
// on the regression's analytic standard errors.
BootstrapSe bootstrap_power_law_se(const BinnedSeries& binned, int resamples,
                                   std::uint64_t seed,
                                   const FitConfig& config = {});

}  // namespace jci
