#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jci {

// Log-binned probability density estimate over a positive-valued sample.
// `values` keeps the retained raw sample (ascending) so that downstream
// estimators (tail MLE, moment matching) can work on unbinned data.
struct EmpiricalDistribution {
  std::vector<double> bin_centers;     // geometric centers, log-spaced
  std::vector<double> bin_widths;      // arithmetic widths (hi - lo)
  std::vector<double> density;         // probability per unit x, per bin
  std::vector<std::size_t> bin_counts;
  std::vector<double> values;          // retained values, ascending
  double sample_mean = 0.0;            // mean of the retained raw values
  std::size_t sample_size = 0;         // retained count
  std::size_t dropped = 0;             // non-positive / out-of-range inputs

  std::size_t size() const { return bin_centers.size(); }
};

// The (x/<x>, X(x)*<x>) transform of an EmpiricalDistribution. The change
// of variables has unit Jacobian, so normalization carries over exactly.
struct ScaledDistribution {
  std::vector<double> scaled_x;
  std::vector<double> scaled_density;
  std::vector<double> scaled_widths;
  std::string source_label;
  double sample_mean = 0.0;  // the <x> that was divided out
  std::size_t sample_size = 0;
};

enum class TailKind { lognormal, power };

// Inclusive range of bin centers a tail/body fit is restricted to.
struct FitRange {
  double x_lo = 0.0;
  double x_hi = std::numeric_limits<double>::infinity();
};

// Result of fitting a parametric form to a (portion of a) binned density.
// Lognormal fits fill mu/sigma and the moment-matched comparison values;
// power fits fill gamma plus the maximum-likelihood cross-check.
struct TailFit {
  TailKind kind = TailKind::lognormal;
  double mu = 0.0;
  double sigma = 0.0;
  double mu_se = 0.0;
  double sigma_se = 0.0;
  double moment_mu = 0.0;     // mean of log values (comparison, not the fit)
  double moment_sigma = 0.0;  // std dev of log values
  double gamma = 0.0;
  double gamma_se = 0.0;
  double mle_gamma = 0.0;     // Pareto tail-index cross-check
  double mle_gamma_se = 0.0;
  std::size_t tail_sample_size = 0;  // raw values entering the MLE
  FitRange fit_range;
  std::size_t n_bins = 0;
  double residual_rms = 0.0;
  std::size_t iterations = 0;
  bool used_simplex_fallback = false;
};

// Log-binned normalized density of the positive entries of `values`.
// Zeros and negatives are dropped and counted. Requires >= 10 positive
// values. Bins with no samples are omitted; sum(density * width) = 1.
EmpiricalDistribution empirical_pdf(std::span<const double> values,
                                    int bins_per_decade = 10);

// Same, but over caller-supplied ascending bin edges (values outside
// [edges.front(), edges.back()] are dropped; the top edge is inclusive).
EmpiricalDistribution empirical_pdf_with_edges(std::span<const double> values,
                                               std::span<const double> edges);

// Rescales x by 1/<x> and density by <x>.
ScaledDistribution scale_collapse(const EmpiricalDistribution& dist,
                                  std::string_view source_label = "");

// Root-mean-square difference of log densities over the overlap of the two
// supports, evaluated at both curves' bin positions with log-log linear
// interpolation. Zero for identical curves.
double collapse_distance(const ScaledDistribution& a,
                         const ScaledDistribution& b);

// Pointwise median of several scaled curves on a shared geometric grid
// spanning the intersection of their supports.
ScaledDistribution median_curve(const std::vector<ScaledDistribution>& curves,
                                int points_per_decade = 10);

// Concatenates the groups after dividing each by its own mean; the pooled
// sample feeds empirical_pdf to build a collapsed curve across years.
std::vector<double> pool_scaled(
    const std::vector<std::vector<double>>& groups);

// Least squares of log density against the log of the lognormal density
// form, over bins inside `range`. Needs >= 4 such bins.
TailFit fit_lognormal(const EmpiricalDistribution& dist,
                      const FitRange& range = FitRange{});

// Straight-line fit of log density vs log x over bins with center >= x_min
// (needs >= 3), reporting gamma = -slope. Trailing bins past the last one
// holding at least 5 samples are excluded from the regression (occupied
// sub-one-count bins overstate the density and flatten the slope). A Pareto
// maximum-likelihood estimate over all raw values >= x_min is reported
// alongside as a cross-check.
TailFit fit_power_tail(const EmpiricalDistribution& dist, double x_min);

// The exponent relation gamma_r = gamma_I * xi - xi + 1 solved for xi.
double xi_from_tail_exponents(double gamma_i, double gamma_r);

}  // namespace jci
