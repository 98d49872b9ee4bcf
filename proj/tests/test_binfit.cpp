#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "jci/binfit.hpp"
#include "jci/errors.hpp"
#include "jci/rng.hpp"
#include "jci/synth.hpp"

using namespace jci;

namespace {

// BinnedSeries with one point per bin, exactly on the supplied curve. Keeps
// fitter round-trip checks free of binning distortion.
BinnedSeries series_from_points(std::vector<PointXY> points) {
  std::sort(points.begin(), points.end(),
            [](const PointXY& a, const PointXY& b) { return a.x < b.x; });
  BinnedSeries series;
  for (const PointXY& p : points) {
    series.bin_centers.push_back(p.x);
    series.bin_means.push_back(p.y);
    series.bin_sems.push_back(0.0);
    series.bin_counts.push_back(1);
  }
  return series;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> xs(count);
  const double step = (std::log(hi) - std::log(lo)) /
                      static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    xs[i] = lo * std::exp(step * static_cast<double>(i));
  return xs;
}

BinnedSeries power_law_series(double amplitude, double exponent, double lo,
                              double hi, std::size_t count) {
  std::vector<PointXY> points;
  for (double x : log_spaced(lo, hi, count))
    points.push_back({x, amplitude * std::pow(x, exponent)});
  return series_from_points(std::move(points));
}

}  // namespace

TEST_CASE("log_bin collapses coincident points into one bin") {
  std::vector<PointXY> points{{10.0, 2.0}, {10.0, 4.0}};
  BinnedSeries series = log_bin(points);
  REQUIRE(series.size() == 1);
  CHECK(series.bin_counts[0] == 2);
  CHECK(series.bin_means[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(series.dropped == 0);
  // Sample SEM of {2, 4}: sd = sqrt(2), sem = 1.
  CHECK(series.bin_sems[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log_bin drops non-positive x and throws when nothing is left") {
  std::vector<PointXY> points{{0.0, 5.0}, {10.0, 1.0}, {-3.0, 2.0},
                              {10.0, 3.0}, {10.0, 5.0}};
  BinnedSeries series = log_bin(points);
  CHECK(series.dropped == 2);
  REQUIRE(series.size() == 1);
  CHECK(series.bin_counts[0] == 3);

  std::vector<PointXY> none{{0.0, 1.0}, {-1.0, 2.0}};
  CHECK_THROWS_AS(log_bin(none), EmptyDataError);
}

TEST_CASE("log_bin reproduces an enumerated occupancy pattern") {
  // The grid is anchored at the smallest retained x, so an explicit anchor
  // point goes in first; the patterned points then sit strictly inside each
  // tenth-of-a-decade bin (offsets 0.07, 0.31, 0.63 above each anchor edge),
  // three per bin over three decades, and the expected occupancy can be
  // written down by checking plain interval membership.
  const int bins_per_decade = 10;
  const double log_step = std::log(10.0) / bins_per_decade;
  const double anchor = std::exp(log_step * 0.10);
  std::vector<PointXY> points{{anchor, 1.0}};
  for (int bin = 0; bin < 30; ++bin) {
    for (double offset : {0.17, 0.41, 0.73}) {
      const double x = std::exp(log_step * (bin + offset));
      points.push_back({x, 1.0});
    }
  }
  BinnedSeries series = log_bin(points, {bins_per_decade, 3});
  REQUIRE(series.size() == 30);
  for (int bin = 0; bin < 30; ++bin) {
    CHECK(series.bin_counts[bin] == (bin == 0 ? 4u : 3u));
    // Geometric center of [anchor e^(b h), anchor e^((b+1) h)].
    const double center = anchor * std::exp(log_step * (bin + 0.5));
    CHECK(series.bin_centers[bin] ==
          doctest::Approx(center).epsilon(1e-9));
    // Independent membership check against the long-double bin edges.
    const long double lo = static_cast<long double>(anchor) *
                           std::exp(static_cast<long double>(log_step) * bin);
    const long double hi = static_cast<long double>(anchor) *
                           std::exp(static_cast<long double>(log_step) * (bin + 1));
    int inside = 0;
    for (const PointXY& p : points) {
      if (static_cast<long double>(p.x) >= lo && static_cast<long double>(p.x) < hi)
        ++inside;
    }
    CHECK(inside == (bin == 0 ? 4 : 3));
  }
}

TEST_CASE("log_bin conserves points between bins and drops") {
  Rng rng(31);
  std::vector<PointXY> points;
  for (int i = 0; i < 2000; ++i) {
    const double x = (i % 17 == 0) ? 0.0 : std::exp(rng.uniform(0.0, 9.0));
    points.push_back({x, rng.normal()});
  }
  for (auto min_count : {1, 3, 7}) {
    BinnedSeries series = log_bin(points, {10, min_count});
    std::size_t total = series.dropped;
    for (std::size_t c : series.bin_counts) total += c;
    CHECK(total == points.size());
    for (std::size_t c : series.bin_counts)
      CHECK(c >= static_cast<std::size_t>(min_count));
  }
}

TEST_CASE("log_bin merges sparse bins into their right neighbor") {
  // Three decades at one bin per decade: 4 points, then 1, then 4. Offsets
  // keep every point strictly inside its decade bin.
  std::vector<PointXY> points;
  for (double off : {0.1, 0.3, 0.5, 0.7}) points.push_back({std::pow(10.0, off), 1.0});
  points.push_back({std::pow(10.0, 1.5), 2.0});
  for (double off : {2.2, 2.4, 2.6, 2.8}) points.push_back({std::pow(10.0, off), 3.0});

  BinnedSeries series = log_bin(points, {1, 3});
  REQUIRE(series.size() == 2);
  CHECK(series.bin_counts[0] == 4);
  CHECK(series.bin_counts[1] == 5);
  // The merged bin spans decades two and three; its mean mixes 2 and 3.
  CHECK(series.bin_means[1] == doctest::Approx((2.0 + 4.0 * 3.0) / 5.0).epsilon(1e-12));
  // Geometric center of the merged span [10^1, 10^3].
  const double x_min = std::pow(10.0, 0.1);
  const double log_step = std::log(10.0);
  CHECK(series.bin_centers[1] ==
        doctest::Approx(x_min * std::exp(log_step * 2.0)).epsilon(1e-9));

  SUBCASE("a sparse final bin merges leftward") {
    std::vector<PointXY> tail;
    for (double off : {0.1, 0.3, 0.5}) tail.push_back({std::pow(10.0, off), 1.0});
    tail.push_back({std::pow(10.0, 1.5), 9.0});
    BinnedSeries merged = log_bin(tail, {1, 3});
    REQUIRE(merged.size() == 1);
    CHECK(merged.bin_counts[0] == 4);
    CHECK(merged.bin_means[0] == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("fit_power_law recovers exact parameters from noiseless data") {
  BinnedSeries series = power_law_series(2.0, 0.5, 1.0, 1e4, 20);
  PowerLawFit fit = fit_power_law(series);
  CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fit.residual_rms < 1e-10);
  CHECK(fit.n_bins == 20);
  CHECK(fit.amplitude_se >= 0.0);
  CHECK(fit.exponent_se >= 0.0);

  SUBCASE("random exact parameters round-trip") {
    Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
      const double a = std::exp(rng.uniform(-4.0, 4.0));
      const double xi = rng.uniform(-1.5, 1.5);
      PowerLawFit f = fit_power_law(power_law_series(a, xi, 0.5, 2e3, 12));
      CHECK(f.amplitude == doctest::Approx(a).epsilon(1e-8));
      CHECK(f.exponent == doctest::Approx(xi).epsilon(1e-8));
    }
  }
}

TEST_CASE("fit_power_law rejects unusable series") {
  CHECK_THROWS_AS(fit_power_law(power_law_series(1.0, 1.0, 1.0, 10.0, 2)),
                  InsufficientDataError);
  BinnedSeries bad = power_law_series(1.0, 1.0, 1.0, 100.0, 5);
  bad.bin_means[2] = 0.0;
  CHECK_THROWS_AS(fit_power_law(bad), DomainError);
  bad.bin_means[2] = -1.0;
  CHECK_THROWS_AS(fit_power_law(bad), DomainError);
}

TEST_CASE("fit_power_law rescaling moves only the amplitude") {
  BinnedSeries series = power_law_series(0.7, 0.8, 2.0, 5e3, 15);
  PowerLawFit base = fit_power_law(series);
  const double k = 8.0;
  BinnedSeries scaled = series;
  for (double& c : scaled.bin_centers) c *= k;
  PowerLawFit shifted = fit_power_law(scaled);
  CHECK(shifted.exponent == doctest::Approx(base.exponent).epsilon(1e-10));
  CHECK(shifted.amplitude ==
        doctest::Approx(base.amplitude * std::pow(k, -base.exponent))
            .epsilon(1e-10));
}

TEST_CASE("fit_power_law estimates the exponent of a noisy scatter") {
  // Multiplicative 10% lognormal noise on y = 0.04 x^0.5 over five decades.
  Rng rng(33);
  std::vector<PointXY> points;
  for (int i = 0; i < 5000; ++i) {
    const double x = std::exp(rng.uniform(std::log(10.0), std::log(1e6)));
    const double y = 0.04 * std::pow(x, 0.5) * std::exp(0.1 * rng.normal());
    points.push_back({x, y});
  }
  BinnedSeries series = log_bin(points);
  for (FitConfig config : {FitConfig{false}, FitConfig{true}}) {
    PowerLawFit fit = fit_power_law(series, config);
    CHECK(std::abs(fit.exponent - 0.5) < 0.02);
    CHECK(std::abs(fit.amplitude / 0.04 - 1.0) < 0.2);
    CHECK(fit.exponent_se > 0.0);
    CHECK(fit.exponent_se < 0.02);
  }
}

TEST_CASE("piecewise fit with a supplied breakpoint equals two plain fits") {
  BinnedSeries series = power_law_series(1.0, 0.6, 1.0, 1e4, 24);
  // Impose a kink by hand above x = 50 so the sides genuinely differ.
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.bin_centers[i] >= 50.0)
      series.bin_means[i] =
          std::pow(50.0, 0.6 - 1.1) * std::pow(series.bin_centers[i], 1.1);
  }
  PiecewisePowerLawFit split = fit_piecewise_power_law(series, 50.0);
  CHECK(split.breakpoint == 50.0);
  CHECK_FALSE(split.breakpoint_searched);

  BinnedSeries low, high;
  for (std::size_t i = 0; i < series.size(); ++i) {
    BinnedSeries& side = (series.bin_centers[i] < 50.0) ? low : high;
    side.bin_centers.push_back(series.bin_centers[i]);
    side.bin_means.push_back(series.bin_means[i]);
    side.bin_sems.push_back(series.bin_sems[i]);
    side.bin_counts.push_back(series.bin_counts[i]);
  }
  PowerLawFit low_fit = fit_power_law(low);
  PowerLawFit high_fit = fit_power_law(high);
  CHECK(split.low.amplitude == low_fit.amplitude);
  CHECK(split.low.exponent == low_fit.exponent);
  CHECK(split.low.exponent_se == low_fit.exponent_se);
  CHECK(split.high.amplitude == high_fit.amplitude);
  CHECK(split.high.exponent == high_fit.exponent);
  CHECK(split.high.exponent_se == high_fit.exponent_se);

  CHECK(split.low.exponent == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(split.high.exponent == doctest::Approx(1.1).epsilon(1e-10));
}

TEST_CASE("piecewise fit recovers a noiseless synthetic two-regime scatter") {
  TwoRegimeSpec spec;
  spec.n_points = 400;
  spec.x_min = 1.0;
  spec.x_max = 1e4;
  spec.exponent_low = 0.6;
  spec.exponent_high = 1.1;
  spec.breakpoint = 50.0;
  spec.noise_level = 0.0;
  spec.seed = 34;
  BinnedSeries series = series_from_points(generate_two_regime(spec));
  PiecewisePowerLawFit fit = fit_piecewise_power_law(series, 50.0);
  CHECK(fit.low.exponent == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(fit.high.exponent == doctest::Approx(1.1).epsilon(1e-10));
  CHECK(fit.low.amplitude == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("piecewise fit needs three bins on each side") {
  BinnedSeries series = power_law_series(1.0, 1.0, 1.0, 1e4, 12);
  CHECK_THROWS_AS(fit_piecewise_power_law(series, 1e9), InsufficientDataError);
  CHECK_THROWS_AS(fit_piecewise_power_law(series, 1e-9), InsufficientDataError);
}

TEST_CASE("breakpoint search lands near the true kink under noise") {
  TwoRegimeSpec spec;
  spec.n_points = 4000;
  spec.x_min = 1.0;
  spec.x_max = 2.5e3;
  spec.exponent_low = 0.6;
  spec.exponent_high = 1.1;
  spec.breakpoint = 50.0;
  spec.noise_level = 0.05;
  spec.seed = 35;
  BinnedSeries series = log_bin(generate_two_regime(spec));
  PiecewisePowerLawFit fit = fit_piecewise_power_law(series, std::nullopt);
  CHECK(fit.breakpoint_searched);
  CHECK(fit.breakpoint >= 33.0);
  CHECK(fit.breakpoint <= 75.0);
  CHECK(std::abs(fit.low.exponent - 0.6) < 0.05);
  CHECK(std::abs(fit.high.exponent - 1.1) < 0.05);

  // The search needs interior room: six bins minimum.
  BinnedSeries tiny = power_law_series(1.0, 1.0, 1.0, 10.0, 5);
  CHECK_THROWS_AS(fit_piecewise_power_law(tiny, std::nullopt),
                  InsufficientDataError);
}

TEST_CASE("equal slopes on both sides stay statistically equal") {
  TwoRegimeSpec spec;
  spec.n_points = 4000;
  spec.x_min = 1.0;
  spec.x_max = 2.5e3;
  spec.exponent_low = 0.8;
  spec.exponent_high = 0.8;
  spec.breakpoint = 50.0;
  spec.noise_level = 0.05;
  spec.seed = 36;
  BinnedSeries series = log_bin(generate_two_regime(spec));
  PiecewisePowerLawFit fit = fit_piecewise_power_law(series, 50.0);
  const double joint_se = std::hypot(fit.low.exponent_se, fit.high.exponent_se);
  CHECK(std::abs(fit.low.exponent - fit.high.exponent) < 2.0 * joint_se + 1e-6);
}

TEST_CASE("stretched-log fit recovers exact parameters") {
  const double a = 0.40, b = 0.40, c = -6.59;
  // Means exactly on r = exp(c + a (log x)^b); wide support keeps the
  // curvature information strong.
  std::vector<PointXY> points;
  for (double x : log_spaced(10.0, 1e5, 25))
    points.push_back({x, std::exp(c + a * std::pow(std::log(x), b))});
  BinnedSeries series = series_from_points(std::move(points));

  StretchedLogFit fit = fit_stretched_log(series);
  CHECK(fit.a_coeff == doctest::Approx(a).epsilon(1e-6));
  CHECK(fit.b_expo == doctest::Approx(b).epsilon(1e-6));
  CHECK(std::abs(fit.c_offset - c) < 1e-5);
  CHECK(fit.residual_rms < 1e-7);

  // Accepted-step objectives never increase.
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
    CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-15);
}

TEST_CASE("stretched-log fit with spec-like parameters") {
  const double a = 4.32, b = 0.40, c = -6.59;
  std::vector<PointXY> points;
  for (double x : log_spaced(10.0, 1e5, 30))
    points.push_back({x, std::exp(c + a * std::pow(std::log(x), b))});
  StretchedLogFit fit = fit_stretched_log(series_from_points(std::move(points)));
  CHECK(fit.a_coeff == doctest::Approx(a).epsilon(1e-6));
  CHECK(fit.b_expo == doctest::Approx(b).epsilon(1e-6));
  CHECK(std::abs(fit.c_offset - c) < 1e-4);
}

TEST_CASE("stretched-log fit tolerates multiplicative noise on b") {
  Rng rng(37);
  const double a = 4.32, b = 0.40, c = -6.59;
  std::vector<PointXY> points;
  for (int i = 0; i < 4000; ++i) {
    const double x = std::exp(rng.uniform(std::log(10.0), std::log(1e5)));
    const double y =
        std::exp(c + a * std::pow(std::log(x), b)) * std::exp(0.05 * rng.normal());
    points.push_back({x, y});
  }
  StretchedLogFit fit = fit_stretched_log(log_bin(points));
  CHECK(std::abs(fit.b_expo - b) < 0.08);
}

TEST_CASE("stretched-log preconditions") {
  BinnedSeries series = power_law_series(1.0, 1.0, 10.0, 1e3, 3);
  CHECK_THROWS_AS(fit_stretched_log(series), InsufficientDataError);

  BinnedSeries low = power_law_series(1.0, 1.0, 0.5, 2.0, 6);
  CHECK_THROWS_AS(fit_stretched_log(low), DomainError);
  CHECK_THROWS_AS(fit_stretched_log_fixed_b(low, 1.0), DomainError);
}

TEST_CASE("fixed-exponent stretched fit at b = 1 matches the power law") {
  BinnedSeries series = power_law_series(0.04, 0.5, 10.0, 1e5, 14);
  StretchedLogFit fixed = fit_stretched_log_fixed_b(series, 1.0);
  PowerLawFit plain = fit_power_law(series);
  CHECK(fixed.b_expo == 1.0);
  CHECK(fixed.a_coeff == doctest::Approx(plain.exponent).epsilon(1e-8));
  CHECK(std::exp(fixed.c_offset) ==
        doctest::Approx(plain.amplitude).epsilon(1e-8));
}

TEST_CASE("bootstrap errors are deterministic and sane") {
  Rng rng(38);
  std::vector<PointXY> points;
  for (int i = 0; i < 3000; ++i) {
    const double x = std::exp(rng.uniform(std::log(10.0), std::log(1e5)));
    points.push_back({x, 0.7 * std::pow(x, 0.9) * std::exp(0.2 * rng.normal())});
  }
  BinnedSeries series = log_bin(points);
  BootstrapSe first = bootstrap_power_law_se(series, 200, 99);
  BootstrapSe second = bootstrap_power_law_se(series, 200, 99);
  CHECK(first.amplitude_se == second.amplitude_se);
  CHECK(first.exponent_se == second.exponent_se);
  CHECK(first.resamples_used == 200);
  CHECK(first.exponent_se > 0.0);
  CHECK(std::isfinite(first.exponent_se));
  CHECK(std::isfinite(first.amplitude_se));

  BootstrapSe other_seed = bootstrap_power_law_se(series, 200, 100);
  CHECK(other_seed.exponent_se != first.exponent_se);
}
