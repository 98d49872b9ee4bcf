#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jci/binfit.hpp"
#include "jci/dataset.hpp"

namespace jci {

// Cross-sectional lognormal for annual citations: log n ~ Normal(log_mean,
// log_sd^2) in the stationary state.
struct LognormalParams {
  double log_mean = 6.0;
  double log_sd = 1.0;

  friend bool operator==(const LognormalParams&,
                         const LognormalParams&) = default;
};

// Per-journal mean yearly publications are mean * exp(spread * z); each
// year's count then jitters uniformly by up to +/- jitter around that mean.
struct PublicationModel {
  double mean = 20.0;
  double spread = 0.5;
  double jitter = 0.1;

  friend bool operator==(const PublicationModel&,
                         const PublicationModel&) = default;
};

struct SynthSpec {
  int n_journals = 1000;
  int n_years = 10;
  int first_year = 2004;
  LognormalParams citation_distribution;
  double coupling_amplitude = 0.04;  // a in I = a * n^xi * noise
  double coupling_exponent = 0.5;    // xi
  double noise_level = 0.1;          // lognormal sigma of the coupling noise
  PublicationModel publication_model;
  double yearly_persistence = 0.9;   // AR(1) rho of log n across years
  std::uint64_t seed = 0;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

struct SynthResult {
  Panel panel;
  std::string manifest_json;  // every true parameter plus the model recipe
};

// Deterministic panel draw: per journal, log n follows an AR(1) with the
// spec's persistence around the lognormal cross-section; the reported
// impact factor is a * n^xi times multiplicative lognormal noise;
// publications come from the publication model. Equal specs (seed
// included) produce bit-identical panels.
SynthResult generate(const SynthSpec& spec);

// Piecewise power-law scatter, continuous at the breakpoint, with
// multiplicative lognormal noise; x is sampled log-uniformly.
struct TwoRegimeSpec {
  int n_points = 2000;
  double x_min = 1.0;
  double x_max = 1e4;
  double amplitude = 1.0;  // low-side amplitude; the high side is matched
  double exponent_low = 0.6;
  double exponent_high = 1.1;
  double breakpoint = 50.0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

std::vector<PointXY> generate_two_regime(const TwoRegimeSpec& spec);

// JSON round-trip for spec files. Unknown keys are rejected; omitted keys
// keep their defaults.
std::string spec_to_json(const SynthSpec& spec);
SynthSpec spec_from_json(const std::string& text);

}  // namespace jci
