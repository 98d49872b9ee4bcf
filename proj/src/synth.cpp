#include "jci/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "jci/errors.hpp"
#include "jci/rng.hpp"

namespace jci {

namespace {

using nlohmann::json;

void validate(const SynthSpec& spec) {
  if (spec.n_journals < 1)
    throw ValidationError("synth spec: n_journals must be >= 1");
  if (spec.n_years < 1)
    throw ValidationError("synth spec: n_years must be >= 1");
  if (!(spec.citation_distribution.log_sd > 0.0))
    throw ValidationError("synth spec: citation log_sd must be > 0");
  if (!(spec.coupling_amplitude > 0.0))
    throw ValidationError("synth spec: coupling_amplitude must be > 0");
  if (spec.noise_level < 0.0)
    throw ValidationError("synth spec: noise_level must be >= 0");
  if (!(spec.publication_model.mean > 0.0))
    throw ValidationError("synth spec: publication mean must be > 0");
  if (spec.publication_model.spread < 0.0)
    throw ValidationError("synth spec: publication spread must be >= 0");
  if (spec.publication_model.jitter < 0.0 ||
      spec.publication_model.jitter >= 1.0)
    throw ValidationError("synth spec: publication jitter must be in [0, 1)");
  if (spec.yearly_persistence < 0.0 || spec.yearly_persistence > 1.0)
    throw ValidationError("synth spec: yearly_persistence must be in [0, 1]");
}

std::string journal_id(int index, int width) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "J%0*d", width, index + 1);
  return buffer;
}

int id_width(int n_journals) {
  int width = 1;
  for (int v = n_journals; v >= 10; v /= 10) ++width;
  return width < 4 ? 4 : width;
}

json spec_json(const SynthSpec& spec) {
  return json{
      {"n_journals", spec.n_journals},
      {"n_years", spec.n_years},
      {"first_year", spec.first_year},
      {"citation_distribution",
       {{"log_mean", spec.citation_distribution.log_mean},
        {"log_sd", spec.citation_distribution.log_sd}}},
      {"coupling_amplitude", spec.coupling_amplitude},
      {"coupling_exponent", spec.coupling_exponent},
      {"noise_level", spec.noise_level},
      {"publication_model",
       {{"mean", spec.publication_model.mean},
        {"spread", spec.publication_model.spread},
        {"jitter", spec.publication_model.jitter}}},
      {"yearly_persistence", spec.yearly_persistence},
      {"seed", spec.seed},
  };
}

void reject_unknown_keys(const json& object, const char* where,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (const char* name : known)
      if (key == name) found = true;
    if (!found) {
      throw ValidationError(std::string("synth spec: unknown key \"") + key +
                            "\" in " + where);
    }
  }
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  validate(spec);

  const double mu = spec.citation_distribution.log_mean;
  const double sigma = spec.citation_distribution.log_sd;
  const double rho = spec.yearly_persistence;
  const double innovation_scale = sigma * std::sqrt(1.0 - rho * rho);
  const int width = id_width(spec.n_journals);

  Rng rng(spec.seed);
  std::vector<JournalYearRecord> records;
  records.reserve(static_cast<std::size_t>(spec.n_journals) *
                  static_cast<std::size_t>(spec.n_years));
  std::vector<double> log_n(static_cast<std::size_t>(spec.n_years));

  // Draw order per journal (one shared stream, documented in the manifest):
  // publication level z, initial log n z, the AR innovations, then one
  // (coupling noise z, jitter u) pair per year.
  for (int j = 0; j < spec.n_journals; ++j) {
    const std::string id = journal_id(j, width);
    const double journal_mean_pubs =
        spec.publication_model.mean *
        std::exp(spec.publication_model.spread * rng.normal());

    log_n[0] = mu + sigma * rng.normal();
    for (int t = 1; t < spec.n_years; ++t) {
      log_n[static_cast<std::size_t>(t)] =
          mu + rho * (log_n[static_cast<std::size_t>(t) - 1] - mu) +
          innovation_scale * rng.normal();
    }

    for (int t = 0; t < spec.n_years; ++t) {
      const double coupling_noise = spec.noise_level * rng.normal();
      const double jitter_draw = rng.uniform(-1.0, 1.0);

      JournalYearRecord record;
      record.journal_id = id;
      record.year = spec.first_year + t;
      // Counts are integral; the impact factor is computed from the stored
      // (rounded) n so the panel is exactly self-consistent.
      record.annual_citations =
          std::llround(std::exp(log_n[static_cast<std::size_t>(t)]));
      record.publications = std::llround(std::max(
          1.0, std::round(journal_mean_pubs *
                          (1.0 + spec.publication_model.jitter * jitter_draw))));
      record.reported_impact_factor =
          spec.coupling_amplitude *
          std::pow(static_cast<double>(record.annual_citations),
                   spec.coupling_exponent) *
          std::exp(coupling_noise);
      records.push_back(std::move(record));
    }
  }

  SynthResult result;
  result.panel = Panel::from_records(std::move(records));

  json manifest{
      {"generator", "jci-synth"},
      {"model",
       {{"citations",
         "AR(1) in log space: log n(t+1) = mu + rho*(log n(t) - mu) + "
         "sigma*sqrt(1 - rho^2)*z; log n(0) = mu + sigma*z"},
        {"impact", "I = a * n^xi * exp(noise_level * z)"},
        {"publications",
         "N = max(1, round(journal_mean * (1 + jitter*u))), journal_mean = "
         "mean * exp(spread * z)"},
        {"rng",
         "xoshiro256++ seeded via splitmix64; uniforms (0,1] from the top 53 "
         "bits; normals via Box-Muller; single stream, draw order: per "
         "journal [pub z, initial z, AR z..., per year (noise z, jitter u)]"}}},
      {"true_parameters", spec_json(spec)},
  };
  result.manifest_json = manifest.dump(2) + "\n";
  return result;
}

std::vector<PointXY> generate_two_regime(const TwoRegimeSpec& spec) {
  if (spec.n_points < 1)
    throw ValidationError("two-regime spec: n_points must be >= 1");
  if (!(spec.x_min > 0.0))
    throw ValidationError("two-regime spec: x_min must be > 0");
  if (!(spec.x_max > spec.x_min))
    throw ValidationError("two-regime spec: x_max must be > x_min");
  if (!(spec.amplitude > 0.0))
    throw ValidationError("two-regime spec: amplitude must be > 0");
  if (!(spec.breakpoint > spec.x_min) || !(spec.breakpoint < spec.x_max))
    throw ValidationError(
        "two-regime spec: breakpoint must lie inside (x_min, x_max)");
  if (spec.noise_level < 0.0)
    throw ValidationError("two-regime spec: noise_level must be >= 0");

  // Continuity at the breakpoint fixes the high-side amplitude.
  const double high_amplitude =
      spec.amplitude * std::pow(spec.breakpoint,
                                spec.exponent_low - spec.exponent_high);

  Rng rng(spec.seed);
  const double log_lo = std::log(spec.x_min);
  const double log_hi = std::log(spec.x_max);
  std::vector<PointXY> points;
  points.reserve(static_cast<std::size_t>(spec.n_points));
  for (int i = 0; i < spec.n_points; ++i) {
    const double x = std::exp(rng.uniform(log_lo, log_hi));
    const double noise = spec.noise_level * rng.normal();
    const double y =
        x < spec.breakpoint
            ? spec.amplitude * std::pow(x, spec.exponent_low)
            : high_amplitude * std::pow(x, spec.exponent_high);
    points.push_back({x, y * std::exp(noise)});
  }
  return points;
}

std::string spec_to_json(const SynthSpec& spec) {
  return spec_json(spec).dump(2) + "\n";
}

SynthSpec spec_from_json(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("synth spec: invalid JSON: ") + e.what());
  }
  if (!parsed.is_object())
    throw ValidationError("synth spec: top level must be a JSON object");

  SynthSpec spec;
  try {
    reject_unknown_keys(parsed, "top level",
                        {"n_journals", "n_years", "first_year",
                         "citation_distribution", "coupling_amplitude",
                         "coupling_exponent", "noise_level",
                         "publication_model", "yearly_persistence", "seed"});
    if (parsed.contains("n_journals"))
      spec.n_journals = parsed.at("n_journals").get<int>();
    if (parsed.contains("n_years"))
      spec.n_years = parsed.at("n_years").get<int>();
    if (parsed.contains("first_year"))
      spec.first_year = parsed.at("first_year").get<int>();
    if (parsed.contains("citation_distribution")) {
      const json& dist = parsed.at("citation_distribution");
      reject_unknown_keys(dist, "citation_distribution",
                          {"log_mean", "log_sd"});
      if (dist.contains("log_mean"))
        spec.citation_distribution.log_mean =
            dist.at("log_mean").get<double>();
      if (dist.contains("log_sd"))
        spec.citation_distribution.log_sd = dist.at("log_sd").get<double>();
    }
    if (parsed.contains("coupling_amplitude"))
      spec.coupling_amplitude = parsed.at("coupling_amplitude").get<double>();
    if (parsed.contains("coupling_exponent"))
      spec.coupling_exponent = parsed.at("coupling_exponent").get<double>();
    if (parsed.contains("noise_level"))
      spec.noise_level = parsed.at("noise_level").get<double>();
    if (parsed.contains("publication_model")) {
      const json& pubs = parsed.at("publication_model");
      reject_unknown_keys(pubs, "publication_model",
                          {"mean", "spread", "jitter"});
      if (pubs.contains("mean"))
        spec.publication_model.mean = pubs.at("mean").get<double>();
      if (pubs.contains("spread"))
        spec.publication_model.spread = pubs.at("spread").get<double>();
      if (pubs.contains("jitter"))
        spec.publication_model.jitter = pubs.at("jitter").get<double>();
    }
    if (parsed.contains("yearly_persistence"))
      spec.yearly_persistence = parsed.at("yearly_persistence").get<double>();
    if (parsed.contains("seed"))
      spec.seed = parsed.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synth spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

}  // namespace jci
