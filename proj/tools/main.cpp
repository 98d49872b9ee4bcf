// jci — journal citation indices toolkit.
//
// Subcommands: validate, indices, correlate, autocorr, fit, dist, synth,
// report. Exit codes: 0 success, 1 usage, 2 data error, 3 numerical
// failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jci/binfit.hpp"
#include "jci/correlation.hpp"
#include "jci/dataset.hpp"
#include "jci/distributions.hpp"
#include "jci/errors.hpp"
#include "jci/indices.hpp"
#include "jci/report.hpp"
#include "jci/synth.hpp"

namespace {

using nlohmann::json;

// Bad flag values discovered after CLI11 parsing still count as usage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct YearSelection {
  std::optional<int> first;
  std::optional<int> last;
};

int parse_year(const std::string& text) {
  int year = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), year);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw UsageError("invalid year '" + text + "'");
  return year;
}

YearSelection parse_years(const std::string& text) {
  if (text == "all") return {};
  const auto pos = text.find("..");
  if (pos == std::string::npos) {
    const int year = parse_year(text);
    return {year, year};
  }
  YearSelection sel{parse_year(text.substr(0, pos)),
                    parse_year(text.substr(pos + 2))};
  if (*sel.first > *sel.last)
    throw UsageError("year range '" + text + "' is empty");
  return sel;
}

std::optional<double> parse_breakpoint(const std::string& text) {
  if (text == "search") return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(value > 0.0))
    throw UsageError("invalid breakpoint '" + text +
                     "' (want a positive number or 'search')");
  return value;
}

jci::IndexKind parse_index(const std::string& name) {
  const auto kind = jci::index_from_name(name);
  if (!kind)
    throw UsageError("unknown index '" + name +
                     "' (valid: n, I, r, rprime)");
  return *kind;
}

// Shortest round-trip decimal rendering (full precision).
std::string full_precision(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  (void)ec;
  return std::string(buffer, ptr);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw jci::ValidationError("cannot write " + path);
  out << content;
  if (!out) throw jci::ValidationError("failed writing " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw jci::ValidationError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Selected years (ascending) plus the windowed-rate YearRange they induce.
struct PanelView {
  jci::Panel panel;
  std::vector<int> years;
  jci::YearRange window;
  jci::IndexTable table;
};

PanelView load_panel(const std::string& input, const YearSelection& sel) {
  PanelView view;
  view.panel = jci::parse_panel_file(input);
  if (view.panel.empty())
    throw jci::EmptyDataError("input panel is empty");
  const int first = sel.first.value_or(view.panel.years().front());
  const int last = sel.last.value_or(view.panel.years().back());
  for (int year : view.panel.years())
    if (year >= first && year <= last) view.years.push_back(year);
  if (view.years.empty())
    throw jci::ValidationError("year selection matches no data");
  view.window = {first, last};
  view.table = jci::index_table(view.panel, view.window);
  return view;
}

std::optional<double> row_value(const jci::IndexRow& row,
                                jci::IndexKind kind) {
  switch (kind) {
    case jci::IndexKind::annual_citations:
      return static_cast<double>(row.annual_citations);
    case jci::IndexKind::impact_factor:
      return row.impact_factor;
    case jci::IndexKind::rate:
      return row.rate;
    case jci::IndexKind::rate_windowed:
      return row.rate_windowed;
  }
  return std::nullopt;
}

json tail_fit_json(const jci::TailFit& fit) {
  json out{
      {"fit_range", {fit.fit_range.x_lo, fit.fit_range.x_hi}},
      {"n_bins", fit.n_bins},
      {"residual_rms", fit.residual_rms},
  };
  if (fit.kind == jci::TailKind::lognormal) {
    out["kind"] = "lognormal";
    out["mu"] = fit.mu;
    out["mu_se"] = fit.mu_se;
    out["sigma"] = fit.sigma;
    out["sigma_se"] = fit.sigma_se;
    out["moment_mu"] = fit.moment_mu;
    out["moment_sigma"] = fit.moment_sigma;
    out["iterations"] = fit.iterations;
    out["used_simplex_fallback"] = fit.used_simplex_fallback;
  } else {
    out["kind"] = "power";
    out["gamma"] = fit.gamma;
    out["gamma_se"] = fit.gamma_se;
    out["mle_gamma"] = fit.mle_gamma;
    out["mle_gamma_se"] = fit.mle_gamma_se;
    out["tail_sample_size"] = fit.tail_sample_size;
  }
  return out;
}

// ---- subcommand states -------------------------------------------------

struct CommonArgs {
  std::string input;
  std::string out;
  std::string years = "all";
};

struct CorrelateArgs : CommonArgs {
  std::string index_a, index_b;
  int year = 0;
};

struct AutocorrArgs : CommonArgs {
  std::string index;
  std::string pairs = "consecutive";
};

struct FitArgs : CommonArgs {
  std::string model;
  std::string x = "n";
  std::string y = "I";
  int year = 0;
  int bins_per_decade = 10;
  int min_bin_count = 3;
  std::string breakpoint = "50";
  bool weighted = false;
};

struct DistArgs : CommonArgs {
  std::string index;
  bool scaled = false;
  std::string fit;  // "", "lognormal", "power"
  double x_min = 1.0;
  int bins_per_decade = 10;
};

struct SynthArgs {
  std::string spec_path;
  std::string out;
  std::string manifest_path;
  std::optional<std::uint64_t> seed;
};

struct ReportArgs {
  std::string input;
  std::string out;
  std::string config_path;
  std::string years;
  std::optional<int> bins_per_decade;
  std::optional<int> min_bin_count;
  std::string breakpoint;
  std::optional<double> x_min;
  bool weighted = false;
  bool weighted_set = false;
  std::optional<int> bootstrap_resamples;
  std::optional<std::uint64_t> bootstrap_seed;
};

// ---- subcommand implementations ----------------------------------------

int run_validate(const CommonArgs& args) {
  jci::ReportConfig config;
  config.input_path = args.input;
  const jci::Diagnostics diag = jci::validate_input(config);
  std::string out;
  out += "records\t" + std::to_string(diag.records) + '\n';
  out += "journals\t" + std::to_string(diag.journals) + '\n';
  out += "warnings\t" + std::to_string(diag.warnings) + '\n';
  out += "year\tjournals\tzero_publications\tmissing_impact\n";
  for (const auto& cov : diag.per_year) {
    out += std::to_string(cov.year) + '\t' + std::to_string(cov.journals) +
           '\t' + std::to_string(cov.zero_publications) + '\t' +
           std::to_string(cov.missing_impact) + '\n';
  }
  write_output(args.out, out);
  return 0;
}

int run_indices(const CommonArgs& args) {
  const PanelView view = load_panel(args.input, parse_years(args.years));
  std::string out = "journal_id\tyear\tn\timpact\trate\trate_windowed\n";
  const auto cell = [](const std::optional<double>& v) {
    return v ? full_precision(*v) : std::string("NA");
  };
  for (const auto& row : view.table.rows) {
    if (row.year < view.window.first || row.year > view.window.last) continue;
    out += row.journal_id + '\t' + std::to_string(row.year) + '\t' +
           std::to_string(row.annual_citations) + '\t' +
           cell(row.impact_factor) + '\t' + cell(row.rate) + '\t' +
           cell(row.rate_windowed) + '\n';
  }
  write_output(args.out, out);
  return 0;
}

int run_correlate(const CorrelateArgs& args) {
  const PanelView view = load_panel(args.input, parse_years(args.years));
  const jci::CorrelationResult result = jci::cross_index_correlation(
      view.table.rows, parse_index(args.index_a), parse_index(args.index_b),
      args.year);
  std::string out = "pair\tR\tK\tdropped\n";
  out += result.pair_description + '\t' + jci::format_g6(result.r_value) +
         '\t' + std::to_string(result.sample_size) + '\t' +
         std::to_string(result.dropped) + '\n';
  write_output(args.out, out);
  return 0;
}

int run_autocorr(const AutocorrArgs& args) {
  const PanelView view = load_panel(args.input, parse_years(args.years));
  const jci::IndexKind kind = parse_index(args.index);

  std::vector<std::pair<int, int>> pairs;
  if (args.pairs == "consecutive") {
    if (view.years.size() < 2)
      throw jci::InsufficientDataError(
          "consecutive pairs need >= 2 years of data");
    pairs = jci::consecutive_year_pairs(view.years);
  } else if (args.pairs == "extremes") {
    if (view.years.size() < 2)
      throw jci::InsufficientDataError("extremes need >= 2 years of data");
    pairs = {{view.years.front(), view.years.back()}};
  } else {
    const auto pos = args.pairs.find(':');
    if (pos == std::string::npos)
      throw UsageError("invalid --pairs '" + args.pairs +
                       "' (want consecutive, extremes, or Y1:Y2)");
    pairs = {{parse_year(args.pairs.substr(0, pos)),
              parse_year(args.pairs.substr(pos + 1))}};
  }

  const auto results =
      jci::auto_correlation_table(view.table.rows, kind, pairs);
  std::string out = "pair\tR\tK\tdropped\n";
  for (const auto& entry : results) {
    const std::string label = std::string(jci::index_name(kind)) + "(" +
                              std::to_string(entry.year_a) + ")~" +
                              std::string(jci::index_name(kind)) + "(" +
                              std::to_string(entry.year_b) + ")";
    if (entry.result) {
      out += label + '\t' + jci::format_g6(entry.result->r_value) + '\t' +
             std::to_string(entry.result->sample_size) + '\t' +
             std::to_string(entry.result->dropped) + '\n';
    } else {
      out += label + "\tnan\t0\t0\n";
    }
  }
  write_output(args.out, out);
  return 0;
}

int run_fit(const FitArgs& args) {
  const PanelView view = load_panel(args.input, parse_years(args.years));
  const jci::IndexKind x_kind = parse_index(args.x);
  const jci::IndexKind y_kind = parse_index(args.y);

  std::vector<jci::PointXY> points;
  for (const auto& row : view.table.rows) {
    if (row.year != args.year) continue;
    const auto x = row_value(row, x_kind);
    const auto y = row_value(row, y_kind);
    if (x && y) points.push_back({*x, *y});
  }
  const jci::BinnedSeries binned =
      jci::log_bin(points, {args.bins_per_decade, args.min_bin_count});
  const jci::FitConfig fit_config{args.weighted};

  json report{{"config",
               {{"input", args.input},
                {"model", args.model},
                {"x", args.x},
                {"y", args.y},
                {"year", args.year},
                {"bins_per_decade", args.bins_per_decade},
                {"min_bin_count", args.min_bin_count},
                {"weighted", args.weighted}}}};
  std::vector<double> fitted(binned.size(), 0.0);

  if (args.model == "power") {
    const jci::PowerLawFit fit = jci::fit_power_law(binned, fit_config);
    report["model"] = "power";
    report["params"] = {{"amplitude", fit.amplitude},
                        {"exponent", fit.exponent}};
    report["ses"] = {{"amplitude_se", fit.amplitude_se},
                     {"exponent_se", fit.exponent_se}};
    report["residual_rms"] = fit.residual_rms;
    report["n_bins"] = fit.n_bins;
    for (std::size_t i = 0; i < binned.size(); ++i)
      fitted[i] =
          fit.amplitude * std::pow(binned.bin_centers[i], fit.exponent);
  } else if (args.model == "piecewise") {
    const auto breakpoint = parse_breakpoint(args.breakpoint);
    report["config"]["breakpoint"] =
        breakpoint ? json(*breakpoint) : json("search");
    const jci::PiecewisePowerLawFit fit =
        jci::fit_piecewise_power_law(binned, breakpoint, fit_config);
    report["model"] = "piecewise";
    report["params"] = {{"amplitude_low", fit.low.amplitude},
                        {"exponent_low", fit.low.exponent},
                        {"amplitude_high", fit.high.amplitude},
                        {"exponent_high", fit.high.exponent},
                        {"breakpoint", fit.breakpoint},
                        {"searched", fit.breakpoint_searched}};
    report["ses"] = {{"amplitude_low_se", fit.low.amplitude_se},
                     {"exponent_low_se", fit.low.exponent_se},
                     {"amplitude_high_se", fit.high.amplitude_se},
                     {"exponent_high_se", fit.high.exponent_se}};
    report["residual_rms"] = {{"low", fit.low.residual_rms},
                              {"high", fit.high.residual_rms}};
    report["n_bins"] = {{"low", fit.low.n_bins}, {"high", fit.high.n_bins}};
    for (std::size_t i = 0; i < binned.size(); ++i) {
      const bool low = binned.bin_centers[i] < fit.breakpoint;
      const auto& side = low ? fit.low : fit.high;
      fitted[i] =
          side.amplitude * std::pow(binned.bin_centers[i], side.exponent);
    }
  } else if (args.model == "stretchedlog") {
    const jci::StretchedLogFit fit = jci::fit_stretched_log(binned);
    report["model"] = "stretchedlog";
    report["params"] = {{"a", fit.a_coeff},
                        {"b", fit.b_expo},
                        {"c", fit.c_offset}};
    report["ses"] = {
        {"a_se", fit.a_se}, {"b_se", fit.b_se}, {"c_se", fit.c_se}};
    report["residual_rms"] = fit.residual_rms;
    report["n_bins"] = binned.size();
    report["iterations"] = fit.iterations;
    report["used_simplex_fallback"] = fit.used_simplex_fallback;
    for (std::size_t i = 0; i < binned.size(); ++i)
      fitted[i] = std::exp(
          fit.c_offset +
          fit.a_coeff * std::pow(std::log(binned.bin_centers[i]), fit.b_expo));
  } else {
    throw UsageError("unknown model '" + args.model +
                     "' (valid: power, piecewise, stretchedlog)");
  }

  if (!args.out.empty()) {
    std::string tsv = "bin_center\tbin_mean\tbin_sem\tbin_count\tfitted\n";
    for (std::size_t i = 0; i < binned.size(); ++i) {
      tsv += jci::format_g6(binned.bin_centers[i]) + '\t' +
             jci::format_g6(binned.bin_means[i]) + '\t' +
             jci::format_g6(binned.bin_sems[i]) + '\t' +
             std::to_string(binned.bin_counts[i]) + '\t' +
             jci::format_g6(fitted[i]) + '\n';
    }
    write_output(args.out, tsv);
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

int run_dist(const DistArgs& args) {
  const PanelView view = load_panel(args.input, parse_years(args.years));
  const jci::IndexKind kind = parse_index(args.index);

  std::vector<std::vector<double>> groups;
  for (int year : view.years) {
    std::vector<double> values;
    for (const auto& row : view.table.rows) {
      if (row.year != year) continue;
      const auto v = row_value(row, kind);
      if (v && *v > 0.0) values.push_back(*v);
    }
    if (!values.empty()) groups.push_back(std::move(values));
  }
  if (groups.empty())
    throw jci::EmptyDataError("no positive values for index " + args.index);

  std::vector<double> pooled;
  if (args.scaled) {
    pooled = jci::pool_scaled(groups);
  } else {
    for (const auto& group : groups)
      pooled.insert(pooled.end(), group.begin(), group.end());
  }
  const jci::EmpiricalDistribution dist =
      jci::empirical_pdf(pooled, args.bins_per_decade);

  std::string tsv = args.scaled ? "scaled_x\tscaled_density\tbin_count\n"
                                : "bin_center\tdensity\tbin_count\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    tsv += jci::format_g6(dist.bin_centers[i]) + '\t' +
           jci::format_g6(dist.density[i]) + '\t' +
           std::to_string(dist.bin_counts[i]) + '\n';
  }

  if (args.fit.empty()) {
    write_output(args.out, tsv);
    return 0;
  }
  if (!args.out.empty()) write_output(args.out, tsv);

  jci::TailFit fit;
  if (args.fit == "lognormal") {
    fit = jci::fit_lognormal(dist);
  } else if (args.fit == "power") {
    fit = jci::fit_power_tail(dist, args.x_min);
  } else {
    throw UsageError("unknown fit '" + args.fit +
                     "' (valid: lognormal, power)");
  }
  json report{{"index", args.index},
              {"years", args.years},
              {"scaled", args.scaled},
              {"sample_size", dist.sample_size},
              {"dropped", dist.dropped},
              {"fit", tail_fit_json(fit)},
              {"config",
               {{"input", args.input},
                {"bins_per_decade", args.bins_per_decade},
                {"x_min", args.x_min}}}};
  std::cout << report.dump(2) << '\n';
  return 0;
}

int run_synth(const SynthArgs& args) {
  jci::SynthSpec spec;
  if (!args.spec_path.empty())
    spec = jci::spec_from_json(read_file(args.spec_path));
  if (args.seed) spec.seed = *args.seed;
  const jci::SynthResult result = jci::generate(spec);
  write_output(args.out, jci::write_panel_csv(result.panel));
  if (!args.manifest_path.empty())
    write_output(args.manifest_path, result.manifest_json);
  return 0;
}

jci::ReportConfig load_report_config(const std::string& path) {
  json parsed;
  try {
    parsed = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw jci::ValidationError(std::string("config: invalid JSON: ") +
                               e.what());
  }
  if (!parsed.is_object())
    throw jci::ValidationError("config: top level must be a JSON object");
  jci::ReportConfig config;
  try {
    for (const auto& [key, value] : parsed.items()) {
      if (key == "input") {
        config.input_path = value.get<std::string>();
      } else if (key == "output") {
        config.output_dir = value.get<std::string>();
      } else if (key == "year_first") {
        config.year_first = value.get<int>();
      } else if (key == "year_last") {
        config.year_last = value.get<int>();
      } else if (key == "bins_per_decade") {
        config.bins_per_decade = value.get<int>();
      } else if (key == "min_bin_count") {
        config.min_bin_count = value.get<int>();
      } else if (key == "breakpoint") {
        if (value.is_string() && value.get<std::string>() == "search")
          config.breakpoint = std::nullopt;
        else
          config.breakpoint = value.get<double>();
      } else if (key == "tail_x_min") {
        config.tail_x_min = value.get<double>();
      } else if (key == "weighted") {
        config.weighted = value.get<bool>();
      } else if (key == "bootstrap_resamples") {
        config.bootstrap_resamples = value.get<int>();
      } else if (key == "bootstrap_seed") {
        config.bootstrap_seed = value.get<std::uint64_t>();
      } else if (key == "bootstrap_seed_rule") {
        // Informational echo from summary.json; accepted and ignored.
      } else {
        throw jci::ValidationError("config: unknown key \"" + key + "\"");
      }
    }
  } catch (const json::exception& e) {
    throw jci::ValidationError(std::string("config: ") + e.what());
  }
  return config;
}

int run_report_cmd(const ReportArgs& args) {
  jci::ReportConfig config;
  if (!args.config_path.empty())
    config = load_report_config(args.config_path);
  if (!args.input.empty()) config.input_path = args.input;
  if (!args.out.empty()) config.output_dir = args.out;
  if (!args.years.empty()) {
    const YearSelection sel = parse_years(args.years);
    config.year_first = sel.first;
    config.year_last = sel.last;
  }
  if (args.bins_per_decade) config.bins_per_decade = *args.bins_per_decade;
  if (args.min_bin_count) config.min_bin_count = *args.min_bin_count;
  if (!args.breakpoint.empty())
    config.breakpoint = parse_breakpoint(args.breakpoint);
  if (args.x_min) config.tail_x_min = *args.x_min;
  if (args.weighted_set) config.weighted = args.weighted;
  if (args.bootstrap_resamples)
    config.bootstrap_resamples = *args.bootstrap_resamples;
  if (args.bootstrap_seed) config.bootstrap_seed = *args.bootstrap_seed;

  if (config.input_path.empty())
    throw UsageError("report needs --input (or \"input\" in --config)");
  if (config.output_dir.empty())
    throw UsageError("report needs --out (or \"output\" in --config)");

  jci::run_report(config);
  std::cout << "report bundle written to " << config.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"journal citation indices toolkit"};
  app.require_subcommand(1);

  CommonArgs validate_args;
  auto* cmd_validate =
      app.add_subcommand("validate", "parse a panel and report coverage");
  cmd_validate->add_option("--input", validate_args.input, "panel CSV")
      ->required();
  cmd_validate->add_option("--out", validate_args.out,
                           "output path (default stdout)");

  CommonArgs indices_args;
  auto* cmd_indices =
      app.add_subcommand("indices", "per-journal-year index table");
  cmd_indices->add_option("--input", indices_args.input, "panel CSV")
      ->required();
  cmd_indices->add_option("--out", indices_args.out,
                          "output path (default stdout)");
  cmd_indices->add_option("--years", indices_args.years,
                          "all or Y1..Y2 (also the windowed-rate window)");

  CorrelateArgs correlate_args;
  auto* cmd_correlate =
      app.add_subcommand("correlate", "cross-index correlation for one year");
  cmd_correlate->add_option("--input", correlate_args.input, "panel CSV")
      ->required();
  cmd_correlate->add_option("--out", correlate_args.out,
                            "output path (default stdout)");
  cmd_correlate->add_option("--years", correlate_args.years,
                            "windowed-rate window, all or Y1..Y2");
  cmd_correlate
      ->add_option("--index-a", correlate_args.index_a, "n, I, r, rprime")
      ->required();
  cmd_correlate
      ->add_option("--index-b", correlate_args.index_b, "n, I, r, rprime")
      ->required();
  cmd_correlate->add_option("--year", correlate_args.year, "panel year")
      ->required();

  AutocorrArgs autocorr_args;
  auto* cmd_autocorr =
      app.add_subcommand("autocorr", "one index across year pairs");
  cmd_autocorr->add_option("--input", autocorr_args.input, "panel CSV")
      ->required();
  cmd_autocorr->add_option("--out", autocorr_args.out,
                           "output path (default stdout)");
  cmd_autocorr->add_option("--years", autocorr_args.years,
                           "year selection, all or Y1..Y2");
  cmd_autocorr->add_option("--index", autocorr_args.index, "n, I, r, rprime")
      ->required();
  cmd_autocorr->add_option("--pairs", autocorr_args.pairs,
                           "consecutive, extremes, or Y1:Y2");

  FitArgs fit_args;
  auto* cmd_fit = app.add_subcommand("fit", "binned scatter fit for one year");
  cmd_fit->add_option("--input", fit_args.input, "panel CSV")->required();
  cmd_fit->add_option("--out", fit_args.out, "binned-curve TSV path");
  cmd_fit->add_option("--years", fit_args.years,
                      "windowed-rate window, all or Y1..Y2");
  cmd_fit
      ->add_option("--model", fit_args.model,
                   "power, piecewise, or stretchedlog")
      ->required();
  cmd_fit->add_option("--x", fit_args.x, "x index (default n)");
  cmd_fit->add_option("--y", fit_args.y, "y index (default I)");
  cmd_fit->add_option("--year", fit_args.year, "panel year")->required();
  cmd_fit->add_option("--bins-per-decade", fit_args.bins_per_decade,
                      "log bins per decade (default 10)");
  cmd_fit->add_option("--min-bin-count", fit_args.min_bin_count,
                      "bin occupancy floor (default 3)");
  cmd_fit->add_option("--breakpoint", fit_args.breakpoint,
                      "piecewise split, a number or 'search' (default 50)");
  cmd_fit->add_flag("--weighted", fit_args.weighted,
                    "weight bins by 1/sem^2");

  DistArgs dist_args;
  auto* cmd_dist =
      app.add_subcommand("dist", "empirical distribution of one index");
  cmd_dist->add_option("--input", dist_args.input, "panel CSV")->required();
  cmd_dist->add_option("--out", dist_args.out,
                       "TSV path (default stdout when no --fit)");
  cmd_dist->add_option("--index", dist_args.index, "n, I, r, rprime")
      ->required();
  cmd_dist->add_option("--years", dist_args.years, "all or Y1..Y2");
  cmd_dist->add_flag("--scaled", dist_args.scaled,
                     "pool per-year values rescaled by their year means");
  cmd_dist->add_option("--fit", dist_args.fit, "lognormal or power");
  cmd_dist->add_option("--xmin", dist_args.x_min,
                       "power-tail threshold (default 1)");
  cmd_dist->add_option("--bins-per-decade", dist_args.bins_per_decade,
                       "log bins per decade (default 10)");

  SynthArgs synth_args;
  std::uint64_t synth_seed_raw = 0;
  auto* cmd_synth =
      app.add_subcommand("synth", "generate a seeded synthetic panel");
  cmd_synth->add_option("--spec", synth_args.spec_path, "spec JSON path");
  auto* seed_option =
      cmd_synth->add_option("--seed", synth_seed_raw, "overrides spec seed");
  cmd_synth->add_option("--out", synth_args.out,
                        "panel CSV path (default stdout)");
  cmd_synth->add_option("--manifest", synth_args.manifest_path,
                        "ground-truth manifest path");

  ReportArgs report_args;
  int report_bpd = 0, report_mbc = 0, report_resamples = 0;
  double report_xmin = 0.0;
  std::uint64_t report_seed = 0;
  auto* cmd_report =
      app.add_subcommand("report", "full analysis bundle into a directory");
  cmd_report->add_option("--input", report_args.input, "panel CSV");
  cmd_report->add_option("--out", report_args.out, "bundle directory");
  cmd_report->add_option("--config", report_args.config_path,
                         "report config JSON");
  cmd_report->add_option("--years", report_args.years, "all or Y1..Y2");
  auto* opt_bpd = cmd_report->add_option("--bins-per-decade", report_bpd,
                                         "log bins per decade (default 10)");
  auto* opt_mbc = cmd_report->add_option("--min-bin-count", report_mbc,
                                         "bin occupancy floor (default 3)");
  cmd_report->add_option("--breakpoint", report_args.breakpoint,
                         "piecewise split, a number or 'search' (default 50)");
  auto* opt_xmin = cmd_report->add_option(
      "--xmin", report_xmin, "power-tail threshold in scaled units");
  auto* opt_weighted = cmd_report->add_flag("--weighted", report_args.weighted,
                                            "weight bins by 1/sem^2");
  auto* opt_resamples = cmd_report->add_option(
      "--bootstrap-resamples", report_resamples, "default 200");
  auto* opt_seed = cmd_report->add_option("--bootstrap-seed", report_seed,
                                          "default 20130415");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*cmd_validate) return run_validate(validate_args);
    if (*cmd_indices) return run_indices(indices_args);
    if (*cmd_correlate) return run_correlate(correlate_args);
    if (*cmd_autocorr) return run_autocorr(autocorr_args);
    if (*cmd_fit) return run_fit(fit_args);
    if (*cmd_dist) return run_dist(dist_args);
    if (*cmd_synth) {
      if (seed_option->count() > 0) synth_args.seed = synth_seed_raw;
      return run_synth(synth_args);
    }
    if (*cmd_report) {
      if (opt_bpd->count() > 0) report_args.bins_per_decade = report_bpd;
      if (opt_mbc->count() > 0) report_args.min_bin_count = report_mbc;
      if (opt_xmin->count() > 0) report_args.x_min = report_xmin;
      if (opt_weighted->count() > 0) report_args.weighted_set = true;
      if (opt_resamples->count() > 0)
        report_args.bootstrap_resamples = report_resamples;
      if (opt_seed->count() > 0) report_args.bootstrap_seed = report_seed;
      return run_report_cmd(report_args);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const jci::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == jci::ErrorCategory::data ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
