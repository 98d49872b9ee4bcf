#include "jci/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "jci/binfit.hpp"
#include "jci/correlation.hpp"
#include "jci/dataset.hpp"
#include "jci/distributions.hpp"
#include "jci/errors.hpp"
#include "jci/indices.hpp"

namespace jci {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr IndexKind kAllIndices[] = {
    IndexKind::annual_citations, IndexKind::impact_factor, IndexKind::rate,
    IndexKind::rate_windowed};

std::optional<double> index_value(const IndexRow& row, IndexKind kind) {
  switch (kind) {
    case IndexKind::annual_citations:
      return static_cast<double>(row.annual_citations);
    case IndexKind::impact_factor:
      return row.impact_factor;
    case IndexKind::rate:
      return row.rate;
    case IndexKind::rate_windowed:
      return row.rate_windowed;
  }
  return std::nullopt;
}

// Runs one analysis step, prefixing any library error with its name so a
// failing bundle pinpoints the culprit.
template <typename Fn>
auto analysis(const std::string& label, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.category(), label + ": " + e.what());
  }
}

struct Scatter {
  std::vector<PointXY> points;
  std::size_t dropped = 0;  // rows missing either value
};

Scatter scatter(std::span<const IndexRow> rows, int year, IndexKind x_kind,
                IndexKind y_kind) {
  Scatter out;
  for (const auto& row : rows) {
    if (row.year != year) continue;
    const auto x = index_value(row, x_kind);
    const auto y = index_value(row, y_kind);
    if (x && y)
      out.points.push_back({*x, *y});
    else
      ++out.dropped;
  }
  return out;
}

std::vector<double> positive_values(std::span<const IndexRow> rows, int year,
                                    IndexKind kind) {
  std::vector<double> values;
  for (const auto& row : rows) {
    if (row.year != year) continue;
    const auto v = index_value(row, kind);
    if (v && *v > 0.0) values.push_back(*v);
  }
  return values;
}

json tail_fit_json(const TailFit& fit) {
  json out{
      {"fit_range", {fit.fit_range.x_lo, fit.fit_range.x_hi}},
      {"n_bins", fit.n_bins},
      {"residual_rms", fit.residual_rms},
  };
  if (fit.kind == TailKind::lognormal) {
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

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw ValidationError("failed writing " + path.string());
}

std::string correlation_cell(const std::optional<CorrelationResult>& result) {
  return result ? format_g6(result->r_value) : "nan";
}

}  // namespace

std::string format_g6(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

Diagnostics validate_input(const ReportConfig& config) {
  const Panel panel = parse_panel_file(config.input_path);
  Diagnostics diag;
  diag.records = panel.size();
  diag.journals = panel.journal_ids().size();
  for (int year : panel.years()) {
    YearCoverage coverage;
    coverage.year = year;
    for (const auto& rec : year_slice(panel, year)) {
      ++coverage.journals;
      if (rec.publications == 0) ++coverage.zero_publications;
      if (!rec.reported_impact_factor) ++coverage.missing_impact;
    }
    diag.warnings += coverage.zero_publications;
    diag.per_year.push_back(coverage);
  }
  return diag;
}

void run_report(const ReportConfig& config) {
  if (config.bins_per_decade < 1)
    throw ValidationError("report: bins_per_decade must be >= 1");
  if (config.min_bin_count < 1)
    throw ValidationError("report: min_bin_count must be >= 1");
  if (config.bootstrap_resamples < 0)
    throw ValidationError("report: bootstrap_resamples must be >= 0");
  if (!(config.tail_x_min > 0.0))
    throw ValidationError("report: tail_x_min must be > 0");
  if (config.breakpoint && !(*config.breakpoint > 0.0))
    throw ValidationError("report: breakpoint must be > 0");
  if (config.output_dir.empty())
    throw ValidationError("report: output directory not set");

  const Panel panel = parse_panel_file(config.input_path);
  if (panel.empty()) throw EmptyDataError("report: input panel is empty");

  const int first_year = config.year_first.value_or(panel.years().front());
  const int last_year = config.year_last.value_or(panel.years().back());
  if (first_year > last_year)
    throw ValidationError("report: year range is empty");
  std::vector<int> years;
  for (int year : panel.years())
    if (year >= first_year && year <= last_year) years.push_back(year);
  if (years.empty())
    throw ValidationError("report: year range selects no data");

  const YearRange window{first_year, last_year};
  const IndexTable table = index_table(panel, window);
  const std::span<const IndexRow> rows(table.rows);

  const LogBinConfig bin_config{config.bins_per_decade, config.min_bin_count};
  const FitConfig fit_config{config.weighted};

  json scatter_drops;

  // table1.tsv: per-year power law I = a * n^xi.
  std::string table1 =
      "year\tamplitude\tamplitude_se\texponent\texponent_se"
      "\tamplitude_se_boot\texponent_se_boot\tn_bins\tresidual_rms\n";
  for (int year : years) {
    const std::string label = "table1 power-law I~n, year " +
                              std::to_string(year);
    analysis(label, [&] {
      const Scatter data =
          scatter(rows, year, IndexKind::annual_citations,
                  IndexKind::impact_factor);
      const BinnedSeries binned = log_bin(data.points, bin_config);
      const PowerLawFit fit = fit_power_law(binned, fit_config);
      BootstrapSe boot;
      if (config.bootstrap_resamples > 0) {
        boot = bootstrap_power_law_se(
            binned, config.bootstrap_resamples,
            config.bootstrap_seed + static_cast<std::uint64_t>(year),
            fit_config);
      }
      scatter_drops["table1"][std::to_string(year)] =
          data.dropped + binned.dropped;
      table1 += std::to_string(year) + '\t' + format_g6(fit.amplitude) + '\t' +
                format_g6(fit.amplitude_se) + '\t' + format_g6(fit.exponent) +
                '\t' + format_g6(fit.exponent_se) + '\t' +
                format_g6(boot.amplitude_se) + '\t' +
                format_g6(boot.exponent_se) + '\t' +
                std::to_string(fit.n_bins) + '\t' +
                format_g6(fit.residual_rms) + '\n';
    });
  }

  // table2.tsv: per-year piecewise power law I vs r.
  std::string table2 =
      "year\tamplitude_low\txi_r1\txi_r1_se\tamplitude_high\txi_r2\txi_r2_se"
      "\tbreakpoint\tsearched\n";
  for (int year : years) {
    const std::string label =
        "table2 piecewise power-law I~r, year " + std::to_string(year);
    analysis(label, [&] {
      const Scatter data =
          scatter(rows, year, IndexKind::rate, IndexKind::impact_factor);
      const BinnedSeries binned = log_bin(data.points, bin_config);
      const PiecewisePowerLawFit fit =
          fit_piecewise_power_law(binned, config.breakpoint, fit_config);
      scatter_drops["table2"][std::to_string(year)] =
          data.dropped + binned.dropped;
      table2 += std::to_string(year) + '\t' + format_g6(fit.low.amplitude) +
                '\t' + format_g6(fit.low.exponent) + '\t' +
                format_g6(fit.low.exponent_se) + '\t' +
                format_g6(fit.high.amplitude) + '\t' +
                format_g6(fit.high.exponent) + '\t' +
                format_g6(fit.high.exponent_se) + '\t' +
                format_g6(fit.breakpoint) + '\t' +
                (fit.breakpoint_searched ? "1" : "0") + '\n';
    });
  }

  // table3.tsv: per-year stretched-log r = exp[c + a (log n)^b].
  std::string table3 =
      "year\ta\ta_se\tb\tb_se\tc\tc_se\tresidual_rms\tsimplex_fallback\n";
  for (int year : years) {
    const std::string label =
        "table3 stretched-log r~n, year " + std::to_string(year);
    analysis(label, [&] {
      const Scatter data =
          scatter(rows, year, IndexKind::annual_citations, IndexKind::rate);
      const BinnedSeries binned = log_bin(data.points, bin_config);
      const StretchedLogFit fit = fit_stretched_log(binned);
      scatter_drops["table3"][std::to_string(year)] =
          data.dropped + binned.dropped;
      table3 += std::to_string(year) + '\t' + format_g6(fit.a_coeff) + '\t' +
                format_g6(fit.a_se) + '\t' + format_g6(fit.b_expo) + '\t' +
                format_g6(fit.b_se) + '\t' + format_g6(fit.c_offset) + '\t' +
                format_g6(fit.c_se) + '\t' + format_g6(fit.residual_rms) +
                '\t' + (fit.used_simplex_fallback ? "1" : "0") + '\n';
    });
  }

  // table4.tsv: consecutive-year auto-correlations for n, I, r.
  std::string table4 = "pair\tr_n\tr_I\tr_r\n";
  if (years.size() >= 2) {
    analysis("table4 consecutive-year correlations", [&] {
      const auto pairs = consecutive_year_pairs(years);
      const auto r_n = auto_correlation_table(
          rows, IndexKind::annual_citations, pairs);
      const auto r_i =
          auto_correlation_table(rows, IndexKind::impact_factor, pairs);
      const auto r_r = auto_correlation_table(rows, IndexKind::rate, pairs);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        table4 += std::to_string(pairs[p].first) + '-' +
                  std::to_string(pairs[p].second) + '\t' +
                  correlation_cell(r_n[p].result) + '\t' +
                  correlation_cell(r_i[p].result) + '\t' +
                  correlation_cell(r_r[p].result) + '\n';
      }
    });
  }

  // extremes.tsv: first-vs-last-year correlation per index.
  std::string extremes = "index\tyear_a\tyear_b\tr_value\tsample_size\n";
  if (years.size() >= 2) {
    for (IndexKind kind : kAllIndices) {
      const std::string label = "extremes correlation for " +
                                std::string(index_name(kind));
      analysis(label, [&] {
        std::string cell = "nan";
        std::size_t sample_size = 0;
        try {
          const CorrelationResult result =
              auto_correlation(rows, kind, years.front(), years.back());
          cell = format_g6(result.r_value);
          sample_size = result.sample_size;
        } catch (const DegenerateSampleError&) {
          // A constant index across the panel stays a nan cell.
        }
        extremes += std::string(index_name(kind)) + '\t' +
                    std::to_string(years.front()) + '\t' +
                    std::to_string(years.back()) + '\t' + cell + '\t' +
                    std::to_string(sample_size) + '\n';
      });
    }
  }

  // dist_*.tsv, collapse distances, pooled tail fits.
  std::map<std::string, std::string> dist_files;
  json collapse_json;
  json tails_json;
  json dist_summary;
  double gamma_impact = 0.0;
  double gamma_rate = 0.0;
  for (IndexKind kind : kAllIndices) {
    const std::string name(index_name(kind));
    std::string tsv =
        "year\tbin_center\tdensity\tbin_count\tscaled_x\tscaled_density\n";
    std::vector<ScaledDistribution> scaled_curves;
    std::vector<std::vector<double>> value_groups;
    for (int year : years) {
      const std::string label =
          "dist " + name + ", year " + std::to_string(year);
      analysis(label, [&] {
        std::vector<double> values = positive_values(rows, year, kind);
        const EmpiricalDistribution dist =
            empirical_pdf(values, config.bins_per_decade);
        const ScaledDistribution scaled = scale_collapse(
            dist, name + "(" + std::to_string(year) + ")");
        for (std::size_t b = 0; b < dist.size(); ++b) {
          tsv += std::to_string(year) + '\t' +
                 format_g6(dist.bin_centers[b]) + '\t' +
                 format_g6(dist.density[b]) + '\t' +
                 std::to_string(dist.bin_counts[b]) + '\t' +
                 format_g6(scaled.scaled_x[b]) + '\t' +
                 format_g6(scaled.scaled_density[b]) + '\n';
        }
        dist_summary[name][std::to_string(year)] = {
            {"sample_size", dist.sample_size}, {"dropped", dist.dropped}};
        scaled_curves.push_back(scaled);
        value_groups.push_back(std::move(values));
      });
    }
    dist_files["dist_" + name + ".tsv"] = std::move(tsv);

    analysis("collapse check for " + name, [&] {
      const ScaledDistribution median =
          median_curve(scaled_curves, config.bins_per_decade);
      for (std::size_t c = 0; c < scaled_curves.size(); ++c) {
        collapse_json[name][std::to_string(years[c])] =
            collapse_distance(scaled_curves[c], median);
      }
    });

    const std::string fit_label = "pooled tail fit for " + name;
    analysis(fit_label, [&] {
      const std::vector<double> pooled = pool_scaled(value_groups);
      const EmpiricalDistribution pooled_dist =
          empirical_pdf(pooled, config.bins_per_decade);
      if (kind == IndexKind::annual_citations) {
        tails_json[name] = tail_fit_json(fit_lognormal(pooled_dist));
      } else {
        const TailFit fit = fit_power_tail(pooled_dist, config.tail_x_min);
        tails_json[name] = tail_fit_json(fit);
        if (kind == IndexKind::impact_factor) gamma_impact = fit.gamma;
        if (kind == IndexKind::rate) gamma_rate = fit.gamma;
      }
    });
  }

  json fits_json{
      {"collapse", collapse_json},
      {"tails", tails_json},
  };
  analysis("tail-exponent consistency", [&] {
    fits_json["xi_consistency"] = {
        {"gamma_I", gamma_impact},
        {"gamma_r", gamma_rate},
        {"xi_r", xi_from_tail_exponents(gamma_impact, gamma_rate)},
    };
  });

  json summary{
      // The output directory is deliberately not echoed: bundles produced
      // from the same panel and settings must be byte-identical wherever
      // they are written.
      {"config",
       {{"input", config.input_path},
        {"year_first", first_year},
        {"year_last", last_year},
        {"bins_per_decade", config.bins_per_decade},
        {"min_bin_count", config.min_bin_count},
        {"breakpoint",
         config.breakpoint ? json(*config.breakpoint) : json("search")},
        {"tail_x_min", config.tail_x_min},
        {"weighted", config.weighted},
        {"bootstrap_resamples", config.bootstrap_resamples},
        {"bootstrap_seed", config.bootstrap_seed},
        {"bootstrap_seed_rule", "per-year seed = bootstrap_seed + year"}}},
      {"input",
       {{"records", panel.size()},
        {"journals", panel.journal_ids().size()},
        {"years", panel.years()},
        {"analysis_years", years}}},
      {"indices",
       {{"rows", table.rows.size()},
        {"rate_undefined", table.rate_undefined},
        {"rate_windowed_undefined", table.rate_windowed_undefined},
        {"impact_missing", table.impact_missing}}},
      {"distributions", dist_summary},
      {"scatter_drops", scatter_drops},
  };

  // All-or-nothing commit: everything lands in a sibling temp directory
  // that is renamed into place only after the last write.
  const fs::path out_dir(config.output_dir);
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir) || !fs::is_empty(out_dir)) {
      throw ValidationError("report: output path already exists: " +
                            config.output_dir);
    }
  }
  const fs::path temp_dir(config.output_dir + ".tmp");
  std::error_code discard;
  fs::remove_all(temp_dir, discard);
  try {
    fs::create_directories(temp_dir);
    write_file(temp_dir / "table1.tsv", table1);
    write_file(temp_dir / "table2.tsv", table2);
    write_file(temp_dir / "table3.tsv", table3);
    write_file(temp_dir / "table4.tsv", table4);
    write_file(temp_dir / "extremes.tsv", extremes);
    for (const auto& [filename, content] : dist_files)
      write_file(temp_dir / filename, content);
    write_file(temp_dir / "fits.json", fits_json.dump(2) + "\n");
    write_file(temp_dir / "summary.json", summary.dump(2) + "\n");
    fs::remove(out_dir, discard);  // an existing empty directory
    fs::rename(temp_dir, out_dir);
  } catch (...) {
    fs::remove_all(temp_dir, discard);
    throw;
  }
}

}  // namespace jci
