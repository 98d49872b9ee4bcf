#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jci {

struct ReportConfig {
  std::string input_path;
  std::string output_dir;
  std::optional<int> year_first;  // default: first year in the panel
  std::optional<int> year_last;   // default: last year in the panel
  int bins_per_decade = 10;
  int min_bin_count = 3;
  // Piecewise split for the I vs r fit; nullopt runs the grid search.
  std::optional<double> breakpoint = 50.0;
  double tail_x_min = 1.0;  // power-tail threshold in scaled (x/<x>) units
  bool weighted = false;
  int bootstrap_resamples = 200;
  std::uint64_t bootstrap_seed = 20130415;  // per-year seed = seed + year
};

struct YearCoverage {
  int year = 0;
  std::size_t journals = 0;
  std::size_t zero_publications = 0;  // rows whose rate will be undefined
  std::size_t missing_impact = 0;
};

struct Diagnostics {
  std::size_t records = 0;
  std::size_t journals = 0;
  std::vector<YearCoverage> per_year;  // ascending by year
  std::size_t warnings = 0;            // total zero-publication rows
};

// Dry-run parse plus per-year coverage; runs no fits.
Diagnostics validate_input(const ReportConfig& config);

// Runs the full analysis battery and atomically commits the bundle to
// config.output_dir: table1.tsv (per-year I~n power law), table2.tsv
// (piecewise I~r), table3.tsv (stretched-log r~n), table4.tsv
// (consecutive-year correlations), extremes.tsv (first-vs-last-year
// correlations), dist_{n,I,r,rprime}.tsv, fits.json, summary.json.
// Errors name the failing analysis; on failure nothing appears at
// output_dir.
void run_report(const ReportConfig& config);

// %.6g rendering shared by every TSV writer (report and the single-purpose
// subcommands, so the same value always prints the same way).
std::string format_g6(double value);

}  // namespace jci
