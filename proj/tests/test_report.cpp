#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jci/dataset.hpp"
#include "jci/errors.hpp"
#include "jci/report.hpp"
#include "jci/synth.hpp"

using namespace jci;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("jci_report_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

// A panel large enough for every analysis in the bundle.
std::string synth_panel_csv(const fs::path& dir, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_journals = 800;
  spec.n_years = 4;
  spec.citation_distribution.log_sd = 1.5;
  spec.seed = seed;
  SynthResult result = generate(spec);
  const fs::path csv = dir / "panel.csv";
  write_file(csv, write_panel_csv(result.panel));
  return csv.string();
}

const std::vector<std::string> kBundleFiles{
    "table1.tsv", "table2.tsv",  "table3.tsv",    "table4.tsv",
    "extremes.tsv", "dist_n.tsv", "dist_I.tsv",    "dist_r.tsv",
    "dist_rprime.tsv", "fits.json", "summary.json"};

}  // namespace

TEST_CASE("validate_input reports coverage per year") {
  TempDir tmp("validate");
  const fs::path csv = tmp.path / "panel.csv";
  write_file(csv,
             "journal_id,year,citations,articles,impact_factor\n"
             "a,2004,100,10,1.5\n"
             "a,2005,120,12,1.8\n"
             "b,2004,50,0,\n"
             "b,2005,60,5,0.9\n");
  ReportConfig config;
  config.input_path = csv.string();
  Diagnostics diag = validate_input(config);
  CHECK(diag.records == 4);
  CHECK(diag.journals == 2);
  CHECK(diag.warnings == 1);
  REQUIRE(diag.per_year.size() == 2);
  CHECK(diag.per_year[0].year == 2004);
  CHECK(diag.per_year[0].journals == 2);
  CHECK(diag.per_year[0].zero_publications == 1);
  CHECK(diag.per_year[0].missing_impact == 1);
  CHECK(diag.per_year[1].year == 2005);
  CHECK(diag.per_year[1].zero_publications == 0);
  CHECK(diag.per_year[1].missing_impact == 0);

  SUBCASE("parse failures carry the line number") {
    const fs::path bad = tmp.path / "bad.csv";
    write_file(bad,
               "journal_id,year,citations,articles,impact_factor\n"
               "a,2004,xyz,10,\n");
    ReportConfig bad_config;
    bad_config.input_path = bad.string();
    try {
      validate_input(bad_config);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("run_report writes the full bundle") {
  TempDir tmp("bundle");
  ReportConfig config;
  config.input_path = synth_panel_csv(tmp.path, 61);
  config.output_dir = (tmp.path / "out").string();
  config.bootstrap_resamples = 50;
  run_report(config);

  for (const std::string& name : kBundleFiles) {
    INFO("missing: " << name);
    CHECK(fs::exists(fs::path(config.output_dir) / name));
  }

  // table1 holds one row per analysis year with a fitted exponent close to
  // the coupling exponent the generator used.
  std::istringstream table1(slurp(fs::path(config.output_dir) / "table1.tsv"));
  std::string header;
  REQUIRE(std::getline(table1, header));
  CHECK(header.find("year") == 0);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(table1, line)) {
    if (line.empty()) continue;
    ++rows;
    std::istringstream fields(line);
    // Columns: year, amplitude, amplitude_se, exponent, ...
    std::string exponent_text;
    for (int col = 0; col < 4; ++col)
      REQUIRE(std::getline(fields, exponent_text, '\t'));
    const double exponent = std::stod(exponent_text);
    CHECK(std::abs(exponent - 0.5) < 0.05);
  }
  CHECK(rows == 4);

  // summary.json echoes the analysis configuration.
  const std::string summary = slurp(fs::path(config.output_dir) / "summary.json");
  CHECK(summary.find("\"bins_per_decade\": 10") != std::string::npos);
  CHECK(summary.find("\"bootstrap_resamples\": 50") != std::string::npos);
  CHECK(summary.find("\"analysis_years\"") != std::string::npos);
}

TEST_CASE("run_report is deterministic") {
  TempDir tmp("deterministic");
  const std::string input = synth_panel_csv(tmp.path, 62);
  ReportConfig config;
  config.input_path = input;
  config.bootstrap_resamples = 50;

  config.output_dir = (tmp.path / "out1").string();
  run_report(config);
  config.output_dir = (tmp.path / "out2").string();
  run_report(config);

  for (const std::string& name : kBundleFiles) {
    INFO("file: " << name);
    CHECK(slurp(tmp.path / "out1" / name) == slurp(tmp.path / "out2" / name));
  }
}

TEST_CASE("run_report honors the year range") {
  TempDir tmp("years");
  ReportConfig config;
  config.input_path = synth_panel_csv(tmp.path, 63);
  config.output_dir = (tmp.path / "out").string();
  config.bootstrap_resamples = 50;
  config.year_first = 2005;
  config.year_last = 2006;
  run_report(config);

  std::istringstream table1(slurp(fs::path(config.output_dir) / "table1.tsv"));
  std::string line;
  REQUIRE(std::getline(table1, line));  // header
  std::vector<std::string> years;
  while (std::getline(table1, line)) {
    if (!line.empty()) years.push_back(line.substr(0, line.find('\t')));
  }
  CHECK(years == std::vector<std::string>{"2005", "2006"});
}

TEST_CASE("run_report fails cleanly and leaves nothing behind") {
  TempDir tmp("failure");

  SUBCASE("empty panel") {
    const fs::path csv = tmp.path / "empty.csv";
    write_file(csv, "journal_id,year,citations,articles,impact_factor\n");
    ReportConfig config;
    config.input_path = csv.string();
    config.output_dir = (tmp.path / "out").string();
    CHECK_THROWS_AS(run_report(config), EmptyDataError);
    CHECK_FALSE(fs::exists(config.output_dir));
    CHECK_FALSE(fs::exists(config.output_dir + ".tmp"));
  }
  SUBCASE("missing input") {
    ReportConfig config;
    config.input_path = (tmp.path / "absent.csv").string();
    config.output_dir = (tmp.path / "out").string();
    CHECK_THROWS_AS(run_report(config), NotFoundError);
    CHECK_FALSE(fs::exists(config.output_dir));
  }
  SUBCASE("analysis failure names the table and aborts the bundle") {
    // Narrow rates (all below the piecewise split) starve table2's high
    // side while table1 still succeeds.
    std::vector<JournalYearRecord> recs;
    for (int i = 0; i < 60; ++i) {
      const auto n = static_cast<std::int64_t>(40 + 7 * i);
      recs.push_back({"J" + std::to_string(1000 + i), 2004, n, 20,
                      0.04 * std::sqrt(static_cast<double>(n))});
    }
    Panel panel = Panel::from_records(std::move(recs));
    const fs::path csv = tmp.path / "narrow.csv";
    write_file(csv, write_panel_csv(panel));
    ReportConfig config;
    config.input_path = csv.string();
    config.output_dir = (tmp.path / "out").string();
    try {
      run_report(config);
      FAIL("expected the piecewise fit to fail");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::data);
      CHECK(std::string(e.what()).find("table2") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(config.output_dir));
    CHECK_FALSE(fs::exists(config.output_dir + ".tmp"));
  }
  SUBCASE("an existing non-empty output directory is refused") {
    ReportConfig config;
    config.input_path = synth_panel_csv(tmp.path, 64);
    config.output_dir = (tmp.path / "occupied").string();
    fs::create_directories(config.output_dir);
    write_file(fs::path(config.output_dir) / "keep.txt", "precious\n");
    CHECK_THROWS_AS(run_report(config), ValidationError);
    CHECK(slurp(fs::path(config.output_dir) / "keep.txt") == "precious\n");
  }
}

TEST_CASE("run_report validates its configuration") {
  TempDir tmp("config");
  ReportConfig config;
  config.input_path = synth_panel_csv(tmp.path, 65);
  config.output_dir = (tmp.path / "out").string();

  SUBCASE("bins_per_decade") {
    config.bins_per_decade = 0;
    CHECK_THROWS_AS(run_report(config), ValidationError);
  }
  SUBCASE("bootstrap_resamples") {
    config.bootstrap_resamples = -1;
    CHECK_THROWS_AS(run_report(config), ValidationError);
  }
  SUBCASE("year range order") {
    config.year_first = 2007;
    config.year_last = 2004;
    CHECK_THROWS_AS(run_report(config), ValidationError);
  }
  SUBCASE("year range off the panel") {
    config.year_first = 1990;
    config.year_last = 1995;
    CHECK_THROWS_AS(run_report(config), ValidationError);
  }
}

TEST_CASE("format_g6 renders six significant digits") {
  CHECK(format_g6(0.5) == "0.5");
  CHECK(format_g6(1234567.0) == "1.23457e+06");
  CHECK(format_g6(0.982) == "0.982");
  CHECK(format_g6(std::nan("")) == "nan");
}
