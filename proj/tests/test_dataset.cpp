#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "jci/dataset.hpp"
#include "jci/errors.hpp"

using namespace jci;

namespace {

const char* kHeader = "journal_id,year,citations,articles,impact_factor\n";

Panel parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_panel(in);
}

Panel parse_rows(const std::string& body) {
  return parse_text(std::string(kHeader) + body);
}

std::vector<PaperCitationRecord> parse_paper_text(const std::string& text) {
  std::istringstream in(text);
  return parse_paper_citations(in);
}

Panel small_panel() {
  std::vector<JournalYearRecord> recs;
  recs.push_back({"alpha", 2004, 100, 10, 1.5});
  recs.push_back({"alpha", 2005, 120, 12, 1.8});
  recs.push_back({"beta", 2004, 50, 5, std::nullopt});
  recs.push_back({"beta", 2005, 60, 5, 0.9});
  recs.push_back({"gamma", 2004, 7, 1, std::nullopt});
  return Panel::from_records(std::move(recs));
}

}  // namespace

TEST_CASE("parse_panel maps a well-formed row onto a record") {
  Panel p = parse_rows("nat-phys,2004,5000,200,10.5\n");
  REQUIRE(p.size() == 1);
  const JournalYearRecord& rec = p.records().front();
  CHECK(rec.journal_id == "nat-phys");
  CHECK(rec.year == 2004);
  CHECK(rec.annual_citations == 5000);
  CHECK(rec.publications == 200);
  REQUIRE(rec.reported_impact_factor.has_value());
  CHECK(*rec.reported_impact_factor == doctest::Approx(10.5).epsilon(1e-15));
}

TEST_CASE("parse_panel on a header-only file yields an empty panel") {
  Panel p = parse_text(kHeader);
  CHECK(p.empty());
  CHECK(p.size() == 0);
  CHECK(p.years().empty());
  CHECK(p.journal_ids().empty());
}

TEST_CASE("parse_panel accepts the four-column form and empty impact fields") {
  Panel four = parse_text(
      "journal_id,year,citations,articles\n"
      "acta-x,2010,40,8\n");
  REQUIRE(four.size() == 1);
  CHECK_FALSE(four.records().front().reported_impact_factor.has_value());

  Panel five = parse_rows("acta-x,2010,40,8,\n");
  REQUIRE(five.size() == 1);
  CHECK_FALSE(five.records().front().reported_impact_factor.has_value());
  CHECK(four == five);
}

TEST_CASE("parse_panel rejects a negative count with the offending line") {
  try {
    parse_rows("nat-phys,2004,-3,200,\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.line() == 2);
    CHECK(e.category() == ErrorCategory::data);
  }
}

TEST_CASE("parse_panel rejects malformed input") {
  SUBCASE("wrong column count") {
    CHECK_THROWS_AS(parse_rows("a,2004,1\n"), ParseError);
  }
  SUBCASE("non-numeric count") {
    CHECK_THROWS_AS(parse_rows("a,2004,many,5,\n"), ParseError);
  }
  SUBCASE("non-numeric year") {
    CHECK_THROWS_AS(parse_rows("a,early,3,5,\n"), ParseError);
  }
  SUBCASE("unexpected header") {
    CHECK_THROWS_AS(parse_text("id,yr,cites,pubs,if\na,2004,1,1,\n"),
                    ParseError);
  }
  SUBCASE("missing header") {
    CHECK_THROWS_AS(parse_text(""), ParseError);
  }
  SUBCASE("empty journal id") {
    CHECK_THROWS_AS(parse_rows(",2004,1,1,\n"), ValidationError);
  }
  SUBCASE("year outside plausible range") {
    CHECK_THROWS_AS(parse_rows("a,1500,1,1,\n"), ValidationError);
    CHECK_THROWS_AS(parse_rows("a,2500,1,1,\n"), ValidationError);
  }
  SUBCASE("negative articles") {
    CHECK_THROWS_AS(parse_rows("a,2004,1,-1,\n"), ValidationError);
  }
  SUBCASE("non-finite or negative impact factor") {
    CHECK_THROWS_AS(parse_rows("a,2004,1,1,nan\n"), ValidationError);
    CHECK_THROWS_AS(parse_rows("a,2004,1,1,inf\n"), ValidationError);
    CHECK_THROWS_AS(parse_rows("a,2004,1,1,-0.5\n"), ValidationError);
  }
}

TEST_CASE("parse_panel rejects duplicate journal-year keys") {
  CHECK_THROWS_AS(parse_rows("a,2004,1,1,\na,2004,2,2,\n"), DuplicateKeyError);
}

TEST_CASE("parse_panel tolerates CRLF endings, blank lines and a missing final newline") {
  Panel crlf = parse_text(
      "journal_id,year,citations,articles,impact_factor\r\n"
      "a,2004,10,2,1.25\r\n"
      "\r\n");
  Panel plain = parse_rows("a,2004,10,2,1.25");
  CHECK(crlf == plain);
}

TEST_CASE("write_panel_csv then parse_panel round-trips exactly") {
  Panel p = small_panel();
  Panel q = parse_text(write_panel_csv(p));
  CHECK(p == q);

  // High-precision impact factors survive the round trip bit-for-bit.
  std::vector<JournalYearRecord> recs;
  recs.push_back({"x", 2007, 123456789012345LL, 999999, 10.123456789012345});
  recs.push_back({"y", 2007, 1, 1, 1.0 / 3.0});
  Panel hp = Panel::from_records(std::move(recs));
  Panel hp2 = parse_text(write_panel_csv(hp));
  REQUIRE(hp2.size() == 2);
  CHECK(*hp2.records()[0].reported_impact_factor == 10.123456789012345);
  CHECK(*hp2.records()[1].reported_impact_factor == 1.0 / 3.0);
  CHECK(hp == hp2);
}

TEST_CASE("parsing the same bytes twice is deterministic") {
  std::string text = write_panel_csv(small_panel());
  CHECK(parse_text(text) == parse_text(text));
}

TEST_CASE("from_records sorts and rejects duplicates") {
  std::vector<JournalYearRecord> recs;
  recs.push_back({"b", 2005, 2, 1, std::nullopt});
  recs.push_back({"a", 2004, 1, 1, std::nullopt});
  recs.push_back({"b", 2004, 3, 1, std::nullopt});
  Panel p = Panel::from_records(std::move(recs));
  REQUIRE(p.size() == 3);
  CHECK(p.records()[0].journal_id == "a");
  CHECK(p.records()[1].journal_id == "b");
  CHECK(p.records()[1].year == 2004);
  CHECK(p.records()[2].year == 2005);

  std::vector<JournalYearRecord> dup;
  dup.push_back({"a", 2004, 1, 1, std::nullopt});
  dup.push_back({"a", 2004, 2, 1, std::nullopt});
  CHECK_THROWS_AS(Panel::from_records(std::move(dup)), DuplicateKeyError);
}

TEST_CASE("find locates records and misses cleanly") {
  Panel p = small_panel();
  const JournalYearRecord* hit = p.find("beta", 2005);
  REQUIRE(hit != nullptr);
  CHECK(hit->annual_citations == 60);
  CHECK(p.find("beta", 2006) == nullptr);
  CHECK(p.find("delta", 2004) == nullptr);
}

TEST_CASE("years and journal_ids are sorted and deduplicated") {
  Panel p = small_panel();
  CHECK(p.years() == std::vector<int>{2004, 2005});
  CHECK(p.journal_ids() == std::vector<std::string>{"alpha", "beta", "gamma"});
}

TEST_CASE("year_slice keeps exactly the matching year") {
  Panel p = small_panel();

  std::vector<JournalYearRecord> s2004 = year_slice(p, 2004);
  REQUIRE(s2004.size() == 3);
  for (const auto& rec : s2004) CHECK(rec.year == 2004);
  CHECK(s2004[0].journal_id == "alpha");
  CHECK(s2004[1].journal_id == "beta");
  CHECK(s2004[2].journal_id == "gamma");

  CHECK(year_slice(p, 1999).empty());

  // Slices over all years partition the record set.
  std::size_t total = 0;
  for (int year : p.years()) total += year_slice(p, year).size();
  CHECK(total == p.size());
}

TEST_CASE("journal_series extracts one field over the years present") {
  Panel p = small_panel();

  std::vector<YearValue> cites =
      journal_series(p, "alpha", PanelField::annual_citations);
  REQUIRE(cites.size() == 2);
  CHECK(cites[0].year == 2004);
  CHECK(cites[0].value == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(cites[1].year == 2005);
  CHECK(cites[1].value == doctest::Approx(120.0).epsilon(1e-15));

  std::vector<YearValue> pubs =
      journal_series(p, "beta", PanelField::publications);
  REQUIRE(pubs.size() == 2);
  CHECK(pubs[0].value == doctest::Approx(5.0).epsilon(1e-15));

  // Years with no reported impact factor are skipped rather than filled in.
  std::vector<YearValue> impact =
      journal_series(p, "beta", PanelField::impact_factor);
  REQUIRE(impact.size() == 1);
  CHECK(impact[0].year == 2005);
  CHECK(impact[0].value == doctest::Approx(0.9).epsilon(1e-15));

  CHECK_THROWS_AS(journal_series(p, "missing", PanelField::annual_citations),
                  NotFoundError);
}

TEST_CASE("parse_paper_citations reads per-paper rows") {
  std::vector<PaperCitationRecord> recs = parse_paper_text(
      "journal_id,publication_year,citing_year,citations\n"
      "a,2000,2004,3\n"
      "a,2003,2004,7\n");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].journal_id == "a");
  CHECK(recs[0].publication_year == 2000);
  CHECK(recs[0].citing_year == 2004);
  CHECK(recs[0].citations == 3);
  CHECK(recs[1].publication_year == 2003);

  // The citing year cannot precede publication.
  CHECK_THROWS_AS(
      parse_paper_text("journal_id,publication_year,citing_year,citations\n"
                       "a,2005,2004,3\n"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_paper_text("journal_id,publication_year,citing_year,citations\n"
                       "a,2000,2004,-1\n"),
      ValidationError);
}

TEST_CASE("parse_panel_file reports missing files") {
  CHECK_THROWS_AS(parse_panel_file("/nonexistent/panel.csv"), NotFoundError);
}
