#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jci {

// One journal in one year: annual citations n(T), publications N(T) and,
// when the export carries it, the reported impact factor I(T).
struct JournalYearRecord {
  std::string journal_id;
  int year = 0;
  std::int64_t annual_citations = 0;
  std::int64_t publications = 0;
  std::optional<double> reported_impact_factor;

  friend bool operator==(const JournalYearRecord&,
                         const JournalYearRecord&) = default;
};

// Citations received in citing_year by one paper published in
// publication_year. Optional finer-grained input; only the annual-citation
// aggregation consumes it.
struct PaperCitationRecord {
  std::string journal_id;
  int publication_year = 0;
  int citing_year = 0;
  std::int64_t citations = 0;

  friend bool operator==(const PaperCitationRecord&,
                         const PaperCitationRecord&) = default;
};

enum class PanelField { annual_citations, publications, impact_factor };

struct YearValue {
  int year = 0;
  double value = 0.0;

  friend bool operator==(const YearValue&, const YearValue&) = default;
};

// Validated journal-year table, unique on (journal_id, year). Immutable once
// built; records are kept sorted by (journal_id, year) so every downstream
// traversal is deterministic.
class Panel {
public:
  Panel() = default;

  // Validates field invariants and key uniqueness; sorts the records.
  static Panel from_records(std::vector<JournalYearRecord> records);

  const std::vector<JournalYearRecord>& records() const { return records_; }

  /// Sorted distinct years present in the records.
  const std::vector<int>& years() const { return years_; }

  /// Sorted distinct journal identifiers.
  std::vector<std::string> journal_ids() const;

  /// nullptr when the (journal, year) key is absent.
  const JournalYearRecord* find(std::string_view journal_id, int year) const;

  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  friend bool operator==(const Panel&, const Panel&) = default;

private:
  std::vector<JournalYearRecord> records_;
  std::vector<int> years_;
};

// Reads CSV with header `journal_id,year,citations,articles[,impact_factor]`.
// Throws ParseError / ValidationError / DuplicateKeyError naming the
// offending line.
Panel parse_panel(std::istream& source);
Panel parse_panel_file(const std::string& path);

// Inverse of parse_panel: always emits the five-column header; absent impact
// factors become empty cells. Numeric fields print with full round-trip
// precision so parse(write(p)) == p.
std::string write_panel_csv(const Panel& panel);

// Reads CSV with header `journal_id,publication_year,citing_year,citations`.
std::vector<PaperCitationRecord> parse_paper_citations(std::istream& source);

/// Records of one year, ordered by journal_id; empty when the year is absent.
std::vector<JournalYearRecord> year_slice(const Panel& panel, int year);

// Year-sorted values of one field for one journal. Years where an optional
// field is absent are skipped. Throws NotFoundError for unknown journals.
std::vector<YearValue> journal_series(const Panel& panel,
                                      std::string_view journal_id,
                                      PanelField field);

}  // namespace jci
