#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jci/dataset.hpp"

namespace jci {

// Two-year impact-factor window for year T: citations received in T to
// papers published in T-1 and T-2, and the article counts of those years.
struct ImpactWindow {
  std::int64_t citations_y1 = 0;  // to papers of T-1
  std::int64_t citations_y2 = 0;  // to papers of T-2
  std::int64_t articles_y1 = 0;
  std::int64_t articles_y2 = 0;
};

// Inclusive year interval.
struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const { return year >= first && year <= last; }

  friend bool operator==(const YearRange&, const YearRange&) = default;
};

// Per-(journal, year) values of the four indices. Absent optionals mean the
// index is undefined for that cell, never zero.
struct IndexRow {
  std::string journal_id;
  int year = 0;
  std::int64_t annual_citations = 0;
  std::optional<double> impact_factor;
  std::optional<double> rate;
  std::optional<double> rate_windowed;
};

struct IndexTable {
  std::vector<IndexRow> rows;
  std::size_t rate_undefined = 0;
  std::size_t rate_windowed_undefined = 0;
  std::size_t impact_missing = 0;
};

/// Two-year windowed citations-per-article ratio. Throws UndefinedIndexError
/// when the window holds no articles.
double impact_factor(const ImpactWindow& window);

/// Sum of per-paper citations received by the journal in year T.
std::int64_t aggregate_annual_citations(
    std::span<const PaperCitationRecord> records, std::string_view journal_id,
    int year);

/// n / N. Throws UndefinedIndexError when N = 0.
double citation_rate(std::int64_t annual_citations, std::int64_t publications);

// n(T) divided by the journal's mean publications over its years inside the
// window. Years where the journal is absent do not enter the mean.
double citation_rate_windowed(const Panel& panel, std::string_view journal_id,
                              int year, YearRange window);

// One row per record. The reported impact factor is carried through when
// present; undefined rates become absent fields and are tallied.
IndexTable index_table(const Panel& panel, YearRange window);

}  // namespace jci
