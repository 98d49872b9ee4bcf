#include "jci/indices.hpp"

#include "jci/errors.hpp"

namespace jci {

double impact_factor(const ImpactWindow& window) {
  const std::int64_t articles = window.articles_y1 + window.articles_y2;
  if (articles <= 0)
    throw UndefinedIndexError("impact factor undefined: no articles in window");
  const std::int64_t citations = window.citations_y1 + window.citations_y2;
  return static_cast<double>(citations) / static_cast<double>(articles);
}

std::int64_t aggregate_annual_citations(
    std::span<const PaperCitationRecord> records, std::string_view journal_id,
    int year) {
  std::int64_t total = 0;
  for (const auto& rec : records) {
    if (rec.journal_id == journal_id && rec.citing_year == year &&
        rec.publication_year <= year) {
      total += rec.citations;
    }
  }
  return total;
}

double citation_rate(std::int64_t annual_citations,
                     std::int64_t publications) {
  if (publications <= 0)
    throw UndefinedIndexError("citation rate undefined: no publications");
  return static_cast<double>(annual_citations) /
         static_cast<double>(publications);
}

double citation_rate_windowed(const Panel& panel, std::string_view journal_id,
                              int year, YearRange window) {
  const JournalYearRecord* at_year = panel.find(journal_id, year);
  if (at_year == nullptr) {
    throw NotFoundError("no record for journal '" + std::string(journal_id) +
                        "' in year " + std::to_string(year));
  }
  std::int64_t publication_sum = 0;
  std::size_t n_years = 0;
  for (const auto& rec : panel.records()) {
    if (rec.journal_id == journal_id && window.contains(rec.year)) {
      publication_sum += rec.publications;
      ++n_years;
    }
  }
  if (n_years == 0) {
    throw UndefinedIndexError("windowed rate undefined: journal '" +
                              std::string(journal_id) +
                              "' has no records in window");
  }
  const double mean_publications =
      static_cast<double>(publication_sum) / static_cast<double>(n_years);
  if (mean_publications <= 0.0)
    throw UndefinedIndexError("windowed rate undefined: mean publications 0");
  return static_cast<double>(at_year->annual_citations) / mean_publications;
}

IndexTable index_table(const Panel& panel, YearRange window) {
  IndexTable table;
  const auto& records = panel.records();
  // records() is sorted by journal, so each journal is one contiguous run.
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    std::int64_t publication_sum = 0;
    std::size_t window_years = 0;
    while (j < records.size() &&
           records[j].journal_id == records[i].journal_id) {
      if (window.contains(records[j].year)) {
        publication_sum += records[j].publications;
        ++window_years;
      }
      ++j;
    }
    std::optional<double> mean_publications;
    if (window_years > 0 && publication_sum > 0) {
      mean_publications = static_cast<double>(publication_sum) /
                          static_cast<double>(window_years);
    }
    for (std::size_t k = i; k < j; ++k) {
      const auto& rec = records[k];
      IndexRow row;
      row.journal_id = rec.journal_id;
      row.year = rec.year;
      row.annual_citations = rec.annual_citations;
      if (rec.reported_impact_factor)
        row.impact_factor = rec.reported_impact_factor;
      else
        ++table.impact_missing;
      if (rec.publications > 0)
        row.rate = static_cast<double>(rec.annual_citations) /
                   static_cast<double>(rec.publications);
      else
        ++table.rate_undefined;
      if (mean_publications)
        row.rate_windowed =
            static_cast<double>(rec.annual_citations) / *mean_publications;
      else
        ++table.rate_windowed_undefined;
      table.rows.push_back(std::move(row));
    }
    i = j;
  }
  return table;
}

}  // namespace jci
