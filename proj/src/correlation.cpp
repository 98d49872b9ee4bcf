#include "jci/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "jci/errors.hpp"

namespace jci {

namespace {

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

std::string year_label(IndexKind kind, int year) {
  return std::string(index_name(kind)) + "(" + std::to_string(year) + ")";
}

// Paired per-journal values of one or two indices for given years, with the
// count of journals dropped for a missing value. Journals are visited in
// sorted id order so the accumulation order is deterministic.
struct PairedValues {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t dropped = 0;
};

PairedValues pair_values(std::span<const IndexRow> rows, IndexKind index_a,
                         int year_a, IndexKind index_b, int year_b) {
  std::map<std::string_view, std::pair<std::optional<double>, std::optional<double>>>
      per_journal;
  for (const auto& row : rows) {
    if (row.year == year_a) {
      if (auto v = index_value(row, index_a))
        per_journal[row.journal_id].first = v;
      else
        per_journal.try_emplace(row.journal_id);
    }
    if (row.year == year_b) {
      if (auto v = index_value(row, index_b))
        per_journal[row.journal_id].second = v;
      else
        per_journal.try_emplace(row.journal_id);
    }
  }
  PairedValues paired;
  for (const auto& [id, values] : per_journal) {
    (void)id;
    if (values.first && values.second) {
      paired.x.push_back(*values.first);
      paired.y.push_back(*values.second);
    } else {
      ++paired.dropped;
    }
  }
  return paired;
}

}  // namespace

std::string_view index_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::annual_citations: return "n";
    case IndexKind::impact_factor: return "I";
    case IndexKind::rate: return "r";
    case IndexKind::rate_windowed: return "rprime";
  }
  return "?";
}

std::optional<IndexKind> index_from_name(std::string_view name) {
  if (name == "n") return IndexKind::annual_citations;
  if (name == "I") return IndexKind::impact_factor;
  if (name == "r") return IndexKind::rate;
  if (name == "rprime") return IndexKind::rate_windowed;
  return std::nullopt;
}

CorrelationResult pearson(std::span<const double> x,
                          std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("pearson: length mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  const std::size_t n = x.size();
  if (n < 2)
    throw DegenerateSampleError("pearson: need at least 2 observations, got " +
                                std::to_string(n));
  // One-pass mean-centered co-moment update.
  double mean_x = 0.0, mean_y = 0.0;
  double sum_xx = 0.0, sum_yy = 0.0, sum_xy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = static_cast<double>(i) / static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sum_xx += weight * dx * dx;
    sum_yy += weight * dy * dy;
    sum_xy += weight * dx * dy;
    mean_x += dx / static_cast<double>(i + 1);
    mean_y += dy / static_cast<double>(i + 1);
  }
  if (sum_xx <= 0.0 || sum_yy <= 0.0)
    throw DegenerateSampleError("pearson: constant sequence, R undefined");
  CorrelationResult result;
  result.r_value = sum_xy / std::sqrt(sum_xx * sum_yy);
  result.sample_size = n;
  return result;
}

CorrelationResult cross_index_correlation(std::span<const IndexRow> rows,
                                          IndexKind index_a, IndexKind index_b,
                                          int year) {
  PairedValues paired = pair_values(rows, index_a, year, index_b, year);
  if (paired.x.size() < 2) {
    throw DegenerateSampleError(
        "cross-index correlation: fewer than 2 complete pairs in year " +
        std::to_string(year));
  }
  CorrelationResult result = pearson(paired.x, paired.y);
  result.dropped = paired.dropped;
  result.pair_description =
      year_label(index_a, year) + "~" + year_label(index_b, year);
  return result;
}

CorrelationResult auto_correlation(std::span<const IndexRow> rows,
                                   IndexKind index, int year_a, int year_b) {
  PairedValues paired = pair_values(rows, index, year_a, index, year_b);
  if (paired.x.size() < 2) {
    throw DegenerateSampleError(
        "auto-correlation: fewer than 2 complete pairs for years " +
        std::to_string(year_a) + "-" + std::to_string(year_b));
  }
  CorrelationResult result = pearson(paired.x, paired.y);
  result.dropped = paired.dropped;
  result.pair_description =
      year_label(index, year_a) + "~" + year_label(index, year_b);
  return result;
}

std::vector<YearPairCorrelation> auto_correlation_table(
    std::span<const IndexRow> rows, IndexKind index,
    std::span<const std::pair<int, int>> year_pairs) {
  std::vector<YearPairCorrelation> table;
  table.reserve(year_pairs.size());
  for (const auto& [year_a, year_b] : year_pairs) {
    YearPairCorrelation entry;
    entry.year_a = year_a;
    entry.year_b = year_b;
    try {
      entry.result = auto_correlation(rows, index, year_a, year_b);
    } catch (const DegenerateSampleError&) {
      // absent entry
    }
    table.push_back(std::move(entry));
  }
  return table;
}

std::vector<std::pair<int, int>> consecutive_year_pairs(
    std::span<const int> years) {
  std::vector<int> sorted(years.begin(), years.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 2)
    throw InsufficientDataError("need at least 2 distinct years");
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    pairs.emplace_back(sorted[i], sorted[i + 1]);
  return pairs;
}

}  // namespace jci
