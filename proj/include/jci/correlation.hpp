#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jci/indices.hpp"

namespace jci {

enum class IndexKind { annual_citations, impact_factor, rate, rate_windowed };

/// Short index name as used on the command line: "n", "I", "r", "rprime".
std::string_view index_name(IndexKind kind);
std::optional<IndexKind> index_from_name(std::string_view name);

struct CorrelationResult {
  double r_value = 0.0;       // sample correlation coefficient, in [-1, 1]
  std::size_t sample_size = 0;  // K, paired observations used
  std::size_t dropped = 0;      // journals excluded for a missing value
  std::string pair_description;
};

// Sample correlation coefficient of two equal-length sequences, accumulated
// with the one-pass mean-centered update (cancellation-safe for citation
// counts up to 1e5 and beyond). Throws ShapeError on length mismatch and
// DegenerateSampleError when K < 2 or either sequence is constant.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Correlation of two indices over the journals of one year; journals missing
// either value are dropped and tallied.
CorrelationResult cross_index_correlation(std::span<const IndexRow> rows,
                                          IndexKind index_a, IndexKind index_b,
                                          int year);

// Correlation of one index with itself across two years, paired per journal
// by exact journal_id match.
CorrelationResult auto_correlation(std::span<const IndexRow> rows,
                                   IndexKind index, int year_a, int year_b);

struct YearPairCorrelation {
  int year_a = 0;
  int year_b = 0;
  // Absent when the pair's sample was degenerate.
  std::optional<CorrelationResult> result;
};

// One auto-correlation per requested year pair, in input order.
std::vector<YearPairCorrelation> auto_correlation_table(
    std::span<const IndexRow> rows, IndexKind index,
    std::span<const std::pair<int, int>> year_pairs);

/// (y, y+1) for consecutive years present; requires >= 2 distinct years.
std::vector<std::pair<int, int>> consecutive_year_pairs(
    std::span<const int> years);

}  // namespace jci
