#include "jci/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "jci/errors.hpp"

namespace jci {

namespace {

constexpr int kYearMin = 1800;
constexpr int kYearMax = 2200;

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Strict numeric parse: the whole token must be consumed.
template <typename T>
T parse_number(std::string_view token, std::size_t line,
               std::string_view what) {
  T value{};
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) {
    throw ParseError(line, "non-numeric " + std::string(what) + " field '" +
                               std::string(token) + "'");
  }
  return value;
}

void validate_record(const JournalYearRecord& rec, std::size_t line) {
  const auto fail = [&](const std::string& msg) {
    if (line > 0) throw ValidationError(line, msg);
    throw ValidationError(msg + " (journal '" + rec.journal_id + "', year " +
                          std::to_string(rec.year) + ")");
  };
  if (rec.journal_id.empty()) fail("empty journal_id");
  if (rec.year < kYearMin || rec.year > kYearMax)
    fail("year " + std::to_string(rec.year) + " outside [" +
         std::to_string(kYearMin) + ", " + std::to_string(kYearMax) + "]");
  if (rec.annual_citations < 0)
    fail("negative citations " + std::to_string(rec.annual_citations));
  if (rec.publications < 0)
    fail("negative articles " + std::to_string(rec.publications));
  if (rec.reported_impact_factor) {
    const double v = *rec.reported_impact_factor;
    if (!(v >= 0.0) || !std::isfinite(v))
      fail("impact_factor must be finite and >= 0");
  }
}

std::string key_of(std::string_view journal_id, int year) {
  std::string key(journal_id);
  key.push_back('\x1f');
  key += std::to_string(year);
  return key;
}

// Reads one logical line, tolerating CRLF endings. Returns false on EOF.
bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void format_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

Panel Panel::from_records(std::vector<JournalYearRecord> records) {
  for (const auto& rec : records) validate_record(rec, 0);
  std::sort(records.begin(), records.end(),
            [](const JournalYearRecord& a, const JournalYearRecord& b) {
              if (a.journal_id != b.journal_id)
                return a.journal_id < b.journal_id;
              return a.year < b.year;
            });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].journal_id == records[i - 1].journal_id &&
        records[i].year == records[i - 1].year) {
      throw DuplicateKeyError("duplicate (journal_id, year) key ('" +
                              records[i].journal_id + "', " +
                              std::to_string(records[i].year) + ")");
    }
  }
  Panel panel;
  panel.records_ = std::move(records);
  for (const auto& rec : panel.records_) panel.years_.push_back(rec.year);
  std::sort(panel.years_.begin(), panel.years_.end());
  panel.years_.erase(std::unique(panel.years_.begin(), panel.years_.end()),
                     panel.years_.end());
  return panel;
}

std::vector<std::string> Panel::journal_ids() const {
  std::vector<std::string> ids;
  for (const auto& rec : records_) {
    if (ids.empty() || ids.back() != rec.journal_id)
      ids.push_back(rec.journal_id);
  }
  return ids;
}

const JournalYearRecord* Panel::find(std::string_view journal_id,
                                     int year) const {
  const auto it = std::lower_bound(
      records_.begin(), records_.end(), std::make_pair(journal_id, year),
      [](const JournalYearRecord& rec, const std::pair<std::string_view, int>& key) {
        if (rec.journal_id != key.first) return rec.journal_id < key.first;
        return rec.year < key.second;
      });
  if (it == records_.end() || it->journal_id != journal_id || it->year != year)
    return nullptr;
  return &*it;
}

Panel parse_panel(std::istream& source) {
  std::string line;
  if (!read_line(source, line))
    throw ParseError(1, "missing header");
  const auto header = split_csv(line);
  const bool has_impact_column =
      header.size() == 5 && header[4] == "impact_factor";
  const bool header_ok =
      (header.size() == 4 || has_impact_column) && header[0] == "journal_id" &&
      header[1] == "year" && header[2] == "citations" &&
      header[3] == "articles";
  if (!header_ok)
    throw ParseError(1,
                     "expected header "
                     "'journal_id,year,citations,articles[,impact_factor]'");
  const std::size_t n_columns = header.size();

  std::vector<JournalYearRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (read_line(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != n_columns) {
      throw ParseError(line_no, "expected " + std::to_string(n_columns) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    JournalYearRecord rec;
    rec.journal_id = std::string(fields[0]);
    rec.year = parse_number<int>(fields[1], line_no, "year");
    rec.annual_citations =
        parse_number<std::int64_t>(fields[2], line_no, "citations");
    rec.publications =
        parse_number<std::int64_t>(fields[3], line_no, "articles");
    if (n_columns == 5 && !fields[4].empty())
      rec.reported_impact_factor =
          parse_number<double>(fields[4], line_no, "impact_factor");
    validate_record(rec, line_no);
    if (!seen.insert(key_of(rec.journal_id, rec.year)).second) {
      throw DuplicateKeyError("line " + std::to_string(line_no) +
                              ": duplicate (journal_id, year) key ('" +
                              rec.journal_id + "', " +
                              std::to_string(rec.year) + ")");
    }
    records.push_back(std::move(rec));
  }
  return Panel::from_records(std::move(records));
}

Panel parse_panel_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path + "'");
  return parse_panel(in);
}

std::string write_panel_csv(const Panel& panel) {
  std::string out = "journal_id,year,citations,articles,impact_factor\n";
  for (const auto& rec : panel.records()) {
    out += rec.journal_id;
    out.push_back(',');
    out += std::to_string(rec.year);
    out.push_back(',');
    out += std::to_string(rec.annual_citations);
    out.push_back(',');
    out += std::to_string(rec.publications);
    out.push_back(',');
    if (rec.reported_impact_factor)
      format_double(out, *rec.reported_impact_factor);
    out.push_back('\n');
  }
  return out;
}

std::vector<PaperCitationRecord> parse_paper_citations(std::istream& source) {
  std::string line;
  if (!read_line(source, line))
    throw ParseError(1, "missing header");
  const auto header = split_csv(line);
  const bool header_ok = header.size() == 4 && header[0] == "journal_id" &&
                         header[1] == "publication_year" &&
                         header[2] == "citing_year" && header[3] == "citations";
  if (!header_ok)
    throw ParseError(
        1, "expected header 'journal_id,publication_year,citing_year,citations'");

  std::vector<PaperCitationRecord> records;
  std::size_t line_no = 1;
  while (read_line(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw ParseError(line_no, "expected 4 fields, got " +
                                    std::to_string(fields.size()));
    }
    PaperCitationRecord rec;
    rec.journal_id = std::string(fields[0]);
    rec.publication_year =
        parse_number<int>(fields[1], line_no, "publication_year");
    rec.citing_year = parse_number<int>(fields[2], line_no, "citing_year");
    rec.citations = parse_number<std::int64_t>(fields[3], line_no, "citations");
    if (rec.journal_id.empty())
      throw ValidationError(line_no, "empty journal_id");
    if (rec.publication_year > rec.citing_year)
      throw ValidationError(line_no, "publication_year after citing_year");
    if (rec.citations < 0)
      throw ValidationError(line_no, "negative citations");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<JournalYearRecord> year_slice(const Panel& panel, int year) {
  std::vector<JournalYearRecord> slice;
  for (const auto& rec : panel.records()) {
    if (rec.year == year) slice.push_back(rec);
  }
  // records() is sorted by (journal_id, year), so the slice is already
  // ordered by journal_id.
  return slice;
}

std::vector<YearValue> journal_series(const Panel& panel,
                                      std::string_view journal_id,
                                      PanelField field) {
  std::vector<YearValue> series;
  bool found = false;
  for (const auto& rec : panel.records()) {
    if (rec.journal_id != journal_id) continue;
    found = true;
    switch (field) {
      case PanelField::annual_citations:
        series.push_back({rec.year, static_cast<double>(rec.annual_citations)});
        break;
      case PanelField::publications:
        series.push_back({rec.year, static_cast<double>(rec.publications)});
        break;
      case PanelField::impact_factor:
        if (rec.reported_impact_factor)
          series.push_back({rec.year, *rec.reported_impact_factor});
        break;
    }
  }
  if (!found)
    throw NotFoundError("unknown journal '" + std::string(journal_id) + "'");
  std::sort(series.begin(), series.end(),
            [](const YearValue& a, const YearValue& b) { return a.year < b.year; });
  return series;
}

}  // namespace jci
