#include "antbounds/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "antbounds/error.hpp"

namespace antbounds {

// ---------------------------------------------------------------------------
// Panels

TwoPeriodPanel::TwoPeriodPanel(std::vector<TwoPeriodRecord> rows)
    : rows_(std::move(rows)) {
  std::unordered_set<std::string> seen;
  for (const auto& r : rows_) {
    if (!seen.insert(r.unit_id).second) {
      throw DataError("duplicate unit_id '" + r.unit_id + "'");
    }
    if (r.d != 0 && r.d != 1) {
      throw DataError("unit '" + r.unit_id + "': d must be 0 or 1");
    }
    if (!std::isfinite(r.y0) || !std::isfinite(r.y1)) {
      throw DataError("unit '" + r.unit_id + "': outcomes must be finite");
    }
    n_treated_ += static_cast<std::size_t>(r.d);
  }
  if (n_treated_ == 0 || n_treated_ == rows_.size()) {
    throw DataError(
        "panel needs at least one treated and one control unit");
  }
}

bool TwoPeriodPanel::has_strata() const noexcept {
  return std::any_of(rows_.begin(), rows_.end(),
                     [](const auto& r) { return r.stratum.has_value(); });
}

std::vector<std::string> TwoPeriodPanel::strata() const {
  std::set<std::string> labels;
  for (const auto& r : rows_) labels.insert(r.stratum.value_or(""));
  return {labels.begin(), labels.end()};
}

std::vector<TwoPeriodRecord> TwoPeriodPanel::stratum_rows(
    const std::string& label) const {
  std::vector<TwoPeriodRecord> out;
  for (const auto& r : rows_) {
    if (r.stratum.value_or("") == label) out.push_back(r);
  }
  return out;
}

CohortPanel::CohortPanel(std::vector<CohortRecord> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) throw DataError("cohort panel is empty");
  periods_ = static_cast<int>(rows_.front().outcomes.size());
  if (periods_ < 2) throw DataError("cohort panel needs T >= 2 periods");
  std::unordered_set<std::string> seen;
  bool any_never = false;
  for (const auto& r : rows_) {
    if (!seen.insert(r.unit_id).second) {
      throw DataError("duplicate unit_id '" + r.unit_id + "'");
    }
    if (static_cast<int>(r.outcomes.size()) != periods_) {
      throw DataError("unit '" + r.unit_id +
                      "': outcome vectors must all have length " +
                      std::to_string(periods_));
    }
    for (double y : r.outcomes) {
      if (!std::isfinite(y)) {
        throw DataError("unit '" + r.unit_id + "': outcomes must be finite");
      }
    }
    if (r.cohort) {
      if (*r.cohort < 1 || *r.cohort > periods_) {
        throw DataError("unit '" + r.unit_id + "': cohort outside 1.." +
                        std::to_string(periods_));
      }
    } else {
      any_never = true;
    }
  }
  if (!any_never) throw DataError("cohort panel needs a never-treated unit");
}

std::size_t CohortPanel::cohort_size(int e) const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(),
                    [e](const auto& r) { return r.cohort == e; }));
}

std::size_t CohortPanel::never_treated_size() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(),
                    [](const auto& r) { return !r.cohort.has_value(); }));
}

double CohortPanel::share_treated_by(int e) const {
  const auto k = std::count_if(rows_.begin(), rows_.end(), [e](const auto& r) {
    return r.cohort.has_value() && *r.cohort <= e;
  });
  return static_cast<double>(k) / static_cast<double>(rows_.size());
}

// ---------------------------------------------------------------------------
// GTransform

GTransform::GTransform(Kind kind, double threshold, std::string name,
                       std::function<double(double)> fn)
    : kind_(kind),
      threshold_(threshold),
      name_(std::move(name)),
      fn_(std::move(fn)) {}

GTransform GTransform::identity() {
  return GTransform(Kind::kIdentity, 0.0, "identity", nullptr);
}

GTransform GTransform::indicator(double threshold) {
  if (!std::isfinite(threshold)) {
    throw DomainError("indicator threshold must be finite");
  }
  return GTransform(Kind::kIndicator, threshold, "", nullptr);
}

GTransform GTransform::custom(std::string name,
                              std::function<double(double)> fn) {
  if (!fn) throw DomainError("custom transformation needs a callable");
  return GTransform(Kind::kCustom, 0.0, std::move(name), std::move(fn));
}

double GTransform::operator()(double y) const {
  switch (kind_) {
    case Kind::kIdentity:
      return y;
    case Kind::kIndicator:
      return y <= threshold_ ? 1.0 : 0.0;
    case Kind::kCustom:
      return fn_(y);
  }
  return y;
}

std::string GTransform::describe() const {
  if (kind_ == Kind::kIndicator) {
    std::ostringstream os;
    os.precision(17);
    os << "indicator:" << threshold_;
    return os.str();
  }
  return name_;
}

namespace {

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_int(std::string_view text, long& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Header-indexed CSV reader. Lines are numbered from 1 (the header).
class CsvTable {
 public:
  CsvTable(std::istream& in, const std::vector<std::string>& required,
           const std::vector<std::string>& optional) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto fields = split_fields(line);
      if (!have_header) {
        if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) {
          fields[0].erase(0, 3);
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
          columns_[fields[i]] = i;
        }
        for (const auto& name : required) {
          if (!columns_.count(name)) {
            throw ParseError(line_no, name, "missing column");
          }
        }
        for (const auto& [name, idx] : columns_) {
          const bool known =
              std::find(required.begin(), required.end(), name) !=
                  required.end() ||
              std::find(optional.begin(), optional.end(), name) !=
                  optional.end();
          if (!known) throw ParseError(line_no, name, "unknown column");
        }
        width_ = fields.size();
        have_header = true;
        continue;
      }
      if (fields.size() != width_) {
        throw ParseError(line_no, "*",
                         "expected " + std::to_string(width_) +
                             " fields, found " + std::to_string(fields.size()));
      }
      rows_.push_back({line_no, std::move(fields)});
    }
    if (!have_header) throw ParseError(1, "*", "empty input, no header row");
  }

  struct Row {
    std::size_t line;
    std::vector<std::string> fields;
  };

  const std::vector<Row>& rows() const { return rows_; }
  bool has(const std::string& name) const { return columns_.count(name) > 0; }

  const std::string& get(const Row& row, const std::string& name) const {
    return row.fields[columns_.at(name)];
  }

  double number(const Row& row, const std::string& name) const {
    double v = 0.0;
    if (!parse_double(get(row, name), v)) {
      throw ParseError(row.line, name,
                       "non-numeric value '" + get(row, name) + "'");
    }
    return v;
  }

  int binary(const Row& row, const std::string& name) const {
    const auto& s = get(row, name);
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ParseError(row.line, name, "expected 0 or 1, got '" + s + "'");
  }

  std::string id(const Row& row, const std::string& name) const {
    const auto& s = get(row, name);
    if (s.empty()) throw ParseError(row.line, name, "empty identifier");
    return s;
  }

 private:
  std::map<std::string, std::size_t> columns_;
  std::size_t width_ = 0;
  std::vector<Row> rows_;
};

std::optional<std::string> stratum_of(const CsvTable& t,
                                      const CsvTable::Row& row) {
  if (!t.has("stratum")) return std::nullopt;
  const auto& s = t.get(row, "stratum");
  if (s.empty()) return std::nullopt;
  return s;
}

TwoPeriodPanel wrap(std::vector<TwoPeriodRecord> rows, std::size_t line) {
  try {
    return TwoPeriodPanel(std::move(rows));
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw ParseError(line, "*", e.what());
  }
}

TwoPeriodPanel load_wide(std::istream& in) {
  CsvTable t(in, {"unit_id", "y0", "y1", "d"}, {"stratum"});
  std::vector<TwoPeriodRecord> rows;
  std::unordered_set<std::string> seen;
  for (const auto& row : t.rows()) {
    TwoPeriodRecord r;
    r.unit_id = t.id(row, "unit_id");
    if (!seen.insert(r.unit_id).second) {
      throw ParseError(row.line, "unit_id",
                       "duplicate unit '" + r.unit_id + "'");
    }
    r.y0 = t.number(row, "y0");
    r.y1 = t.number(row, "y1");
    r.d = t.binary(row, "d");
    r.stratum = stratum_of(t, row);
    rows.push_back(std::move(r));
  }
  return wrap(std::move(rows), t.rows().empty() ? 1 : t.rows().back().line);
}

TwoPeriodPanel load_long(std::istream& in) {
  CsvTable t(in, {"unit_id", "t", "y", "d"}, {"stratum"});
  struct Partial {
    std::size_t first_line;
    std::optional<double> y[2];
    int d;
    std::optional<std::string> stratum;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Partial> units;
  for (const auto& row : t.rows()) {
    const auto id = t.id(row, "unit_id");
    long period = -1;
    if (!parse_int(t.get(row, "t"), period) || (period != 0 && period != 1)) {
      throw ParseError(row.line, "t",
                       "period must be 0 or 1, got '" + t.get(row, "t") + "'");
    }
    const double y = t.number(row, "y");
    const int d = t.binary(row, "d");
    const auto stratum = stratum_of(t, row);
    auto [it, inserted] = units.try_emplace(id);
    Partial& p = it->second;
    if (inserted) {
      order.push_back(id);
      p.first_line = row.line;
      p.d = d;
      p.stratum = stratum;
    } else {
      if (p.d != d) {
        throw ParseError(row.line, "d", "treatment not constant within unit '" +
                                            id + "'");
      }
      if (p.stratum != stratum) {
        throw ParseError(row.line, "stratum",
                         "stratum not constant within unit '" + id + "'");
      }
    }
    if (p.y[period]) {
      throw ParseError(row.line, "t",
                       "duplicate (unit, period) for unit '" + id + "'");
    }
    p.y[period] = y;
  }
  std::vector<TwoPeriodRecord> rows;
  rows.reserve(order.size());
  for (const auto& id : order) {
    const Partial& p = units.at(id);
    if (!p.y[0] || !p.y[1]) {
      throw ParseError(p.first_line, "t",
                       "missing period " + std::string(p.y[0] ? "1" : "0") +
                           " for unit '" + id + "'");
    }
    rows.push_back({id, *p.y[0], *p.y[1], p.d, p.stratum});
  }
  return wrap(std::move(rows), t.rows().empty() ? 1 : t.rows().back().line);
}

}  // namespace

GTransform parse_gtransform(const std::string& text) {
  if (text == "identity") return GTransform::identity();
  const std::string prefix = "indicator:";
  if (text.rfind(prefix, 0) == 0) {
    double u = 0.0;
    if (parse_double(text.substr(prefix.size()), u)) {
      return GTransform::indicator(u);
    }
  }
  throw DomainError("unknown g transformation '" + text +
                    "' (expected identity or indicator:<u>)");
}

Layout parse_layout(const std::string& text) {
  if (text == "wide") return Layout::kWide;
  if (text == "long") return Layout::kLong;
  throw DomainError("unknown layout '" + text + "' (expected wide or long)");
}

GroupStats group_stats(const TwoPeriodPanel& panel, const GTransform& g) {
  GroupStats s;
  s.n1 = panel.n_treated();
  s.n0 = panel.n_control();
  if (s.n0 < 2 || s.n1 < 2) {
    throw DataError("insufficient group size: each group needs >= 2 units (n0=" +
                    std::to_string(s.n0) + ", n1=" + std::to_string(s.n1) +
                    ")");
  }
  // Two passes: means first, then centered second moments.
  double sum[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (const auto& r : panel.rows()) {
    sum[r.d][0] += g(r.y0);
    sum[r.d][1] += g(r.y1);
  }
  const double n[2] = {static_cast<double>(s.n0), static_cast<double>(s.n1)};
  for (int d = 0; d < 2; ++d) {
    for (int t = 0; t < 2; ++t) s.mean[d][t] = sum[d][t] / n[d];
  }
  double ss[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double sc[2] = {0.0, 0.0};
  for (const auto& r : panel.rows()) {
    const double e0 = g(r.y0) - s.mean[r.d][0];
    const double e1 = g(r.y1) - s.mean[r.d][1];
    ss[r.d][0] += e0 * e0;
    ss[r.d][1] += e1 * e1;
    sc[r.d] += e0 * e1;
  }
  for (int d = 0; d < 2; ++d) {
    for (int t = 0; t < 2; ++t) s.var[d][t] = ss[d][t] / (n[d] - 1.0);
    s.cov[d] = sc[d] / (n[d] - 1.0);
  }
  s.p_hat = n[1] / (n[0] + n[1]);
  return s;
}

double treatment_ratio(const TwoPeriodPanel& panel) {
  return static_cast<double>(panel.n_treated()) /
         static_cast<double>(panel.size());
}

TwoPeriodPanel load_two_period(std::istream& in, Layout layout) {
  return layout == Layout::kWide ? load_wide(in) : load_long(in);
}

TwoPeriodPanel load_two_period_file(const std::string& path, Layout layout) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file '" + path + "'");
  return load_two_period(in, layout);
}

CohortPanel load_cohort(std::istream& in) {
  CsvTable t(in, {"unit_id", "t", "y", "e"}, {});
  struct Partial {
    std::size_t first_line;
    std::map<long, double> y;
    std::optional<int> e;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Partial> units;
  long max_period = 0;
  for (const auto& row : t.rows()) {
    const auto id = t.id(row, "unit_id");
    long period = 0;
    if (!parse_int(t.get(row, "t"), period) || period < 1) {
      throw ParseError(row.line, "t", "period must be a positive integer");
    }
    const double y = t.number(row, "y");
    std::optional<int> e;
    const auto& e_text = t.get(row, "e");
    if (e_text != "inf") {
      long ev = 0;
      if (!parse_int(e_text, ev) || ev < 1) {
        throw ParseError(row.line, "e",
                         "cohort must be a positive integer or 'inf'");
      }
      e = static_cast<int>(ev);
    }
    auto [it, inserted] = units.try_emplace(id);
    Partial& p = it->second;
    if (inserted) {
      order.push_back(id);
      p.first_line = row.line;
      p.e = e;
    } else if (p.e != e) {
      throw ParseError(row.line, "e", "cohort not constant within unit '" +
                                          id + "'");
    }
    if (!p.y.emplace(period, y).second) {
      throw ParseError(row.line, "t",
                       "duplicate (unit, period) for unit '" + id + "'");
    }
    max_period = std::max(max_period, period);
  }
  std::vector<CohortRecord> rows;
  for (const auto& id : order) {
    const Partial& p = units.at(id);
    CohortRecord r{id, {}, p.e};
    for (long k = 1; k <= max_period; ++k) {
      auto it = p.y.find(k);
      if (it == p.y.end()) {
        throw ParseError(p.first_line, "t",
                         "missing period " + std::to_string(k) +
                             " for unit '" + id + "'");
      }
      r.outcomes.push_back(it->second);
    }
    rows.push_back(std::move(r));
  }
  try {
    return CohortPanel(std::move(rows));
  } catch (const DataError& e) {
    throw ParseError(t.rows().empty() ? 1 : t.rows().back().line, "*",
                     e.what());
  }
}

CohortPanel load_cohort_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file '" + path + "'");
  return load_cohort(in);
}

}  // namespace antbounds
