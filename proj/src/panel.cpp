#include "fxrca/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "fxrca/csv.hpp"
#include "fxrca/error.hpp"
#include "fxrca/kv_config.hpp"

namespace fxrca::data {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool parse_double(const std::string& text, double& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_int(const std::string& text, int& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool same_cell(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

class ErrorList {
 public:
  void add(std::string message) {
    if (messages_.size() < kMaxReported) messages_.push_back(std::move(message));
    ++count_;
  }
  void throw_if_any(const std::string& prefix) const {
    if (count_ == 0) return;
    std::string text = prefix;
    for (const auto& m : messages_) text += "\n  " + m;
    if (count_ > messages_.size()) text += "\n  ... and " + std::to_string(count_ - messages_.size()) + " more";
    throw DataError(text);
  }

 private:
  static constexpr std::size_t kMaxReported = 20;
  std::vector<std::string> messages_;
  std::size_t count_ = 0;
};

// Row indices of each province in year order (rows are already sorted).
std::map<std::string, std::vector<std::size_t>> rows_by_province(const PanelDataset& panel) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < panel.rows(); ++i) out[panel.provinces()[i]].push_back(i);
  return out;
}

}  // namespace

PanelDataset::PanelDataset(std::vector<std::string> province, std::vector<int> year, std::vector<Column> columns) {
  const auto n = year.size();
  if (province.size() != n) throw DataError("panel: province and year lengths differ");
  std::set<std::string> names;
  for (const auto& [name, values] : columns) {
    if (values.size() != n) throw DataError("panel: column '" + name + "' has wrong length");
    if (name == "province" || name == "year" || !names.insert(name).second)
      throw DataError("panel: duplicate column '" + name + "'");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(province[a], year[a]) < std::tie(province[b], year[b]);
  });
  for (std::size_t k = 1; k < n; ++k) {
    const auto a = order[k - 1], b = order[k];
    if (province[a] == province[b] && year[a] == year[b])
      throw DataError("duplicate (province, year) key: (" + province[b] + ", " + std::to_string(year[b]) + ")");
  }

  province_.reserve(n);
  year_.reserve(n);
  for (auto i : order) {
    province_.push_back(province[i]);
    year_.push_back(year[i]);
  }
  for (auto& [name, values] : columns) {
    std::vector<double> sorted(n);
    for (std::size_t k = 0; k < n; ++k) sorted[k] = values[order[k]];
    columns_.emplace_back(name, std::move(sorted));
  }
}

std::vector<std::string> PanelDataset::column_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns_) out.push_back(c.first);
  return out;
}

bool PanelDataset::has_column(const std::string& name) const {
  if (name == "year") return true;
  return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.first == name; });
}

const std::vector<double>& PanelDataset::column(const std::string& name) const {
  for (const auto& c : columns_)
    if (c.first == name) return c.second;
  throw DataError("panel has no column '" + name + "'");
}

std::vector<double> PanelDataset::values(const std::string& name) const {
  if (name == "year") return {year_.begin(), year_.end()};
  return column(name);
}

PanelDataset PanelDataset::with_column(const std::string& name, std::vector<double> values) const {
  if (values.size() != rows()) throw DataError("with_column: '" + name + "' has wrong length");
  if (name == "province" || name == "year") throw DataError("with_column: cannot replace key column " + name);
  PanelDataset out = *this;
  for (auto& c : out.columns_) {
    if (c.first == name) {
      c.second = std::move(values);
      return out;
    }
  }
  out.columns_.emplace_back(name, std::move(values));
  return out;
}

PanelDataset PanelDataset::select_rows(const std::vector<std::size_t>& rows) const {
  PanelDataset out;
  out.province_.reserve(rows.size());
  out.year_.reserve(rows.size());
  for (auto i : rows) {
    out.province_.push_back(province_.at(i));
    out.year_.push_back(year_.at(i));
  }
  for (const auto& [name, values] : columns_) {
    std::vector<double> picked;
    picked.reserve(rows.size());
    for (auto i : rows) picked.push_back(values[i]);
    out.columns_.emplace_back(name, std::move(picked));
  }
  return out;
}

std::vector<std::string> PanelDataset::distinct_provinces() const {
  std::set<std::string> s(province_.begin(), province_.end());
  return {s.begin(), s.end()};
}

std::vector<int> PanelDataset::distinct_years() const {
  std::set<int> s(year_.begin(), year_.end());
  return {s.begin(), s.end()};
}

bool PanelDataset::operator==(const PanelDataset& other) const {
  if (province_ != other.province_ || year_ != other.year_ || columns_.size() != other.columns_.size()) return false;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].first != other.columns_[c].first) return false;
    const auto& a = columns_[c].second;
    const auto& b = other.columns_[c].second;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!same_cell(a[i], b[i])) return false;
  }
  return true;
}

PanelDataset parse_panel_csv(std::istream& in) {
  const auto table = read_csv(in);
  const int province_col = table.column_index("province");
  const int year_col = table.column_index("year");

  ErrorList schema;
  if (province_col < 0) schema.add("missing required column 'province'");
  if (year_col < 0) schema.add("missing required column 'year'");
  for (const auto& name : kRequiredColumns)
    if (table.column_index(name) < 0) schema.add("missing required column '" + name + "'");
  schema.throw_if_any("panel schema error:");

  std::set<std::string> strict(kRequiredColumns.begin(), kRequiredColumns.end());
  strict.insert(kInstrumentColumns.begin(), kInstrumentColumns.end());

  const auto n = table.rows.size();
  std::vector<std::string> province(n);
  std::vector<int> year(n);
  std::vector<PanelDataset::Column> columns;
  std::vector<int> source;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<int>(c) == province_col || static_cast<int>(c) == year_col) continue;
    columns.emplace_back(table.header[c], std::vector<double>(n));
    source.push_back(static_cast<int>(c));
  }

  ErrorList cells;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const auto where = "line " + std::to_string(table.line_numbers[r]);
    province[r] = row[province_col];
    if (province[r].empty()) cells.add(where + ", column 'province': missing value");
    if (!parse_int(row[year_col], year[r])) cells.add(where + ", column 'year': '" + row[year_col] + "' is not an integer");
    for (std::size_t k = 0; k < columns.size(); ++k) {
      const auto& name = columns[k].first;
      const auto& text = row[source[k]];
      double& cell = columns[k].second[r];
      if (text.empty() || text == "NA" || text == "NaN") {
        if (strict.count(name)) cells.add(where + ", column '" + name + "': missing value");
        cell = kNaN;
      } else if (!parse_double(text, cell)) {
        cells.add(where + ", column '" + name + "': '" + text + "' is not numeric");
      }
    }
  }
  cells.throw_if_any("panel content error:");
  return PanelDataset(std::move(province), std::move(year), std::move(columns));
}

PanelDataset load_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open panel file " + path.string());
  try {
    return parse_panel_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_panel_csv(std::ostream& out, const PanelDataset& panel) {
  const auto names = panel.column_names();
  out << "province,year";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  std::vector<const std::vector<double>*> cols;
  for (const auto& n : names) cols.push_back(&panel.column(n));
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    out << csv_field(panel.provinces()[i]) << ',' << panel.years()[i];
    for (const auto* c : cols) out << ',' << format_double((*c)[i]);
    out << '\n';
  }
}

std::map<int, double> abs_first_difference(const std::map<int, double>& series) {
  std::map<int, double> out;
  for (auto it = series.begin(); it != series.end(); ++it) {
    auto next = std::next(it);
    if (next == series.end()) break;
    if (next->first != it->first + 1)
      throw DataError("abs_first_difference: gap between years " + std::to_string(it->first) + " and " +
                      std::to_string(next->first));
    out[it->first] = std::abs(next->second - it->second);
  }
  return out;
}

std::vector<double> lag_within_province(const PanelDataset& panel, const std::string& column) {
  const auto& x = panel.column(column);
  std::vector<double> out(panel.rows(), kNaN);
  for (std::size_t i = 1; i < panel.rows(); ++i) {
    if (panel.provinces()[i] == panel.provinces()[i - 1] && panel.years()[i] == panel.years()[i - 1] + 1)
      out[i] = x[i - 1];
  }
  return out;
}

PanelDataset add_exrate_derivatives(const PanelDataset& panel) {
  const auto& exrate = panel.column("exrate");
  std::vector<double> diff(panel.rows(), kNaN);
  for (const auto& [province, idx] : rows_by_province(panel)) {
    std::map<int, double> series;
    for (auto i : idx) series[panel.years()[i]] = exrate[i];
    std::map<int, double> d;
    try {
      d = abs_first_difference(series);
    } catch (const DataError& e) {
      throw DataError("province " + province + ": " + e.what());
    }
    for (auto i : idx) {
      auto it = d.find(panel.years()[i]);
      if (it != d.end()) diff[i] = it->second;
    }
  }
  return panel.with_column("d_exrate", std::move(diff)).with_column("l_exrate", lag_within_province(panel, "exrate"));
}

std::pair<PanelDataset, PanelDataset> split_by_threshold(const PanelDataset& panel, const std::string& variable,
                                                         double threshold) {
  const auto x = panel.values(variable);
  auto below = panel.filter([&](std::size_t i) { return !std::isnan(x[i]) && x[i] <= threshold; });
  auto above = panel.filter([&](std::size_t i) { return !std::isnan(x[i]) && x[i] > threshold; });
  return {std::move(below), std::move(above)};
}

RcaBand classify_rca(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("classify_rca: value must be positive and finite");
  if (value < 0.8) return RcaBand::weak;
  if (value < 1.25) return RcaBand::moderate;
  if (value < 2.5) return RcaBand::strong;
  return RcaBand::extremely_strong;
}

std::string to_string(RcaBand band) {
  switch (band) {
    case RcaBand::weak: return "weak";
    case RcaBand::moderate: return "moderate";
    case RcaBand::strong: return "strong";
    case RcaBand::extremely_strong: return "extremely_strong";
  }
  return "unknown";
}

MonthlyRates parse_monthly_csv(std::istream& in) {
  const auto table = read_csv(in);
  const int y = table.column_index("year"), m = table.column_index("month"), r = table.column_index("rate");
  ErrorList errors;
  if (y < 0) errors.add("missing required column 'year'");
  if (m < 0) errors.add("missing required column 'month'");
  if (r < 0) errors.add("missing required column 'rate'");
  errors.throw_if_any("monthly rate schema error:");
  MonthlyRates out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto where = "line " + std::to_string(table.line_numbers[i]);
    int year = 0, month = 0;
    double rate = 0.0;
    if (!parse_int(row[y], year)) errors.add(where + ": bad year '" + row[y] + "'");
    else if (!parse_int(row[m], month) || month < 1 || month > 12) errors.add(where + ": bad month '" + row[m] + "'");
    else if (!parse_double(row[r], rate)) errors.add(where + ": bad rate '" + row[r] + "'");
    else if (!out.emplace(std::pair{year, month}, rate).second) errors.add(where + ": duplicate year/month");
  }
  errors.throw_if_any("monthly rate content error:");
  return out;
}

MonthlyRates load_monthly_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open monthly rate file " + path.string());
  return parse_monthly_csv(in);
}

AnnualRates annual_mean_exrate(const MonthlyRates& monthly) {
  if (monthly.empty()) throw DataError("annual_mean_exrate: no monthly observations");
  std::map<int, std::vector<double>> by_year;
  for (const auto& [key, rate] : monthly) by_year[key.first].push_back(rate);
  AnnualRates out;
  double total = 0.0;
  for (const auto& [year, rates] : by_year) {
    if (rates.size() != 12)
      throw DataError("annual_mean_exrate: year " + std::to_string(year) + " has " + std::to_string(rates.size()) +
                      " months, expected 12");
    double sum = 0.0;
    for (double r : rates) sum += r;
    out.annual[year] = sum / 12.0;
    total += out.annual[year];
  }
  out.grand_mean = total / static_cast<double>(out.annual.size());
  return out;
}

void DidSpec::validate() const {
  if (!(window_start <= shock_year && shock_year <= window_end))
    throw ConfigError("did window must satisfy start <= shock <= end");
  if (leads < 0 || lags < 0) throw ConfigError("event-study leads/lags must be non-negative");
  if (!std::isfinite(treat_threshold)) throw ConfigError("treat_threshold must be finite");
}

PanelDataset assign_treat_post(const PanelDataset& panel, const DidSpec& spec) {
  spec.validate();
  const auto years = panel.distinct_years();
  if (years.empty() || spec.window_start < years.front() || spec.window_end > years.back())
    throw DataError("did window " + std::to_string(spec.window_start) + ":" + std::to_string(spec.window_end) +
                    " lies outside the data span");
  const auto n = panel.rows();
  std::vector<double> treat(n), post(n), rel(n);
  const std::vector<double>* source = spec.group_column ? &panel.column(*spec.group_column) : &panel.column("exrate");
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (*source)[i];
    treat[i] = spec.group_column ? (v > 0.5 ? 1.0 : 0.0) : (v > spec.treat_threshold ? 1.0 : 0.0);
    post[i] = panel.years()[i] >= spec.shock_year ? 1.0 : 0.0;
    rel[i] = panel.years()[i] - spec.shock_year;
  }
  return panel.with_column("treat", std::move(treat))
      .with_column("post", std::move(post))
      .with_column("relative_year", std::move(rel));
}

PanelDataset build_instrument(const PanelDataset& panel) {
  for (const auto& name : kInstrumentColumns)
    if (!panel.has_column(name)) throw DataError("build_instrument: panel has no column '" + name + "'");
  const auto& market = panel.column("market");
  const auto& epu = panel.column("epu");
  const auto& gpr = panel.column("gpr");
  std::vector<double> tool(panel.rows());
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    const double product = epu[i] * gpr[i];
    if (!(product > 0.0))
      throw DomainError("build_instrument: epu * gpr must be positive (province " + panel.provinces()[i] +
                        ", year " + std::to_string(panel.years()[i]) + ")");
    tool[i] = market[i] * std::log(product);
  }
  auto with_tool = panel.with_column("tool", std::move(tool));
  return with_tool.with_column("l_tool", lag_within_province(with_tool, "tool"));
}

}  // namespace fxrca::data
