#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fxrca::data {

// Columns every panel file must carry besides province and year.
inline const std::vector<std::string> kRequiredColumns = {
    "rca", "exrate", "unemployment", "ln_population", "ln_retail", "ln_power",
    "vgdp", "law", "ln_government", "ln_first"};

// Instrument inputs; optional in the file, required by build_instrument.
inline const std::vector<std::string> kInstrumentColumns = {"market", "epu", "gpr"};

inline const std::vector<std::string> kControlColumns = {
    "ln_population", "ln_retail", "vgdp", "ln_government", "law", "ln_first", "ln_power", "unemployment"};

inline constexpr double kDefaultTreatThreshold = 6.58;

// Province x year observations. Rows are kept sorted by (province, year) and
// the key is unique. Numeric columns keep insertion order; NaN marks a value
// that does not exist (e.g. the lag in a province's first year).
class PanelDataset {
 public:
  using Column = std::pair<std::string, std::vector<double>>;

  PanelDataset() = default;
  PanelDataset(std::vector<std::string> province, std::vector<int> year, std::vector<Column> columns);

  std::size_t rows() const { return year_.size(); }
  const std::vector<std::string>& provinces() const { return province_; }
  const std::vector<int>& years() const { return year_; }

  std::vector<std::string> column_names() const;
  bool has_column(const std::string& name) const;
  // "year" resolves to the year key as doubles.
  std::vector<double> values(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;

  // New dataset with `name` replaced or appended.
  PanelDataset with_column(const std::string& name, std::vector<double> values) const;
  PanelDataset select_rows(const std::vector<std::size_t>& rows) const;

  template <typename Pred>
  PanelDataset filter(Pred pred) const {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < rows(); ++i)
      if (pred(i)) keep.push_back(i);
    return select_rows(keep);
  }

  std::vector<std::string> distinct_provinces() const;
  std::vector<int> distinct_years() const;

  // Equality treats NaN cells as equal to each other.
  bool operator==(const PanelDataset& other) const;

 private:
  std::vector<std::string> province_;
  std::vector<int> year_;
  std::vector<Column> columns_;
};

PanelDataset parse_panel_csv(std::istream& in);
PanelDataset load_panel_csv(const std::filesystem::path& path);
void write_panel_csv(std::ostream& out, const PanelDataset& panel);

// Value at year t is |x(t+1) - x(t)|; the last year has no value.
std::map<int, double> abs_first_difference(const std::map<int, double>& series);

// Per-province lag of `column` (NaN when the previous year is absent).
std::vector<double> lag_within_province(const PanelDataset& panel, const std::string& column);

// Adds d_exrate (forward absolute difference, NaN in each province's last
// year) and l_exrate (one-year lag, NaN in the first year).
PanelDataset add_exrate_derivatives(const PanelDataset& panel);

// Rows with variable <= threshold go to `first`, the rest to `second`.
// Rows where the variable is NaN are in neither.
std::pair<PanelDataset, PanelDataset> split_by_threshold(const PanelDataset& panel, const std::string& variable,
                                                         double threshold);

enum class RcaBand { weak, moderate, strong, extremely_strong };

// Bands [0, 0.8), [0.8, 1.25), [1.25, 2.5), [2.5, inf).
RcaBand classify_rca(double value);
std::string to_string(RcaBand band);

struct AnnualRates {
  std::map<int, double> annual;
  double grand_mean = 0.0;
};

using MonthlyRates = std::map<std::pair<int, int>, double>;

MonthlyRates load_monthly_csv(const std::filesystem::path& path);
MonthlyRates parse_monthly_csv(std::istream& in);
AnnualRates annual_mean_exrate(const MonthlyRates& monthly);

struct DidSpec {
  int window_start = 2012;
  int window_end = 2020;
  int shock_year = 2016;
  double treat_threshold = kDefaultTreatThreshold;
  int leads = 4;
  int lags = 4;
  int base_period = -1;
  // When set, treat comes from this 0/1 column instead of the exchange-rate
  // threshold rule. Needed for designs with cross-sectional treatment.
  std::optional<std::string> group_column;

  void validate() const;
};

// Adds treat = exrate > threshold (or the group column), post = year >=
// shock_year, relative_year = year - shock_year.
PanelDataset assign_treat_post(const PanelDataset& panel, const DidSpec& spec);

// Adds tool = market * ln(epu * gpr) and l_tool, its one-year lag within
// province.
PanelDataset build_instrument(const PanelDataset& panel);

}  // namespace fxrca::data
