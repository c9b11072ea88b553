#include "fxrca/exports.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "fxrca/csv.hpp"
#include "fxrca/error.hpp"

namespace fxrca::data {

ExportTable::ExportTable(std::vector<ExportEntry> entries, std::string world_region)
    : entries_(std::move(entries)), world_(std::move(world_region)) {
  for (const auto& e : entries_) {
    if (!(e.export_value >= 0.0) || !std::isfinite(e.export_value))
      throw DataError("export value must be finite and non-negative for (" + e.region + ", " + e.industry + ", " +
                      std::to_string(e.year) + ")");
    if (!cells_.emplace(std::tuple{e.region, e.industry, e.year}, e.export_value).second)
      throw DataError("duplicate export cell (" + e.region + ", " + e.industry + ", " + std::to_string(e.year) + ")");
    region_totals_[{e.region, e.year}] += e.export_value;
  }
  for (const auto& e : entries_) {
    if (e.region == world_) continue;
    const double w = value(world_, e.industry, e.year);
    if (e.export_value > w)
      throw DataError("region " + e.region + " exports more of " + e.industry + " in " + std::to_string(e.year) +
                      " than the world region " + world_);
  }
}

double ExportTable::value(const std::string& region, const std::string& industry, int year) const {
  auto it = cells_.find({region, industry, year});
  return it == cells_.end() ? 0.0 : it->second;
}

double ExportTable::region_total(const std::string& region, int year) const {
  auto it = region_totals_.find({region, year});
  return it == region_totals_.end() ? 0.0 : it->second;
}

std::vector<std::string> ExportTable::regions() const {
  std::set<std::string> s;
  for (const auto& e : entries_)
    if (e.region != world_) s.insert(e.region);
  return {s.begin(), s.end()};
}

std::vector<std::string> ExportTable::industries() const {
  std::set<std::string> s;
  for (const auto& e : entries_) s.insert(e.industry);
  return {s.begin(), s.end()};
}

std::vector<int> ExportTable::years() const {
  std::set<int> s;
  for (const auto& e : entries_) s.insert(e.year);
  return {s.begin(), s.end()};
}

ExportTable parse_export_csv(std::istream& in, const std::string& world_region) {
  const auto table = read_csv(in);
  const int r = table.column_index("region"), i = table.column_index("industry"), y = table.column_index("year"),
            v = table.column_index("export_value");
  for (auto [idx, name] : {std::pair{r, "region"}, {i, "industry"}, {y, "year"}, {v, "export_value"}})
    if (idx < 0) throw DataError(std::string("export table schema error: missing required column '") + name + "'");
  std::vector<ExportEntry> entries;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const auto where = "line " + std::to_string(table.line_numbers[k]);
    ExportEntry e{row[r], row[i], 0, 0.0};
    auto [py, ey] = std::from_chars(row[y].data(), row[y].data() + row[y].size(), e.year);
    if (ey != std::errc{} || py != row[y].data() + row[y].size())
      throw DataError(where + ", column 'year': '" + row[y] + "' is not an integer");
    auto [pv, ev] = std::from_chars(row[v].data(), row[v].data() + row[v].size(), e.export_value);
    if (ev != std::errc{} || pv != row[v].data() + row[v].size())
      throw DataError(where + ", column 'export_value': '" + row[v] + "' is not numeric");
    if (e.region.empty() || e.industry.empty()) throw DataError(where + ": missing region or industry");
    entries.push_back(std::move(e));
  }
  return ExportTable(std::move(entries), world_region);
}

ExportTable load_export_csv(const std::filesystem::path& path, const std::string& world_region) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open export table " + path.string());
  return parse_export_csv(in, world_region);
}

double rca_index_from_exports(const ExportTable& table, const std::string& region, const std::string& industry,
                              int year) {
  const auto where = " (region " + region + ", industry " + industry + ", year " + std::to_string(year) + ")";
  const double region_total = table.region_total(region, year);
  if (!(region_total > 0.0)) throw EstimationError("region total exports are zero" + where);
  const double world_industry = table.value(table.world_region(), industry, year);
  if (!(world_industry > 0.0)) throw EstimationError("world exports of the industry are zero" + where);
  const double world_total = table.region_total(table.world_region(), year);
  if (!(world_total > 0.0)) throw EstimationError("world total exports are zero" + where);
  const double x = table.value(region, industry, year);
  return (x / region_total) / (world_industry / world_total);
}

std::vector<RcaCell> rca_all(const ExportTable& table) {
  std::vector<RcaCell> out;
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& e : table.entries()) {
    if (e.region == table.world_region()) continue;
    if (!seen.emplace(e.region, e.industry, e.year).second) continue;
  }
  for (const auto& [region, industry, year] : seen) {
    RcaCell cell{region, industry, year, std::nullopt, {}};
    try {
      cell.rca = rca_index_from_exports(table, region, industry, year);
    } catch (const EstimationError& e) {
      cell.error = e.what();
    }
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace fxrca::data
