#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace fxrca::data {

struct ExportEntry {
  std::string region;
  std::string industry;
  int year = 0;
  double export_value = 0.0;
};

// Export values by (region, industry, year). One region, `world_region`,
// holds world totals per industry and year. Absent cells count as zero.
class ExportTable {
 public:
  explicit ExportTable(std::vector<ExportEntry> entries, std::string world_region = "WORLD");

  const std::string& world_region() const { return world_; }
  const std::vector<ExportEntry>& entries() const { return entries_; }

  double value(const std::string& region, const std::string& industry, int year) const;
  double region_total(const std::string& region, int year) const;

  std::vector<std::string> regions() const;  // excludes the world region
  std::vector<std::string> industries() const;
  std::vector<int> years() const;

 private:
  std::vector<ExportEntry> entries_;
  std::string world_;
  std::map<std::tuple<std::string, std::string, int>, double> cells_;
  std::map<std::pair<std::string, int>, double> region_totals_;
};

ExportTable parse_export_csv(std::istream& in, const std::string& world_region = "WORLD");
ExportTable load_export_csv(const std::filesystem::path& path, const std::string& world_region = "WORLD");

// (X_ijt / sum_i X_ijt) / (W_it / sum_i W_it), with W the world region.
// Throws EstimationError naming the vanishing sum.
double rca_index_from_exports(const ExportTable& table, const std::string& region, const std::string& industry,
                              int year);

struct RcaCell {
  std::string region;
  std::string industry;
  int year = 0;
  std::optional<double> rca;  // empty when a denominator vanished
  std::string error;
};

// Every non-world (region, industry, year) combination present in the table.
std::vector<RcaCell> rca_all(const ExportTable& table);

}  // namespace fxrca::data
