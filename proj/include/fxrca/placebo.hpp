#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fxrca/panel.hpp"
#include "fxrca/regression.hpp"

namespace fxrca::econ {

using PanelEstimator = std::function<RegressionFit(const data::PanelDataset&)>;

struct PlaceboSetup {
  std::string permuted_column = "exrate";
  std::string coefficient = "exrate";
  PanelEstimator estimator;
};

struct PlaceboResult {
  std::vector<double> coefficients;
  std::vector<double> p_values;
  double observed_coefficient = 0.0;
  double observed_p = 1.0;
  // (1 + #{|b_d| >= |b_obs|}) / (draws + 1)
  double permutation_p_value = 1.0;
  std::uint64_t seed = 0;
};

// Reassigns whole year cross-sections: the value at (province, year) becomes
// the original value at (province, perm(year)). Requires a balanced panel.
data::PanelDataset permute_years(const data::PanelDataset& panel, const std::string& column,
                                 const std::vector<int>& years, const std::vector<int>& permuted_years);

// Draw d uses an engine seeded from derive_seed(seed, d), so results do not
// depend on scheduling. Throws ConfigError with fewer than 3 distinct years.
PlaceboResult placebo_permutation(const data::PanelDataset& panel, const PlaceboSetup& setup, int n_draws,
                                  std::uint64_t seed, unsigned threads = 0);

}  // namespace fxrca::econ
