#include "fxrca/placebo.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fxrca/error.hpp"
#include "fxrca/parallel.hpp"
#include "fxrca/rng.hpp"

namespace fxrca::econ {

data::PanelDataset permute_years(const data::PanelDataset& panel, const std::string& column,
                                 const std::vector<int>& years, const std::vector<int>& permuted_years) {
  std::map<int, int> source_year;
  for (std::size_t k = 0; k < years.size(); ++k) source_year[years[k]] = permuted_years[k];
  std::map<std::pair<std::string, int>, double> lookup;
  const auto& values = panel.column(column);
  for (std::size_t i = 0; i < panel.rows(); ++i) lookup[{panel.provinces()[i], panel.years()[i]}] = values[i];

  std::vector<double> out(panel.rows());
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    const auto it = lookup.find({panel.provinces()[i], source_year.at(panel.years()[i])});
    if (it == lookup.end())
      throw DataError("placebo permutation needs a balanced panel: province " + panel.provinces()[i] +
                      " has no year " + std::to_string(source_year.at(panel.years()[i])));
    out[i] = it->second;
  }
  return panel.with_column(column, std::move(out));
}

PlaceboResult placebo_permutation(const data::PanelDataset& panel, const PlaceboSetup& setup, int n_draws,
                                  std::uint64_t seed, unsigned threads) {
  if (n_draws < 1) throw ConfigError("placebo: draws must be positive");
  if (!setup.estimator) throw ConfigError("placebo: no estimator configured");
  if (!panel.has_column(setup.permuted_column))
    throw DataError("placebo: panel has no column '" + setup.permuted_column + "'");
  const auto years = panel.distinct_years();
  if (years.size() < 3)
    throw ConfigError("placebo: need at least 3 distinct years, got " + std::to_string(years.size()));

  PlaceboResult result;
  result.seed = seed;
  const auto observed = setup.estimator(panel);
  result.observed_coefficient = observed.coef(setup.coefficient);
  result.observed_p = observed.term(setup.coefficient).p_value;

  result.coefficients.resize(static_cast<std::size_t>(n_draws));
  result.p_values.resize(static_cast<std::size_t>(n_draws));
  parallel_for(
      static_cast<std::size_t>(n_draws),
      [&](std::size_t d) {
        auto engine = make_engine(seed, d);
        auto shuffled = years;
        // Fisher-Yates with an explicit uniform draw keeps the sequence
        // identical across standard-library implementations.
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
          const auto j = static_cast<std::size_t>(engine() % (i + 1));
          std::swap(shuffled[i], shuffled[j]);
        }
        const auto fit = setup.estimator(permute_years(panel, setup.permuted_column, years, shuffled));
        const auto& term = fit.term(setup.coefficient);
        result.coefficients[d] = term.estimate;
        result.p_values[d] = term.p_value;
      },
      threads);

  const double obs = std::abs(result.observed_coefficient);
  const auto extreme = std::count_if(result.coefficients.begin(), result.coefficients.end(),
                                     [&](double b) { return std::abs(b) >= obs; });
  result.permutation_p_value = (1.0 + static_cast<double>(extreme)) / (n_draws + 1.0);
  return result;
}

}  // namespace fxrca::econ
