#include <doctest.h>

#include <algorithm>
#include <map>

#include "fxrca/error.hpp"
#include "fxrca/placebo.hpp"
#include "fxrca/synth.hpp"

using namespace fxrca;
using namespace fxrca::econ;

namespace {

PlaceboSetup exrate_setup() {
  PlaceboSetup setup;
  setup.estimator = [](const data::PanelDataset& p) {
    ModelSpec spec;
    spec.regressors = {"exrate", "ln_population", "ln_retail"};
    spec.fixed_effect = "province";
    return fit_linear(p, spec);
  };
  return setup;
}

}  // namespace

TEST_CASE("permute_years moves whole cross-sections") {
  const auto panel = data::synth_panel({}).panel;
  const auto years = panel.distinct_years();
  auto perm = years;
  std::reverse(perm.begin(), perm.end());
  const auto out = permute_years(panel, "exrate", years, perm);

  std::map<std::pair<std::string, int>, double> orig;
  for (std::size_t i = 0; i < panel.rows(); ++i) orig[{panel.provinces()[i], panel.years()[i]}] = panel.column("exrate")[i];
  const int first = years.front(), last = years.back();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const int src = first + last - out.years()[i];
    CHECK(out.column("exrate")[i] == orig.at({out.provinces()[i], src}));
  }
  auto a = panel.column("exrate"), b = out.column("exrate");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(out.column("rca") == panel.column("rca"));

  const auto unbalanced = panel.filter([&](std::size_t i) { return i != 3; });
  CHECK_THROWS_AS(permute_years(unbalanced, "exrate", years, perm), DataError);
}

TEST_CASE("placebo draws are deterministic and thread independent") {
  const auto panel = data::synth_panel({}).panel;
  const auto setup = exrate_setup();
  const auto a = placebo_permutation(panel, setup, 20, 77, 1);
  const auto b = placebo_permutation(panel, setup, 20, 77, 4);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.p_values == b.p_values);
  CHECK(a.observed_coefficient == b.observed_coefficient);
  const auto c = placebo_permutation(panel, setup, 20, 78, 1);
  CHECK(c.coefficients != a.coefficients);
  CHECK(a.permutation_p_value > 0.0);
  CHECK(a.permutation_p_value <= 1.0);
  CHECK(a.seed == 77);
}

TEST_CASE("placebo argument checks") {
  const auto panel = data::synth_panel({}).panel;
  const auto two_years = panel.filter([&](std::size_t i) { return panel.years()[i] <= 2009; });
  CHECK_THROWS_AS(placebo_permutation(two_years, exrate_setup(), 5, 1), ConfigError);
  CHECK_THROWS_AS(placebo_permutation(panel, exrate_setup(), 0, 1), ConfigError);
  CHECK_THROWS_AS(placebo_permutation(panel, PlaceboSetup{}, 5, 1), ConfigError);
}
