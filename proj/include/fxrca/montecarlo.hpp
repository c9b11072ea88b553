#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fxrca/model.hpp"
#include "fxrca/stats.hpp"

namespace fxrca::montecarlo {

// Long-run mean regimes for the log exchange rate: s_bar = 0, 0.3, 0.6.
enum class Scenario { L, M, H };

inline constexpr Scenario kAllScenarios[] = {Scenario::L, Scenario::M, Scenario::H};

char scenario_label(Scenario s);
double scenario_mean(Scenario s);
Scenario parse_scenario(const std::string& label);

struct ScenarioSpec {
  model::SimParams params;
  Scenario scenario = Scenario::L;
  std::uint64_t seed = 1;
  int replications = 1;
  int burn_in = 0;
  double band_level = 0.95;
  std::size_t density_points = 512;
};

// Parameters with mean_log_rate replaced by the scenario's s_bar.
model::SimParams scenario_params(const ScenarioSpec& spec);

struct PrePostSummary {
  double pre_mean = 0.0;
  double pre_var = 0.0;
  double post_mean = 0.0;
  double post_var = 0.0;
  std::size_t n_pre = 0;
  std::size_t n_post = 0;
};

// Pre segment is [0, t_star), post is [t_star, n). Variances use n-1.
PrePostSummary summarize_pre_post(std::span<const double> series, std::size_t t_star);

struct ScenarioSummary {
  PrePostSummary s;
  PrePostSummary log_rca;
  PrePostSummary rca;
};

struct ReplicationSummary {
  std::size_t index = 0;
  ScenarioSummary summary;
};

// Field-wise mean across replications and its Monte Carlo standard error
// (sd / sqrt(R); zero for a single replication).
struct AggregateSummary {
  ScenarioSummary mean;
  ScenarioSummary se;
  std::size_t replications = 0;
};

// Sorts by replication index before summing, so the result does not depend
// on the order replications finished in.
AggregateSummary aggregate_replications(std::vector<ReplicationSummary> reps);

using Band = std::vector<std::pair<double, double>>;

// Constant band: pre-shock mean +/- z(level) * pre-shock sd, repeated over
// the whole horizon.
Band confidence_band(std::span<const double> series, std::size_t t_star, double level = 0.95);

struct ScenarioResult {
  model::RatePath path;
  std::vector<model::RcaPoint> rca_series;
  ScenarioSummary summary;    // first replication
  AggregateSummary aggregate;  // all replications
  stats::DensityGrid pre_density;
  stats::DensityGrid post_density;
  Band band;
};

ScenarioResult run_scenario(const ScenarioSpec& spec);

// One replication's series without densities or band. Used by the moment
// checks that need very long horizons.
struct ScenarioSeries {
  model::RatePath path;
  std::vector<model::RcaPoint> rca_series;
};
ScenarioSeries simulate_scenario_series(const model::SimParams& params, std::uint64_t seed, int burn_in = 0);

struct StationaryMoments {
  double mean_s = 0.0;
  double var_s_pre = 0.0;
  double var_s_post = 0.0;
  double mean_log_rca = 0.0;
  double var_log_rca_pre = 0.0;
  double var_log_rca_post = 0.0;
};

// Closed-form stationary moments of the AR(1) and log-RCA processes in each
// volatility regime. Requires additive_policy = false.
StationaryMoments stationary_moments(const model::SimParams& params);

}  // namespace fxrca::montecarlo
