#include "fxrca/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fxrca/error.hpp"
#include "fxrca/parallel.hpp"
#include "fxrca/rng.hpp"

namespace fxrca::montecarlo {

namespace {

constexpr std::uint64_t kCostWorldStream = 1;

std::uint64_t replication_seed(std::uint64_t master, std::size_t r) {
  return r == 0 ? master : derive_seed(master, r);
}

ScenarioSummary summarize_series(const ScenarioSeries& series, std::size_t t_star) {
  const auto n = series.rca_series.size();
  std::vector<double> log_rca(n), rca(n);
  for (std::size_t t = 0; t < n; ++t) {
    log_rca[t] = series.rca_series[t].log_rca;
    rca[t] = series.rca_series[t].rca;
  }
  return {summarize_pre_post(series.path.log_rates, t_star), summarize_pre_post(log_rca, t_star),
          summarize_pre_post(rca, t_star)};
}

// Applies op to the four real-valued fields of every PrePostSummary.
template <typename Op>
void for_each_field(ScenarioSummary& out, const ScenarioSummary& in, Op op) {
  auto apply = [&](PrePostSummary& o, const PrePostSummary& i) {
    op(o.pre_mean, i.pre_mean);
    op(o.pre_var, i.pre_var);
    op(o.post_mean, i.post_mean);
    op(o.post_var, i.post_var);
  };
  apply(out.s, in.s);
  apply(out.log_rca, in.log_rca);
  apply(out.rca, in.rca);
}

}  // namespace

char scenario_label(Scenario s) {
  switch (s) {
    case Scenario::L: return 'L';
    case Scenario::M: return 'M';
    case Scenario::H: return 'H';
  }
  return '?';
}

double scenario_mean(Scenario s) {
  switch (s) {
    case Scenario::L: return 0.0;
    case Scenario::M: return 0.3;
    case Scenario::H: return 0.6;
  }
  return 0.0;
}

Scenario parse_scenario(const std::string& label) {
  if (label == "L") return Scenario::L;
  if (label == "M") return Scenario::M;
  if (label == "H") return Scenario::H;
  throw ConfigError("unknown scenario '" + label + "' (expected L, M or H)");
}

model::SimParams scenario_params(const ScenarioSpec& spec) {
  auto p = spec.params;
  p.mean_log_rate = scenario_mean(spec.scenario);
  return p;
}

PrePostSummary summarize_pre_post(std::span<const double> series, std::size_t t_star) {
  if (t_star == 0 || t_star >= series.size())
    throw ConfigError("summarize_pre_post: shock index must leave both segments non-empty");
  const auto pre = series.first(t_star);
  const auto post = series.subspan(t_star);
  PrePostSummary out;
  out.n_pre = pre.size();
  out.n_post = post.size();
  out.pre_mean = stats::mean(pre);
  out.post_mean = stats::mean(post);
  out.pre_var = pre.size() >= 2 ? stats::sample_variance(pre) : 0.0;
  out.post_var = post.size() >= 2 ? stats::sample_variance(post) : 0.0;
  return out;
}

AggregateSummary aggregate_replications(std::vector<ReplicationSummary> reps) {
  if (reps.empty()) throw ConfigError("aggregate_replications: no replications");
  std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  const double r = static_cast<double>(reps.size());

  AggregateSummary agg;
  agg.replications = reps.size();
  agg.mean = reps.front().summary;
  for_each_field(agg.mean, agg.mean, [](double& o, double) { o = 0.0; });
  for (const auto& rep : reps) for_each_field(agg.mean, rep.summary, [](double& o, double i) { o += i; });
  for_each_field(agg.mean, agg.mean, [r](double& o, double) { o /= r; });

  agg.se = agg.mean;
  for_each_field(agg.se, agg.se, [](double& o, double) { o = 0.0; });
  if (reps.size() >= 2) {
    for (const auto& rep : reps) {
      ScenarioSummary dev = rep.summary;
      for_each_field(dev, agg.mean, [](double& o, double m) { o = (o - m) * (o - m); });
      for_each_field(agg.se, dev, [](double& o, double i) { o += i; });
    }
    for_each_field(agg.se, agg.se, [r](double& o, double) { o = std::sqrt(o / (r - 1.0)) / std::sqrt(r); });
  }
  return agg;
}

Band confidence_band(std::span<const double> series, std::size_t t_star, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence_band: level must lie in (0, 1)");
  if (t_star < 2 || t_star > series.size())
    throw ConfigError("confidence_band: need at least 2 pre-shock observations");
  const auto pre = series.first(t_star);
  const double m = stats::mean(pre);
  const double sd = std::sqrt(stats::sample_variance(pre));
  const double z = stats::normal_quantile(0.5 + 0.5 * level);
  return Band(series.size(), {m - z * sd, m + z * sd});
}

ScenarioSeries simulate_scenario_series(const model::SimParams& params, std::uint64_t seed, int burn_in) {
  ScenarioSeries out;
  out.path = model::simulate_path(params, seed, burn_in);
  Engine engine = make_engine(seed, kCostWorldStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  out.rca_series.reserve(out.path.log_rates.size());
  for (double s : out.path.log_rates) {
    const double z_cost = normal(engine);
    const double z_world = normal(engine);
    out.rca_series.push_back(model::log_rca(s, model::draw_cost_world(params, z_cost, z_world), params));
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  const auto params = scenario_params(spec);
  params.validate();
  if (params.total_time <= params.shock_time + 2)
    throw ConfigError("total_time must exceed shock_time + 2 so the post-shock sample has at least 3 points");
  if (params.shock_time < 2) throw ConfigError("shock_time must be at least 2 so the pre-shock sample has variance");
  if (spec.replications < 1) throw ConfigError("replications must be positive");

  const auto t_star = static_cast<std::size_t>(params.shock_time);
  const auto reps = static_cast<std::size_t>(spec.replications);

  ScenarioResult result;
  std::vector<ReplicationSummary> summaries(reps);
  parallel_for(reps, [&](std::size_t r) {
    auto series = simulate_scenario_series(params, replication_seed(spec.seed, r), spec.burn_in);
    summaries[r] = {r, summarize_series(series, t_star)};
    if (r == 0) {
      result.path = std::move(series.path);
      result.rca_series = std::move(series.rca_series);
    }
  });
  result.summary = summaries.front().summary;
  result.aggregate = aggregate_replications(summaries);

  std::vector<double> rca(result.rca_series.size());
  std::transform(result.rca_series.begin(), result.rca_series.end(), rca.begin(),
                 [](const model::RcaPoint& p) { return p.rca; });
  const std::span<const double> all(rca);
  result.pre_density = stats::kde_auto(all.first(t_star), spec.density_points);
  result.post_density = stats::kde_auto(all.subspan(t_star), spec.density_points);
  result.band = confidence_band(all, t_star, spec.band_level);
  return result;
}

StationaryMoments stationary_moments(const model::SimParams& params) {
  if (params.additive_policy)
    throw ConfigError("stationary_moments: closed form requires additive_policy = false");
  params.validate();
  const double rho2 = params.persistence * params.persistence;
  const double vol_post = params.init_vol * std::exp(-params.policy_gamma);
  const double eps = params.elasticity;
  const double idio = params.world_index * params.world_index + eps * eps * params.cost_vol * params.cost_vol;

  StationaryMoments m;
  m.mean_s = params.mean_log_rate;
  m.var_s_pre = params.init_vol * params.init_vol / (1.0 - rho2);
  m.var_s_post = vol_post * vol_post / (1.0 - rho2);
  m.mean_log_rca = model::derived_k(eps) + params.world_log_export - eps * params.cost_level +
                   eps * (params.mean_log_rate + params.foreign_log_price);
  m.var_log_rca_pre = eps * eps * m.var_s_pre + idio;
  m.var_log_rca_post = eps * eps * m.var_s_post + idio;
  return m;
}

}  // namespace fxrca::montecarlo
