#include "fxrca/model.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "fxrca/error.hpp"
#include "fxrca/rng.hpp"

namespace fxrca::model {

namespace {

constexpr std::uint64_t kRateStream = 0;

void require(bool ok, const char* key, const char* rule) {
  if (!ok) throw ConfigError(std::string("invalid ") + key + ": must satisfy " + rule);
}

}  // namespace

void SimParams::validate() const {
  require(total_time > 0, "total_time", "> 0");
  require(shock_time >= 0 && shock_time <= total_time, "shock_time", "0 <= shock_time <= total_time");
  require(std::isfinite(elasticity) && elasticity > 1.0, "elasticity", "> 1");
  require(persistence > 0.0 && persistence < 1.0, "persistence", "0 < persistence < 1");
  require(std::isfinite(mean_log_rate), "mean_log_rate", "finite");
  require(std::isfinite(init_vol) && init_vol >= 0.0, "init_vol", ">= 0");
  require(std::isfinite(policy_gamma) && policy_gamma >= 0.0, "policy_gamma", ">= 0");
  require(std::isfinite(world_index) && world_index >= 0.0, "world_index", ">= 0");
  require(std::isfinite(cost_level), "cost_level", "finite");
  require(std::isfinite(cost_vol) && cost_vol >= 0.0, "cost_vol", ">= 0");
  require(std::isfinite(foreign_log_price), "foreign_log_price", "finite");
  require(std::isfinite(world_log_export), "world_log_export", "finite");
}

SimParams params_from_kv(const KeyValues& kv) {
  SimParams p;
  for (const auto& [key, value] : kv) {
    if (key == "total_time") p.total_time = static_cast<int>(kv_integer(key, value));
    else if (key == "shock_time") p.shock_time = static_cast<int>(kv_integer(key, value));
    else if (key == "elasticity") p.elasticity = kv_double(key, value);
    else if (key == "persistence") p.persistence = kv_double(key, value);
    else if (key == "mean_log_rate") p.mean_log_rate = kv_double(key, value);
    else if (key == "init_vol") p.init_vol = kv_double(key, value);
    else if (key == "policy_gamma") p.policy_gamma = kv_double(key, value);
    else if (key == "world_index") p.world_index = kv_double(key, value);
    else if (key == "cost_level") p.cost_level = kv_double(key, value);
    else if (key == "cost_vol") p.cost_vol = kv_double(key, value);
    else if (key == "foreign_log_price") p.foreign_log_price = kv_double(key, value);
    else if (key == "world_log_export") p.world_log_export = kv_double(key, value);
    else if (key == "additive_policy") p.additive_policy = kv_bool(key, value);
    else throw ConfigError("unknown key '" + key + "'");
  }
  p.validate();
  return p;
}

SimParams load_params(const std::filesystem::path& path) {
  return params_from_kv(read_kv_file(path));
}

void write_params(std::ostream& out, const SimParams& p) {
  out << "total_time = " << p.total_time << '\n'
      << "shock_time = " << p.shock_time << '\n'
      << "elasticity = " << format_double(p.elasticity) << '\n'
      << "persistence = " << format_double(p.persistence) << '\n'
      << "mean_log_rate = " << format_double(p.mean_log_rate) << '\n'
      << "init_vol = " << format_double(p.init_vol) << '\n'
      << "policy_gamma = " << format_double(p.policy_gamma) << '\n'
      << "world_index = " << format_double(p.world_index) << '\n'
      << "cost_level = " << format_double(p.cost_level) << '\n'
      << "cost_vol = " << format_double(p.cost_vol) << '\n'
      << "foreign_log_price = " << format_double(p.foreign_log_price) << '\n'
      << "world_log_export = " << format_double(p.world_log_export) << '\n'
      << "additive_policy = " << (p.additive_policy ? "true" : "false") << '\n';
}

double derived_k(double elasticity) {
  if (!(elasticity > 1.0)) throw DomainError("derived_k: elasticity must exceed 1");
  // log1p keeps precision for large elasticities where e/(e-1) -> 1.
  return -elasticity * std::log1p(1.0 / (elasticity - 1.0));
}

int policy_indicator(int t, int t_star) { return t < t_star ? 0 : 1; }

double volatility_at(int t, const SimParams& params) {
  return params.init_vol * std::exp(-params.policy_gamma * policy_indicator(t, params.shock_time));
}

double step_rate(double s_prev, int t, const SimParams& params, double theta) {
  double next = params.persistence * s_prev + (1.0 - params.persistence) * params.mean_log_rate + theta;
  if (params.additive_policy) next += policy_indicator(t, params.shock_time);
  return next;
}

RatePath simulate_path(const SimParams& params, std::uint64_t seed, int burn_in) {
  params.validate();
  if (burn_in < 0) throw ConfigError("invalid burn_in: must be >= 0");

  Engine engine = make_engine(seed, kRateStream);
  std::normal_distribution<double> normal(0.0, 1.0);

  double s = params.mean_log_rate;
  for (int b = 0; b < burn_in; ++b) {
    // Burn-in runs in the pre-shock regime (t = -1 is always pre-shock).
    s = step_rate(s, -1, params, params.init_vol * normal(engine));
  }

  const auto n = static_cast<std::size_t>(params.total_time);
  RatePath path;
  path.seed = seed;
  path.log_rates.resize(n);
  path.vols.resize(n);
  path.policy.resize(n);
  for (int t = 0; t < params.total_time; ++t) {
    const double vol = volatility_at(t, params);
    if (t > 0) s = step_rate(s, t, params, vol * normal(engine));
    path.log_rates[t] = s;
    path.vols[t] = vol;
    path.policy[t] = policy_indicator(t, params.shock_time);
  }
  return path;
}

CostWorldDraw draw_cost_world(const SimParams& params, double z_cost, double z_world) {
  return {params.cost_level + params.cost_vol * z_cost, params.world_index * z_world};
}

RcaPoint log_rca(double s, const CostWorldDraw& draw, const SimParams& params) {
  const double eps = params.elasticity;
  const double value = derived_k(eps) + (params.world_log_export - draw.y_i) -
                       eps * (draw.mc - s - params.foreign_log_price);
  return {value, std::exp(value), draw};
}

double optimal_export_price(double mc, double s_level, double elasticity) {
  if (!(mc > 0.0)) throw DomainError("optimal_export_price: marginal cost must be positive");
  if (!(s_level > 0.0)) throw DomainError("optimal_export_price: exchange rate level must be positive");
  if (!(elasticity > 1.0)) throw DomainError("optimal_export_price: elasticity must exceed 1");
  return elasticity / (elasticity - 1.0) * mc / s_level;
}

}  // namespace fxrca::model
