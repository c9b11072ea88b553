#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fxrca/kv_config.hpp"

namespace fxrca::model {

// Parameters of the log exchange-rate process and the log-RCA map. Defaults
// are the baseline calibration (T = 1000, shock at 300, elasticity 2,
// persistence 0.89, volatility 0.05 damped by e^-2, a = 0.02, b = 0.8,
// c = 0.05) with the low-mean scenario s_bar = 0.
struct SimParams {
  int total_time = 1000;
  int shock_time = 300;
  double elasticity = 2.0;
  double persistence = 0.89;
  double mean_log_rate = 0.0;
  double init_vol = 0.05;
  double policy_gamma = 2.0;
  double world_index = 0.02;
  double cost_level = 0.8;
  double cost_vol = 0.05;
  double foreign_log_price = 0.0;
  double world_log_export = 1.0;
  // When true the policy indicator also enters the level equation
  // additively. Off by default: the indicator acts only through volatility.
  bool additive_policy = false;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  bool operator==(const SimParams&) const = default;
};

SimParams params_from_kv(const KeyValues& kv);
SimParams load_params(const std::filesystem::path& path);
void write_params(std::ostream& out, const SimParams& p);

struct RatePath {
  std::vector<double> log_rates;
  std::vector<double> vols;
  std::vector<int> policy;
  std::uint64_t seed = 0;

  bool operator==(const RatePath&) const = default;
};

struct CostWorldDraw {
  double mc = 0.0;
  double y_i = 0.0;
};

struct RcaPoint {
  double log_rca = 0.0;
  double rca = 0.0;
  CostWorldDraw draws;
};

// k = ln K with K = (e/(e-1))^-e.
double derived_k(double elasticity);

int policy_indicator(int t, int t_star);

double volatility_at(int t, const SimParams& params);

double step_rate(double s_prev, int t, const SimParams& params, double theta);

// s[0] starts at s_bar (or at the end of `burn_in` pre-shock steps started
// from s_bar); every later step draws theta ~ N(0, volatility_at(t)^2).
RatePath simulate_path(const SimParams& params, std::uint64_t seed, int burn_in = 0);

CostWorldDraw draw_cost_world(const SimParams& params, double z_cost, double z_world);

RcaPoint log_rca(double s, const CostWorldDraw& draw, const SimParams& params);

// Markup price e/(e-1) * mc / S for level exchange rate S.
double optimal_export_price(double mc, double s_level, double elasticity);

}  // namespace fxrca::model
