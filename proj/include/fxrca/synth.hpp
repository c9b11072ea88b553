#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "fxrca/kv_config.hpp"
#include "fxrca/panel.hpp"

namespace fxrca::data {

// Synthetic province x year panel with known parameters. The outcome is
//
//   rca = intercept + province_effect + beta_exrate * exrate
//         + sum_c beta_c * control_c + beta_trend * (year - first_year)
//         + tau_did * treat * post + pretrend + error
//
// The national exchange rate is exp(s_t) with s_t the annual AR(1) from the
// model module (volatility damped from shock_year on). With
// exrate_idio_sd > 0 each province sees exrate_t + instrument_strength *
// (tool_{i,t-1} - mean) + v_it, and the outcome error is correlated with
// v_it at `endogeneity`.
struct SynthConfig {
  int n_provinces = 30;
  int first_year = 2008;
  int last_year = 2021;
  std::uint64_t seed = 20150811;

  double intercept = 2.2;
  double beta_exrate = 0.144;
  double beta_trend = 0.0;
  std::map<std::string, double> beta_controls = {
      {"ln_population", -0.448}, {"ln_retail", 0.179}, {"vgdp", -0.013}, {"ln_government", -0.151},
      {"law", 0.004},            {"ln_first", 0.036},  {"ln_power", 0.118}, {"unemployment", 0.049}};
  double tau_did = 0.138;
  double province_effect_sd = 0.2;
  double error_sd = 0.1;
  double control_sd = 0.5;

  double exrate_mean = 6.8;
  double exrate_persistence = 0.7;
  double exrate_vol = 0.04;
  double exrate_policy_gamma = 1.0;
  int shock_year = 2016;
  double treat_threshold = kDefaultTreatThreshold;

  double endogeneity = 0.0;
  double instrument_strength = 0.0;
  double exrate_idio_sd = 0.0;

  // > 0: the first round(treat_share * n_provinces) provinces form a treated
  // group (written to column `group`) instead of the exchange-rate rule.
  double treat_share = 0.0;
  // Added to treated units before the shock: slope * (year - (shock_year - 1)).
  double treated_pretrend = 0.0;

  std::optional<double> censor_lower;
  std::optional<double> censor_upper;

  void validate() const;
};

SynthConfig synth_config_from_kv(const KeyValues& kv);

struct SynthTruth {
  SynthConfig config;
  std::map<std::string, double> coefficients;  // outcome equation incl. "_cons", "year"
  std::map<std::string, double> province_effects;
  std::map<int, double> national_exrate;
};

struct SynthResult {
  PanelDataset panel;
  SynthTruth truth;
};

SynthResult synth_panel(const SynthConfig& config);

std::string truth_to_json(const SynthTruth& truth);

}  // namespace fxrca::data
