#include "fxrca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "fxrca/error.hpp"
#include "fxrca/model.hpp"
#include "fxrca/rng.hpp"

namespace fxrca::data {

namespace {

constexpr std::uint64_t kExrateStream = 10;
constexpr std::uint64_t kPanelStream = 11;

// Means of the synthetic controls, on the scale of the provincial data.
const std::map<std::string, double> kControlMeans = {
    {"ln_population", 8.2}, {"ln_retail", 8.5},  {"vgdp", 7.5},     {"ln_government", 8.3},
    {"law", 8.0},           {"ln_first", 7.3},   {"ln_power", 7.6}, {"unemployment", 3.2}};

std::string province_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "P%02d", i + 1);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  auto require = [](bool ok, const std::string& key, const std::string& rule) {
    if (!ok) throw ConfigError("invalid " + key + ": must satisfy " + rule);
  };
  require(n_provinces >= 1, "n_provinces", ">= 1");
  require(last_year > first_year, "last_year", "> first_year");
  require(shock_year > first_year && shock_year <= last_year, "shock_year", "first_year < shock_year <= last_year");
  require(province_effect_sd >= 0.0, "province_effect_sd", ">= 0");
  require(error_sd >= 0.0, "error_sd", ">= 0");
  require(control_sd >= 0.0, "control_sd", ">= 0");
  require(exrate_mean > 0.0, "exrate_mean", "> 0");
  require(exrate_persistence > 0.0 && exrate_persistence < 1.0, "exrate_persistence", "0 < rho < 1");
  require(exrate_vol >= 0.0, "exrate_vol", ">= 0");
  require(exrate_policy_gamma >= 0.0, "exrate_policy_gamma", ">= 0");
  require(endogeneity >= -1.0 && endogeneity <= 1.0, "endogeneity", "-1 <= corr <= 1");
  require(exrate_idio_sd >= 0.0, "exrate_idio_sd", ">= 0");
  require(treat_share >= 0.0 && treat_share <= 1.0, "treat_share", "0 <= share <= 1");
  if (censor_lower && censor_upper) require(*censor_lower < *censor_upper, "censor_upper", "> censor_lower");
  for (const auto& [name, beta] : beta_controls) {
    require(kControlMeans.count(name) > 0, "beta_" + name, "name a known control");
    require(std::isfinite(beta), "beta_" + name, "finite");
  }
}

SynthConfig synth_config_from_kv(const KeyValues& kv) {
  SynthConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "n_provinces") c.n_provinces = static_cast<int>(kv_integer(key, value));
    else if (key == "first_year") c.first_year = static_cast<int>(kv_integer(key, value));
    else if (key == "last_year") c.last_year = static_cast<int>(kv_integer(key, value));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(kv_integer(key, value));
    else if (key == "intercept") c.intercept = kv_double(key, value);
    else if (key == "beta_exrate") c.beta_exrate = kv_double(key, value);
    else if (key == "beta_trend") c.beta_trend = kv_double(key, value);
    else if (key == "tau_did") c.tau_did = kv_double(key, value);
    else if (key == "province_effect_sd") c.province_effect_sd = kv_double(key, value);
    else if (key == "error_sd") c.error_sd = kv_double(key, value);
    else if (key == "control_sd") c.control_sd = kv_double(key, value);
    else if (key == "exrate_mean") c.exrate_mean = kv_double(key, value);
    else if (key == "exrate_persistence") c.exrate_persistence = kv_double(key, value);
    else if (key == "exrate_vol") c.exrate_vol = kv_double(key, value);
    else if (key == "exrate_policy_gamma") c.exrate_policy_gamma = kv_double(key, value);
    else if (key == "shock_year") c.shock_year = static_cast<int>(kv_integer(key, value));
    else if (key == "treat_threshold") c.treat_threshold = kv_double(key, value);
    else if (key == "endogeneity") c.endogeneity = kv_double(key, value);
    else if (key == "instrument_strength") c.instrument_strength = kv_double(key, value);
    else if (key == "exrate_idio_sd") c.exrate_idio_sd = kv_double(key, value);
    else if (key == "treat_share") c.treat_share = kv_double(key, value);
    else if (key == "treated_pretrend") c.treated_pretrend = kv_double(key, value);
    else if (key == "censor_lower") c.censor_lower = kv_double(key, value);
    else if (key == "censor_upper") c.censor_upper = kv_double(key, value);
    else if (key.rfind("beta_", 0) == 0 && kControlMeans.count(key.substr(5))) c.beta_controls[key.substr(5)] = kv_double(key, value);
    else throw ConfigError("unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

SynthResult synth_panel(const SynthConfig& config) {
  config.validate();
  const int n_years = config.last_year - config.first_year + 1;
  const int n_prov = config.n_provinces;

  model::SimParams fx;
  fx.total_time = n_years;
  fx.shock_time = config.shock_year - config.first_year;
  fx.persistence = config.exrate_persistence;
  fx.mean_log_rate = std::log(config.exrate_mean);
  fx.init_vol = config.exrate_vol;
  fx.policy_gamma = config.exrate_policy_gamma;
  const auto fx_path = model::simulate_path(fx, derive_seed(config.seed, kExrateStream));

  SynthTruth truth;
  truth.config = config;
  for (int t = 0; t < n_years; ++t) truth.national_exrate[config.first_year + t] = std::exp(fx_path.log_rates[t]);

  Engine engine = make_engine(config.seed, kPanelStream);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Year-level uncertainty indices, including the year before the sample so
  // the first year has a lagged instrument.
  std::vector<double> epu(n_years + 1), gpr(n_years + 1);
  for (int t = 0; t <= n_years; ++t) {
    epu[t] = 100.0 * std::exp(0.3 * normal(engine));
    gpr[t] = 100.0 * std::exp(0.3 * normal(engine));
  }

  const auto n_treated_group = static_cast<int>(std::lround(config.treat_share * n_prov));
  std::vector<std::string> control_names;
  for (const auto& [name, mean] : kControlMeans) control_names.push_back(name);

  struct Cell {
    double market_lag, market, tool_lag;
  };
  std::vector<std::vector<Cell>> cells(n_prov, std::vector<Cell>(n_years));
  std::vector<double> effects(n_prov);
  double tool_lag_sum = 0.0;
  for (int i = 0; i < n_prov; ++i) {
    effects[i] = config.province_effect_sd * normal(engine);
    truth.province_effects[province_id(i)] = effects[i];
    const double market_level = 6.0 + normal(engine);
    double market_prev = market_level + 0.3 * normal(engine);
    for (int t = 0; t < n_years; ++t) {
      const double market = market_level + 0.1 * t + 0.3 * normal(engine);
      const double tool_lag = market_prev * std::log(epu[t] * gpr[t]);
      cells[i][t] = {market_prev, market, tool_lag};
      tool_lag_sum += tool_lag;
      market_prev = market;
    }
  }
  const double tool_lag_mean = tool_lag_sum / static_cast<double>(n_prov * n_years);

  const auto n_rows = static_cast<std::size_t>(n_prov * n_years);
  std::vector<std::string> province;
  std::vector<int> year;
  province.reserve(n_rows);
  year.reserve(n_rows);
  std::map<std::string, std::vector<double>> cols;
  for (const auto* name : {"rca", "exrate", "market", "epu", "gpr", "group"}) cols[name].reserve(n_rows);
  for (const auto& name : control_names) cols[name].reserve(n_rows);

  const double corr = config.endogeneity;
  for (int i = 0; i < n_prov; ++i) {
    const bool in_group = i < n_treated_group;
    for (int t = 0; t < n_years; ++t) {
      const int y = config.first_year + t;
      double exrate = truth.national_exrate[y];
      double v = 0.0;
      if (config.exrate_idio_sd > 0.0) {
        v = config.exrate_idio_sd * normal(engine);
        exrate += config.instrument_strength * (cells[i][t].tool_lag - tool_lag_mean) + v;
      }
      const double w = normal(engine);
      double error = config.error_sd * w;
      if (config.exrate_idio_sd > 0.0)
        error = config.error_sd * (corr * v / config.exrate_idio_sd + std::sqrt(1.0 - corr * corr) * w);

      double outcome = config.intercept + effects[i] + config.beta_exrate * exrate +
                       config.beta_trend * (y - config.first_year) + error;
      for (const auto& name : control_names) {
        const double x = kControlMeans.at(name) + config.control_sd * normal(engine);
        cols[name].push_back(x);
        auto beta = config.beta_controls.find(name);
        if (beta != config.beta_controls.end()) outcome += beta->second * x;
      }
      const bool treated = config.treat_share > 0.0 ? in_group : exrate > config.treat_threshold;
      if (treated && y >= config.shock_year) outcome += config.tau_did;
      if (treated && y < config.shock_year) outcome += config.treated_pretrend * (y - (config.shock_year - 1));
      if (config.censor_lower) outcome = std::max(outcome, *config.censor_lower);
      if (config.censor_upper) outcome = std::min(outcome, *config.censor_upper);

      province.push_back(province_id(i));
      year.push_back(y);
      cols["rca"].push_back(outcome);
      cols["exrate"].push_back(exrate);
      cols["market"].push_back(cells[i][t].market);
      cols["epu"].push_back(epu[t + 1]);
      cols["gpr"].push_back(gpr[t + 1]);
      cols["group"].push_back(in_group ? 1.0 : 0.0);
    }
  }

  // Column order follows the documented panel schema.
  std::vector<PanelDataset::Column> columns;
  for (const auto& name : kRequiredColumns) columns.emplace_back(name, std::move(cols[name]));
  for (const auto& name : kInstrumentColumns) columns.emplace_back(name, std::move(cols[name]));
  if (config.treat_share > 0.0) columns.emplace_back("group", std::move(cols["group"]));

  truth.coefficients["_cons"] = config.intercept;
  truth.coefficients["exrate"] = config.beta_exrate;
  truth.coefficients["year"] = config.beta_trend;
  for (const auto& [name, beta] : config.beta_controls) truth.coefficients[name] = beta;
  truth.coefficients["treat_post"] = config.tau_did;

  return {PanelDataset(std::move(province), std::move(year), std::move(columns)), std::move(truth)};
}

std::string truth_to_json(const SynthTruth& truth) {
  const auto& c = truth.config;
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["n_provinces"] = c.n_provinces;
  j["first_year"] = c.first_year;
  j["last_year"] = c.last_year;
  j["coefficients"] = truth.coefficients;
  j["tau_did"] = c.tau_did;
  j["province_effect_sd"] = c.province_effect_sd;
  j["error_sd"] = c.error_sd;
  j["control_sd"] = c.control_sd;
  j["exrate"] = {{"mean", c.exrate_mean},
                 {"persistence", c.exrate_persistence},
                 {"vol", c.exrate_vol},
                 {"policy_gamma", c.exrate_policy_gamma},
                 {"idio_sd", c.exrate_idio_sd}};
  j["shock_year"] = c.shock_year;
  j["treat_threshold"] = c.treat_threshold;
  j["endogeneity"] = c.endogeneity;
  j["instrument_strength"] = c.instrument_strength;
  j["treat_share"] = c.treat_share;
  j["treated_pretrend"] = c.treated_pretrend;
  j["censor_lower"] = c.censor_lower ? nlohmann::ordered_json(*c.censor_lower) : nlohmann::ordered_json(nullptr);
  j["censor_upper"] = c.censor_upper ? nlohmann::ordered_json(*c.censor_upper) : nlohmann::ordered_json(nullptr);
  j["province_effects"] = truth.province_effects;
  nlohmann::ordered_json fx = nlohmann::ordered_json::object();
  for (const auto& [year, rate] : truth.national_exrate) fx[std::to_string(year)] = rate;
  j["national_exrate"] = fx;
  return j.dump(2) + "\n";
}

}  // namespace fxrca::data
