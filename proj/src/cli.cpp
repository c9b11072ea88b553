#include "fxrca/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fxrca/csv.hpp"
#include "fxrca/did.hpp"
#include "fxrca/error.hpp"
#include "fxrca/exports.hpp"
#include "fxrca/iv.hpp"
#include "fxrca/kv_config.hpp"
#include "fxrca/model.hpp"
#include "fxrca/montecarlo.hpp"
#include "fxrca/panel.hpp"
#include "fxrca/placebo.hpp"
#include "fxrca/regression.hpp"
#include "fxrca/report.hpp"
#include "fxrca/stats.hpp"
#include "fxrca/svg.hpp"
#include "fxrca/synth.hpp"
#include "fxrca/tobit.hpp"

namespace fxrca::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20150811;

struct Options {
  std::string config;
  std::string panel;
  std::string exports;
  std::string world = "WORLD";
  std::string manifest;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  bool seed_set = false;
  int replications = 1;
  double threshold = 0.0;
  bool threshold_set = false;
  std::string window;
  int shock = 2016;
  int draws = 500;
  std::string se = "homoskedastic";
  double lower = 0.0;
  double upper = 2.0;
  std::string models = "ols,fe,lag,tobit,split";
  std::string group;
  std::string target = "exrate";
  bool svg = false;
};

struct Run {
  std::string subcommand;
  std::vector<std::string> args;
  Options opt;
  std::vector<std::string> inputs;
  std::vector<std::string> written;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path out_dir(const Run& run) {
  if (run.opt.out.empty()) throw ConfigError("--out is required");
  fs::path dir(run.opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void emit(Run& run, const std::string& name, const std::string& content) {
  write_file_atomic(out_dir(run) / name, content);
  run.written.push_back(name);
}

void write_manifest(Run& run) {
  json m;
  m["subcommand"] = run.subcommand;
  m["args"] = run.args;
  m["config"] = run.opt.config.empty() ? json(nullptr) : json(run.opt.config);
  m["inputs"] = run.inputs;
  m["output_dir"] = run.opt.out;
  m["seed"] = run.opt.seed;
  m["version"] = kVersion;
  m["timestamp"] = timestamp_utc();
  m["outputs"] = run.written;
  write_file_atomic(out_dir(run) / "manifest.json", m.dump(2) + "\n");
}

data::PanelDataset load_panel(Run& run) {
  if (run.opt.panel.empty()) throw ConfigError("--panel is required");
  run.inputs.push_back(run.opt.panel);
  return data::load_panel_csv(run.opt.panel);
}

econ::SeType se_type(const Run& run) { return econ::parse_se_type(run.opt.se); }

std::optional<std::string> cluster_key(const Run& run) {
  return se_type(run) == econ::SeType::cluster ? std::optional<std::string>("province") : std::nullopt;
}

data::DidSpec did_spec(const Run& run) {
  data::DidSpec d;
  d.shock_year = run.opt.shock;
  if (run.opt.threshold_set) d.treat_threshold = run.opt.threshold;
  if (!run.opt.window.empty()) {
    const auto colon = run.opt.window.find(':');
    if (colon == std::string::npos) throw ConfigError("--window expects Y1:Y2, got '" + run.opt.window + "'");
    d.window_start = static_cast<int>(kv_integer("--window", run.opt.window.substr(0, colon)));
    d.window_end = static_cast<int>(kv_integer("--window", run.opt.window.substr(colon + 1)));
  }
  if (!run.opt.group.empty()) d.group_column = run.opt.group;
  d.validate();
  return d;
}

econ::ModelSpec benchmark_spec(const Run& run, bool fixed_effect) {
  econ::ModelSpec s;
  s.outcome = "rca";
  s.regressors = {"exrate"};
  s.regressors.insert(s.regressors.end(), data::kControlColumns.begin(), data::kControlColumns.end());
  s.time_trend = true;
  if (fixed_effect) s.fixed_effect = "province";
  s.se_type = se_type(run);
  s.cluster = cluster_key(run);
  return s;
}

econ::ModelSpec did_model(const Run& run) {
  auto s = benchmark_spec(run, true);
  s.regressors.erase(s.regressors.begin());  // the DID equation drops exrate
  return s;
}

void print_fit(Run& run, const std::string& label, const econ::RegressionFit& fit) {
  auto& os = *run.out;
  os << label << ": n=" << fit.n_obs;
  if (fit.r_squared_kind != "none") os << " " << fit.r_squared_kind << "_R2=" << format_double(fit.r_squared);
  if (fit.log_likelihood) os << " loglik=" << format_double(*fit.log_likelihood);
  if (fit.extra.count("n_left"))
    os << " censored_left=" << fit.extra.at("n_left") << " censored_right=" << fit.extra.at("n_right")
       << " uncensored=" << fit.extra.at("n_uncensored");
  if (!fit.converged) os << " (not converged)";
  os << "\n";
  for (const auto& w : fit.warnings) os << "  warning: " << w << "\n";
}

void emit_fit(Run& run, const std::string& stem, const econ::RegressionFit& fit) {
  emit(run, stem + ".csv", report::fit_csv(fit));
  emit(run, stem + ".json", report::fit_json(fit));
}

// ---- simulate -------------------------------------------------------------

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c"};

void cmd_simulate(Run& run) {
  model::SimParams params;
  if (!run.opt.config.empty()) {
    run.inputs.push_back(run.opt.config);
    params = model::load_params(run.opt.config);
  }
  if (run.opt.replications < 1) throw ConfigError("--replications must be positive");

  std::ostringstream summary;
  const bool with_se = run.opt.replications > 1;
  summary << "scenario,segment,mean_s,var_s,mean_rca,var_rca";
  if (with_se) summary << ",se_mean_s,se_var_s,se_mean_rca,se_var_rca,replications";
  summary << "\n";

  svg::Chart rates{"Log exchange rate by scenario", "t", "s_t", {}, static_cast<double>(params.shock_time)};
  svg::Chart vols{"Shock volatility", "t", "sigma_st", {}, static_cast<double>(params.shock_time)};

  int k = 0;
  for (auto scenario : montecarlo::kAllScenarios) {
    montecarlo::ScenarioSpec spec;
    spec.params = params;
    spec.scenario = scenario;
    spec.seed = run.opt.seed;
    spec.replications = run.opt.replications;
    const auto result = montecarlo::run_scenario(spec);
    const std::string label(1, montecarlo::scenario_label(scenario));

    std::ostringstream series;
    series << "t,zeta,sigma_st,s_t,log_rca,rca\n";
    const auto& path = result.path;
    for (std::size_t t = 0; t < path.log_rates.size(); ++t)
      series << t << ',' << path.policy[t] << ',' << format_double(path.vols[t]) << ','
             << format_double(path.log_rates[t]) << ',' << format_double(result.rca_series[t].log_rca) << ','
             << format_double(result.rca_series[t].rca) << '\n';
    emit(run, "series_" + label + ".csv", series.str());

    const auto& mean = result.aggregate.mean;
    const auto& se = result.aggregate.se;
    for (int seg = 0; seg < 2; ++seg) {
      const bool pre = seg == 0;
      summary << label << ',' << (pre ? "pre" : "post") << ','
              << format_double(pre ? mean.s.pre_mean : mean.s.post_mean) << ','
              << format_double(pre ? mean.s.pre_var : mean.s.post_var) << ','
              << format_double(pre ? mean.rca.pre_mean : mean.rca.post_mean) << ','
              << format_double(pre ? mean.rca.pre_var : mean.rca.post_var);
      if (with_se)
        summary << ',' << format_double(pre ? se.s.pre_mean : se.s.post_mean) << ','
                << format_double(pre ? se.s.pre_var : se.s.post_var) << ','
                << format_double(pre ? se.rca.pre_mean : se.rca.post_mean) << ','
                << format_double(pre ? se.rca.pre_var : se.rca.post_var) << ',' << result.aggregate.replications;
      summary << '\n';
    }

    for (const auto* d : {&result.pre_density, &result.post_density}) {
      std::ostringstream os;
      stats::write_density_csv(os, *d);
      emit(run, "density_" + label + (d == &result.pre_density ? "_pre.csv" : "_post.csv"), os.str());
    }

    if (run.opt.svg) {
      std::vector<double> t(path.log_rates.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
      rates.series.push_back({"scenario " + label, t, path.log_rates, kColors[k]});
      if (k == 0) {
        std::vector<double> sig(path.vols.begin(), path.vols.end());
        vols.series.push_back({"sigma_st", t, sig, kColors[0]});
      }
      std::vector<double> rca(t.size()), lo(t.size()), hi(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        rca[i] = result.rca_series[i].rca;
        lo[i] = result.band[i].first;
        hi[i] = result.band[i].second;
      }
      svg::Chart c{"RCA_t, scenario " + label, "t", "RCA_t", {}, static_cast<double>(params.shock_time)};
      c.series.push_back({"RCA_t", t, rca, kColors[k]});
      c.series.push_back({"95% band (pre)", t, lo, "#555555", true});
      c.series.push_back({"", t, hi, "#555555", true});
      emit(run, "fig_c_" + label + ".svg", svg::render(c));
      svg::Chart d{"Density of RCA_t, scenario " + label, "RCA_t", "density", {}, std::nullopt};
      d.series.push_back({"before shock", result.pre_density.grid, result.pre_density.density, "#1f77b4"});
      d.series.push_back({"after shock", result.post_density.grid, result.post_density.density, "#d62728", true});
      emit(run, "fig_d_" + label + ".svg", svg::render(d));
    }
    *run.out << "scenario " << label << ": pre mean rca " << format_double(mean.rca.pre_mean) << ", post mean rca "
             << format_double(mean.rca.post_mean) << ", pre var " << format_double(mean.rca.pre_var)
             << ", post var " << format_double(mean.rca.post_var) << "\n";
    ++k;
  }
  emit(run, "summary.csv", summary.str());
  if (run.opt.svg) {
    emit(run, "fig_a_rates.svg", svg::render(rates));
    emit(run, "fig_b_volatility.svg", svg::render(vols));
  }
}

// ---- estimate -------------------------------------------------------------

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void cmd_estimate(Run& run) {
  auto panel = data::add_exrate_derivatives(load_panel(run));
  const double threshold = run.opt.threshold_set ? run.opt.threshold : 0.2;
  std::vector<std::pair<std::string, std::unique_ptr<econ::RegressionFit>>> fits;
  auto add = [&](const std::string& label, econ::RegressionFit fit) {
    print_fit(run, label, fit);
    fits.emplace_back(label, std::make_unique<econ::RegressionFit>(std::move(fit)));
  };

  for (const auto& model : split_list(run.opt.models)) {
    if (model == "ols") {
      add("ols", econ::pooled_ols(panel, benchmark_spec(run, false)));
    } else if (model == "fe") {
      add("fe", econ::within_fe(panel, benchmark_spec(run, true)));
    } else if (model == "lag") {
      auto spec = benchmark_spec(run, true);
      spec.regressors.front() = "l_exrate";
      add("lag", econ::within_fe(panel, spec));
    } else if (model == "tobit") {
      econ::TobitOptions t;
      t.lower = run.opt.lower;
      t.upper = run.opt.upper;
      auto spec = benchmark_spec(run, true);
      add("tobit", econ::tobit_panel(panel, spec, t));
    } else if (model == "split") {
      const auto [below, above] = data::split_by_threshold(panel, "d_exrate", threshold);
      *run.out << "split at d_exrate=" << format_double(threshold) << ": " << below.rows() << " rows below, "
               << above.rows() << " rows above\n";
      add("d_exrate<=" + format_double(threshold), econ::within_fe(below, benchmark_spec(run, true)));
      add("d_exrate>" + format_double(threshold), econ::within_fe(above, benchmark_spec(run, true)));
    } else {
      throw ConfigError("unknown model '" + model + "' (expected ols, fe, lag, tobit or split)");
    }
  }
  if (fits.empty()) throw ConfigError("--model selected no estimator");

  std::vector<report::LabelledFit> table;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    table.emplace_back(fits[i].first, fits[i].second.get());
    emit_fit(run, "fit_" + std::to_string(i + 1), *fits[i].second);
  }
  emit(run, "table.csv", report::comparison_csv(table));
}

// ---- iv / did / event / placebo -------------------------------------------

void cmd_iv(Run& run) {
  econ::IvPanelSpec spec;
  spec.se_type = se_type(run);
  spec.cluster = cluster_key(run);
  const auto result = econ::iv_panel(load_panel(run), spec);
  print_fit(run, "first stage", result.diagnostics.first_stage);
  print_fit(run, "second stage", result.second_stage);
  const auto& d = result.diagnostics;
  *run.out << "Anderson canon. corr. LM " << format_double(d.anderson_lm) << " (p=" << format_double(d.anderson_p)
           << ")\nKleibergen-Paap rk LM " << format_double(d.kp_rk_lm) << " (p=" << format_double(d.kp_rk_lm_p)
           << ")\nCragg-Donald Wald F " << format_double(d.cragg_donald_f) << "\nKleibergen-Paap Wald rk F "
           << format_double(d.kp_wald_rk_f) << (d.capped ? "\n(statistics capped)" : "") << "\n";
  emit_fit(run, "first_stage", result.diagnostics.first_stage);
  emit_fit(run, "second_stage", result.second_stage);
  emit(run, "iv_diagnostics.csv", report::iv_diagnostics_csv(d));
  emit(run, "iv.json", report::iv_json(result));
  emit(run, "table.csv",
       report::comparison_csv({{"first_stage", &result.diagnostics.first_stage}, {"second_stage", &result.second_stage}}));
}

void cmd_did(Run& run) {
  const auto fit = econ::did_estimate(load_panel(run), did_spec(run), did_model(run));
  print_fit(run, "did", fit);
  const auto& t = fit.term("treat_post");
  *run.out << "treat_post " << format_double(t.estimate) << " (se " << format_double(t.std_error) << ", p "
           << format_double(t.p_value) << ")\n";
  emit_fit(run, "did", fit);
}

void cmd_event(Run& run) {
  const auto es = econ::event_study(load_panel(run), did_spec(run), did_model(run));
  print_fit(run, "event study", es.fit);
  emit(run, "event.csv", report::event_csv(es));
  emit_fit(run, "event_fit", es.fit);
  if (run.opt.svg) {
    svg::Chart c{"Dynamic effects", "relative year", "coefficient", {}, -0.5};
    std::vector<double> x, y, lo, hi;
    for (const auto& p : es.points) {
      x.push_back(p.relative_year);
      y.push_back(p.estimate);
      lo.push_back(p.ci_low);
      hi.push_back(p.ci_high);
    }
    c.series = {{"estimate", x, y, kColors[0]}, {"95% CI", x, lo, "#555555", true}, {"", x, hi, "#555555", true}};
    emit(run, "event.svg", svg::render(c));
  }
}

void cmd_placebo(Run& run) {
  auto panel = load_panel(run);
  if (run.opt.draws < 1) throw ConfigError("--draws must be positive");
  econ::PlaceboSetup setup;
  if (run.opt.target == "exrate") {
    const auto spec = benchmark_spec(run, true);
    setup.permuted_column = "exrate";
    setup.coefficient = "exrate";
    setup.estimator = [spec](const data::PanelDataset& p) { return econ::within_fe(p, spec); };
  } else if (run.opt.target == "did") {
    const auto did = did_spec(run);
    const auto spec = did_model(run);
    panel = data::assign_treat_post(panel, did);
    setup.permuted_column = "treat";
    setup.coefficient = "treat_post";
    setup.estimator = [did, spec](const data::PanelDataset& p) { return econ::did_estimate_prepared(p, did, spec); };
  } else {
    throw ConfigError("unknown placebo target '" + run.opt.target + "' (expected exrate or did)");
  }
  const auto result = econ::placebo_permutation(panel, setup, run.opt.draws, run.opt.seed);
  const auto m = stats::moments(result.coefficients);
  const auto ks = stats::ks_uniform(result.p_values);
  *run.out << "placebo draws " << result.coefficients.size() << ": mean coefficient " << format_double(m.mean)
           << " (sd " << format_double(m.sd) << "), observed " << format_double(result.observed_coefficient)
           << ", permutation p " << format_double(result.permutation_p_value) << "\n";
  emit(run, "placebo_coefficients.csv", report::placebo_csv(result));
  std::ostringstream dens;
  stats::write_density_csv(dens, stats::kde_auto(result.coefficients));
  emit(run, "placebo_density.csv", dens.str());
  json j;
  j["target"] = run.opt.target;
  j["coefficient"] = setup.coefficient;
  j["draws"] = result.coefficients.size();
  j["seed"] = result.seed;
  j["observed_coefficient"] = result.observed_coefficient;
  j["observed_p_value"] = result.observed_p;
  j["permutation_p_value"] = result.permutation_p_value;
  j["mean_coefficient"] = m.mean;
  j["sd_coefficient"] = m.sd;
  j["ks_uniform_statistic"] = ks.statistic;
  j["ks_uniform_p_value"] = ks.p_value;
  emit(run, "placebo.json", j.dump(2) + "\n");
}

// ---- rca / synth ----------------------------------------------------------

int cmd_rca(Run& run) {
  if (run.opt.exports.empty()) throw ConfigError("--exports is required");
  run.inputs.push_back(run.opt.exports);
  const auto table = data::load_export_csv(run.opt.exports, run.opt.world);
  std::ostringstream os;
  os << "region,industry,year,rca,band\n";
  int failures = 0;
  for (const auto& cell : data::rca_all(table)) {
    os << csv_field(cell.region) << ',' << csv_field(cell.industry) << ',' << cell.year << ',';
    if (cell.rca) {
      os << format_double(*cell.rca) << ',' << (*cell.rca > 0.0 ? data::to_string(data::classify_rca(*cell.rca)) : "none");
    } else {
      os << ',';
      ++failures;
      *run.err << "error: " << cell.error << "\n";
    }
    os << '\n';
  }
  emit(run, "rca.csv", os.str());
  return failures > 0 ? 3 : 0;
}

void cmd_synth(Run& run) {
  data::SynthConfig config;
  if (!run.opt.config.empty()) {
    run.inputs.push_back(run.opt.config);
    config = data::synth_config_from_kv(read_kv_file(run.opt.config));
  }
  if (run.opt.seed_set) config.seed = run.opt.seed;
  run.opt.seed = config.seed;
  const auto result = data::synth_panel(config);
  std::ostringstream os;
  data::write_panel_csv(os, result.panel);
  emit(run, "panel.csv", os.str());
  emit(run, "truth.json", data::truth_to_json(result.truth));
  *run.out << "synthetic panel: " << result.panel.rows() << " rows, " << result.panel.distinct_provinces().size()
           << " provinces\n";
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output directory")->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Run r;
  r.args = args;
  r.out = &out;
  r.err = &err;
  Options& o = r.opt;

  CLI::App app{"Exchange-rate volatility and export competitiveness toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto seed_opt = [&](CLI::App* s) {
    s->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { o.seed = v; o.seed_set = true; }, "Master seed");
  };
  auto se_opt = [&](CLI::App* s) {
    s->add_option("--se", o.se, "Standard errors")->check(CLI::IsMember({"homoskedastic", "cluster"}));
  };
  auto did_opts = [&](CLI::App* s) {
    s->add_option("--window", o.window, "DID window Y1:Y2");
    s->add_option("--shock", o.shock, "Shock year");
    s->add_option_function<double>(
        "--threshold", [&](const double& v) { o.threshold = v; o.threshold_set = true; }, "Treat threshold");
    s->add_option("--group", o.group, "0/1 column defining the treated group");
  };

  auto* sim = app.add_subcommand("simulate", "Run the L/M/H exchange-rate scenarios");
  sim->add_option("--config", o.config, "Parameter file (key = value)");
  seed_opt(sim);
  sim->add_option("--replications", o.replications, "Paths per scenario");
  sim->add_flag("--svg", o.svg, "Also write SVG charts");
  add_common(sim, o);

  auto* est = app.add_subcommand("estimate", "Benchmark regressions");
  est->add_option("--panel", o.panel, "Panel CSV")->required();
  est->add_option("--model", o.models, "Comma list of ols, fe, lag, tobit, split");
  est->add_option_function<double>(
      "--threshold", [&](const double& v) { o.threshold = v; o.threshold_set = true; }, "Split threshold");
  est->add_option("--lower", o.lower, "Tobit lower limit");
  est->add_option("--upper", o.upper, "Tobit upper limit");
  se_opt(est);
  add_common(est, o);

  auto* iv = app.add_subcommand("iv", "Two-stage least squares with instrument diagnostics");
  iv->add_option("--panel", o.panel, "Panel CSV")->required();
  se_opt(iv);
  add_common(iv, o);

  auto* did = app.add_subcommand("did", "Difference-in-differences");
  did->add_option("--panel", o.panel, "Panel CSV")->required();
  did_opts(did);
  se_opt(did);
  add_common(did, o);

  auto* ev = app.add_subcommand("event", "Event study");
  ev->add_option("--panel", o.panel, "Panel CSV")->required();
  did_opts(ev);
  se_opt(ev);
  ev->add_flag("--svg", o.svg, "Also write an SVG chart");
  add_common(ev, o);

  auto* pl = app.add_subcommand("placebo", "Year-block permutation placebo");
  pl->add_option("--panel", o.panel, "Panel CSV")->required();
  pl->add_option("--draws", o.draws, "Permutation draws");
  pl->add_option("--target", o.target, "exrate or did")->check(CLI::IsMember({"exrate", "did"}));
  seed_opt(pl);
  did_opts(pl);
  se_opt(pl);
  add_common(pl, o);

  auto* rca = app.add_subcommand("rca", "RCA index from an export table");
  rca->add_option("--exports", o.exports, "Export CSV")->required();
  rca->add_option("--world", o.world, "Name of the world region");
  add_common(rca, o);

  auto* syn = app.add_subcommand("synth", "Synthetic panel with known parameters");
  syn->add_option("--config", o.config, "Generator config (key = value)");
  seed_opt(syn);
  add_common(syn, o);

  auto* rep = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  rep->add_option("--manifest", o.manifest, "manifest.json")->required();
  rep->add_option("--out", o.out, "Override the output directory");

  std::vector<std::string> argv_store{"fxrca"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rep->parsed()) {
      std::ifstream in(o.manifest);
      if (!in) throw ConfigError("cannot open manifest " + o.manifest);
      json m;
      try {
        m = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("manifest " + o.manifest + " is not valid JSON: " + e.what());
      }
      auto recorded = m.at("args").get<std::vector<std::string>>();
      if (!recorded.empty() && recorded.front() == "replay") throw ConfigError("manifest records a replay");
      if (!o.out.empty()) {
        for (std::size_t i = 0; i + 1 < recorded.size(); ++i)
          if (recorded[i] == "--out") recorded[i + 1] = o.out;
      }
      return run(recorded, out, err);
    }

    int code = 0;
    for (auto* s : app.get_subcommands()) r.subcommand = s->get_name();
    if (sim->parsed()) cmd_simulate(r);
    else if (est->parsed()) cmd_estimate(r);
    else if (iv->parsed()) cmd_iv(r);
    else if (did->parsed()) cmd_did(r);
    else if (ev->parsed()) cmd_event(r);
    else if (pl->parsed()) cmd_placebo(r);
    else if (rca->parsed()) code = cmd_rca(r);
    else if (syn->parsed()) cmd_synth(r);
    write_manifest(r);
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const EstimationError& e) {
    err << "estimation error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fxrca::cli
