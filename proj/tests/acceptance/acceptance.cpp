// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fxrca/cli.hpp"
#include "fxrca/did.hpp"
#include "fxrca/exports.hpp"
#include "fxrca/iv.hpp"
#include "fxrca/model.hpp"
#include "fxrca/montecarlo.hpp"
#include "fxrca/placebo.hpp"
#include "fxrca/regression.hpp"
#include "fxrca/stats.hpp"
#include "fxrca/synth.hpp"
#include "fxrca/tobit.hpp"

namespace fs = std::filesystem;
using namespace fxrca;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double fraction(int hits, int total) { return static_cast<double>(hits) / total; }

// ---------------------------------------------------------------- 1
Outcome simulation_moments() {
  const auto t0 = Clock::now();
  model::SimParams p;
  p.total_time = 200000;
  p.shock_time = 100000;
  const auto path = model::simulate_path(p, 20150811);
  const auto s = montecarlo::summarize_pre_post(path.log_rates, p.shock_time);
  const double elapsed = seconds_since(t0);

  const double sd_oracle = std::sqrt(0.05 * 0.05 / (1.0 - 0.89 * 0.89));
  const double sd_err = std::abs(std::sqrt(s.pre_var) / sd_oracle - 1.0);
  const double ratio = s.post_var / s.pre_var;
  const double ratio_err = std::abs(ratio / std::exp(-4.0) - 1.0);
  Outcome o;
  o.pass = sd_err < 0.05 && ratio_err < 0.20 && elapsed < 10.0;
  o.detail = "pre sd " + fmt("%.5f", std::sqrt(s.pre_var)) + " (oracle 0.10966, rel err " + fmt("%.4f", sd_err) +
             "), var ratio " + fmt("%.5f", ratio) + " (oracle 0.01832, rel err " + fmt("%.4f", ratio_err) + "), " +
             fmt("%.2f", elapsed) + " s";
  return o;
}

// ---------------------------------------------------------------- 2
Outcome scenario_ordering() {
  double worst_spacing = 0.0;
  bool var_ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<double> means;
    for (auto sc : montecarlo::kAllScenarios) {
      montecarlo::ScenarioSpec spec;
      spec.scenario = sc;
      spec.seed = seed;
      const auto r = montecarlo::run_scenario(spec);
      std::vector<double> lr;
      for (const auto& pt : r.rca_series) lr.push_back(pt.log_rca);
      means.push_back(stats::mean(lr));
      var_ok = var_ok && r.summary.rca.post_var < r.summary.rca.pre_var;
    }
    for (std::size_t k = 1; k < means.size(); ++k)
      worst_spacing = std::max(worst_spacing, std::abs(means[k] - means[k - 1] - 0.6));
  }
  Outcome o;
  o.pass = worst_spacing <= 0.05 && var_ok;
  o.detail = "max |spacing - 0.6| = " + fmt("%.2e", worst_spacing) + " over 20 seeds; post var < pre var in all: " +
             (var_ok ? "yes" : "no");
  return o;
}

// ---------------------------------------------------------------- 3
Outcome convergence() {
  // Long pre-shock segment so the pre mean is pinned down; growing post horizons.
  const std::size_t n_pre = 1000000;
  const std::vector<std::size_t> horizons{1000, 5000, 20000};
  model::SimParams p;
  p.shock_time = static_cast<int>(n_pre);
  p.total_time = static_cast<int>(n_pre + horizons.back());
  const auto series = montecarlo::simulate_scenario_series(p, 20150811, 200);
  std::vector<double> level, logs;
  for (const auto& pt : series.rca_series) {
    level.push_back(pt.rca);
    logs.push_back(pt.log_rca);
  }
  auto check = [&](const std::vector<double>& v, bool& ok) {
    const std::vector<double> pre(v.begin(), v.begin() + static_cast<long>(n_pre));
    const double pre_mean = stats::mean(pre), pre_sd = std::sqrt(stats::sample_variance(pre));
    std::string out;
    for (std::size_t n_post : horizons) {
      const std::vector<double> post(v.begin() + static_cast<long>(n_pre), v.begin() + static_cast<long>(n_pre + n_post));
      const double gap = std::abs(stats::mean(post) - pre_mean);
      const double bound = 2.0 * pre_sd / std::sqrt(static_cast<double>(n_post));
      ok = ok && gap < bound;
      out += " n_post=" + std::to_string(n_post) + " gap " + fmt("%.5f", gap) + " bound " + fmt("%.5f", bound) + ";";
    }
    return out;
  };
  Outcome o;
  o.pass = true;
  o.detail = "rca:" + check(level, o.pass);
  // Lognormal mean shift implied by the variance drop of log RCA.
  const auto m = montecarlo::stationary_moments(p);
  const double jensen = std::exp(m.mean_log_rca) *
                        (std::exp(m.var_log_rca_pre / 2.0) - std::exp(m.var_log_rca_post / 2.0));
  bool log_ok = true;
  o.detail += " analytic rca gap " + fmt("%.5f", jensen) + "; log_rca (info):" + check(logs, log_ok) +
              (log_ok ? " within bound" : " outside bound");
  return o;
}

// ---------------------------------------------------------------- 4
Outcome estimator_oracles() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::string detail;
  bool pass = true;

  // Within = LSDV.
  {
    std::vector<std::string> prov;
    std::vector<int> year;
    std::vector<double> y, x;
    for (int i = 0; i < 8; ++i) {
      const double a = g(rng);
      for (int t = 0; t < 5 + i % 2; ++t) {
        prov.push_back("G" + std::to_string(i));
        year.push_back(2000 + t);
        x.push_back(g(rng) + a);
        y.push_back(a + 0.4 * x.back() + 0.1 * g(rng));
      }
    }
    const data::PanelDataset p(prov, year, {{"rca", y}, {"x", x}});
    econ::ModelSpec spec;
    spec.regressors = {"x"};
    spec.fixed_effect = "province";
    const auto fe = econ::within_fe(p, spec);
    const auto groups = econ::group_ids(p, "province");
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), 9);
    for (std::size_t i = 0; i < y.size(); ++i) {
      X(static_cast<Eigen::Index>(i), 0) = x[i];
      X(static_cast<Eigen::Index>(i), 1 + groups[i]) = 1.0;
    }
    const Eigen::VectorXd b = X.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()));
    const double err = std::abs(fe.coef("x") - b(0));
    pass = pass && err < 1e-8;
    detail += "FE-LSDV " + fmt("%.1e", err);
  }

  // 2SLS oracles.
  const int n = 300;
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, 1), z(n, 1), w(n, 1);
  for (int i = 0; i < n; ++i) {
    const double u = g(rng);
    z(i, 0) = g(rng);
    w(i, 0) = 1.0;
    x(i, 0) = 0.7 * z(i, 0) + g(rng) + 0.5 * u;
    y(i) = 1.0 + 0.3 * x(i, 0) + u;
  }
  {
    const auto iv = econ::two_sls(y, x, x, w, "x", {"x_iv"}, {"_cons"});
    Eigen::MatrixXd X(n, 2);
    X << x, w;
    const auto o = econ::ols(y, X, {"x", "_cons"});
    const double err = std::max(std::abs(iv.second_stage.coef("x") - o.coef("x")),
                                std::abs(iv.second_stage.coef("_cons") - o.coef("_cons")));
    pass = pass && err < 1e-10;
    detail += ", 2SLS(self)-OLS " + fmt("%.1e", err);
  }
  {
    const auto iv = econ::two_sls(y, x, z, w, "x", {"z"}, {"_cons"});
    Eigen::MatrixXd X(n, 2), Z(n, 2);
    X << x, w;
    Z << z, w;
    const Eigen::VectorXd b = (Z.transpose() * X).lu().solve(Z.transpose() * y);
    const double err = std::max(std::abs(iv.second_stage.coef("x") - b(0)), std::abs(iv.second_stage.coef("_cons") - b(1)));
    pass = pass && err < 1e-10;
    detail += ", 2SLS-closed form " + fmt("%.1e", err);
  }

  // Tobit.
  {
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd yy(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = g(rng);
      X(i, 1) = 1.0;
      yy(i) = 0.5 + 0.8 * X(i, 0) + 0.5 * g(rng);
    }
    const auto t = econ::tobit_mle(yy, X, {"x", "_cons"}, {-1e9, 1e9, 200, 1e-8});
    const auto o = econ::ols(yy, X, {"x", "_cons"});
    const double err = std::max(std::abs(t.coef("x") - o.coef("x")) / std::abs(o.coef("x")),
                                std::abs(t.coef("_cons") - o.coef("_cons")) / std::abs(o.coef("_cons")));
    pass = pass && err < 1e-4;
    detail += ", Tobit-OLS " + fmt("%.1e", err);

    for (int i = 0; i < n; ++i) yy(i) = std::clamp(yy(i), 0.0, 1.2);
    const econ::TobitObjective f(yy, X, 0.0, 1.2);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      Eigen::VectorXd th(3);
      th << 0.8 + 0.2 * g(rng), 0.5 + 0.2 * g(rng), std::log(0.5) + 0.2 * g(rng);
      const Eigen::VectorXd grad = f.gradient(th);
      for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd up = th, dn = th;
        const double h = 1e-5;
        up(j) += h;
        dn(j) -= h;
        const double fd = (f.value(up) - f.value(dn)) / (2 * h);
        worst = std::max(worst, std::abs(grad(j) - fd) / std::max(1.0, std::abs(fd)));
      }
    }
    pass = pass && worst < 1e-6;
    detail += ", Tobit grad-FD " + fmt("%.1e", worst);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 5
econ::ModelSpec benchmark_spec(bool fe) {
  econ::ModelSpec spec;
  spec.regressors = {"exrate"};
  spec.regressors.insert(spec.regressors.end(), data::kControlColumns.begin(), data::kControlColumns.end());
  spec.time_trend = true;
  if (fe) spec.fixed_effect = "province";
  return spec;
}

econ::ModelSpec controls_fe_spec() {
  econ::ModelSpec spec;
  spec.regressors = data::kControlColumns;
  spec.fixed_effect = "province";
  spec.time_trend = true;
  return spec;
}

data::SynthConfig group_config(std::uint64_t seed) {
  data::SynthConfig c;
  c.seed = seed;
  c.beta_exrate = 0.0;
  c.treat_share = 0.5;
  return c;
}

Outcome recovery_coverage() {
  const auto t0 = Clock::now();
  const int seeds = 200;
  int ols_hit = 0, fe_hit = 0, iv_hit = 0, did_hit = 0;
  std::vector<double> ols_bias_se;
  double iv_sum = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    {
      data::SynthConfig c;
      c.seed = seed;
      c.tau_did = 0.0;
      const auto syn = data::synth_panel(c);
      const auto ols = econ::fit_linear(syn.panel, benchmark_spec(false));
      const auto fe = econ::fit_linear(syn.panel, benchmark_spec(true));
      ols_hit += std::abs(ols.coef("exrate") - c.beta_exrate) <= 2.0 * ols.se("exrate");
      fe_hit += std::abs(fe.coef("exrate") - c.beta_exrate) <= 2.0 * fe.se("exrate");
    }
    {
      data::SynthConfig c;
      c.seed = seed;
      c.tau_did = 0.0;
      c.beta_exrate = 0.1;
      c.endogeneity = 0.9;
      c.exrate_idio_sd = 0.2;
      c.instrument_strength = 0.05;
      const auto syn = data::synth_panel(c);
      const auto iv = econ::iv_panel(syn.panel, econ::IvPanelSpec{});
      const double b = iv.second_stage.coef("exrate");
      iv_sum += b;
      iv_hit += std::abs(b - 0.1) <= 2.0 * iv.second_stage.se("exrate");
      const auto fe = econ::fit_linear(data::build_instrument(syn.panel).filter([&](std::size_t i) {
        return syn.panel.years()[i] > c.first_year;
      }), benchmark_spec(true));
      ols_bias_se.push_back(std::abs(fe.coef("exrate") - 0.1) / fe.se("exrate"));
    }
    {
      const auto syn = data::synth_panel(group_config(seed));
      data::DidSpec did;
      did.group_column = "group";
      const auto fit = econ::did_estimate(syn.panel, did, controls_fe_spec());
      did_hit += std::abs(fit.coef("treat_post") - 0.138) <= 2.0 * fit.se("treat_post");
    }
  }
  const double elapsed = seconds_since(t0);
  std::sort(ols_bias_se.begin(), ols_bias_se.end());
  const double min_bias = ols_bias_se.front();
  const double median_bias = ols_bias_se[ols_bias_se.size() / 2];

  Outcome o;
  o.pass = fraction(ols_hit, seeds) >= 0.9 && fraction(fe_hit, seeds) >= 0.9 && fraction(iv_hit, seeds) >= 0.9 &&
           min_bias > 5.0 && fraction(did_hit, seeds) >= 0.9 && elapsed < 120.0;
  o.detail = "OLS " + fmt("%.3f", fraction(ols_hit, seeds)) + ", FE " + fmt("%.3f", fraction(fe_hit, seeds)) +
             ", 2SLS " + fmt("%.3f", fraction(iv_hit, seeds)) + " (mean " + fmt("%.4f", iv_sum / seeds) +
             "), OLS bias/SE min " + fmt("%.1f", min_bias) + " median " + fmt("%.1f", median_bias) + ", DID " +
             fmt("%.3f", fraction(did_hit, seeds)) + ", " + fmt("%.1f", elapsed) + " s";
  return o;
}

// ---------------------------------------------------------------- 6
Outcome event_study() {
  const int seeds = 200;
  std::vector<int> hits(9, 0);
  int joint = 0;
  bool base_zero = true;
  for (int s = 1; s <= seeds; ++s) {
    const auto syn = data::synth_panel(group_config(static_cast<std::uint64_t>(s)));
    data::DidSpec did;
    did.group_column = "group";
    const auto es = econ::event_study(syn.panel, did, controls_fe_spec());
    bool all = true;
    for (std::size_t k = 0; k < es.points.size(); ++k) {
      const auto& pt = es.points[k];
      if (pt.base) {
        base_zero = base_zero && pt.estimate == 0.0 && pt.std_error == 0.0;
        ++hits[k];
        continue;
      }
      const double truth = pt.relative_year >= 0 ? 0.138 : 0.0;
      const bool in = std::abs(pt.estimate - truth) <= 2.0 * pt.std_error;
      hits[k] += in;
      all = all && in;
    }
    joint += all;
  }
  const int worst = *std::min_element(hits.begin(), hits.end());
  Outcome o;
  o.pass = fraction(worst, seeds) >= 0.9 && base_zero;
  std::string per;
  for (std::size_t k = 0; k < hits.size(); ++k)
    per += (k ? " " : "") + fmt("%.3f", fraction(hits[k], seeds));
  o.detail = "per-coefficient coverage [" + per + "], min " + fmt("%.3f", fraction(worst, seeds)) +
             "; all-jointly " + fmt("%.3f", fraction(joint, seeds)) + "; base exactly 0: " + (base_zero ? "yes" : "no");
  return o;
}

// ---------------------------------------------------------------- 7
Outcome placebo() {
  data::SynthConfig c;
  c.beta_exrate = 0.0;
  c.tau_did = 0.0;
  // Province-level exchange-rate variation; see the README on national-only series.
  c.exrate_idio_sd = 0.2;
  const auto panel = data::synth_panel(c).panel;
  econ::PlaceboSetup setup;
  setup.estimator = [](const data::PanelDataset& p) { return econ::fit_linear(p, benchmark_spec(true)); };
  const auto a = econ::placebo_permutation(panel, setup, 500, 20150811);
  const auto b = econ::placebo_permutation(panel, setup, 500, 20150811);
  const auto m = stats::moments(a.coefficients);
  const double bound = 3.0 * m.sd / std::sqrt(500.0);
  const auto ks = stats::ks_uniform(a.p_values);
  const bool same = a.coefficients == b.coefficients && a.p_values == b.p_values;
  Outcome o;
  o.pass = std::abs(m.mean) < bound && ks.p_value >= 0.01 && same;
  o.detail = "mean " + fmt("%.2e", m.mean) + " vs bound " + fmt("%.2e", bound) + ", KS D " + fmt("%.4f", ks.statistic) +
             " p " + fmt("%.4f", ks.p_value) + ", deterministic: " + (same ? "yes" : "no");
  return o;
}

// ---------------------------------------------------------------- 8
Outcome rca_index() {
  bool pass = true;
  std::string detail;

  // Neutral shares: every region exports in world proportions.
  std::vector<data::ExportEntry> neutral;
  const std::vector<double> world{30.0, 70.0, 12.5};
  for (int j = 0; j < 3; ++j) neutral.push_back({"WORLD", "i" + std::to_string(j), 2020, world[j]});
  for (int r = 0; r < 4; ++r)
    for (int j = 0; j < 3; ++j) neutral.push_back({"R" + std::to_string(r), "i" + std::to_string(j), 2020, world[j] * (r + 1) / 8.0});
  const data::ExportTable nt(neutral);
  int exact = 0, cells = 0;
  for (const auto& cell : data::rca_all(nt)) {
    ++cells;
    exact += cell.rca && *cell.rca == 1.0;
  }
  pass = pass && exact == cells && cells == 12;
  detail += "neutral exact " + std::to_string(exact) + "/" + std::to_string(cells);

  const data::ExportTable worked({{"P", "ind1", 2020, 10}, {"P", "ind2", 2020, 10},
                                  {"WORLD", "ind1", 2020, 30}, {"WORLD", "ind2", 2020, 70}});
  const double r = data::rca_index_from_exports(worked, "P", "ind1", 2020);
  pass = pass && r == 5.0 / 3.0;
  detail += ", worked example " + fmt("%.17g", r);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  std::vector<data::ExportEntry> base, scaled;
  for (int j = 0; j < 5; ++j) {
    const double wv = 500.0 + u(rng);
    base.push_back({"WORLD", "i" + std::to_string(j), 2020, wv});
    scaled.push_back({"WORLD", "i" + std::to_string(j), 2020, wv * 1e6});
    for (int k = 0; k < 3; ++k) {
      const double v = u(rng);
      base.push_back({"R" + std::to_string(k), "i" + std::to_string(j), 2020, v});
      scaled.push_back({"R" + std::to_string(k), "i" + std::to_string(j), 2020, v * 1e6});
    }
  }
  const auto ra = data::rca_all(data::ExportTable(base));
  const auto rb = data::rca_all(data::ExportTable(scaled));
  double worst = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) worst = std::max(worst, std::abs(*rb[i].rca / *ra[i].rca - 1.0));
  pass = pass && worst <= 1e-12;
  detail += ", scale 1e6 rel err " + fmt("%.1e", worst);
  return {pass, detail};
}

// ---------------------------------------------------------------- 9
Outcome kde_checks() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> s(7), grid(11);
    for (auto& v : s) v = g(rng);
    for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = -3.0 + 0.6 * static_cast<double>(j);
    const double h = 0.2 + 0.1 * rep;
    const auto d = stats::kde(s, grid, h);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double sum = 0.0;
      for (double xi : s) {
        const double z = (grid[j] - xi) / h;
        sum += std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      }
      worst = std::max(worst, std::abs(d.density[j] - sum / (static_cast<double>(s.size()) * h)));
    }
  }
  std::vector<double> big(5000);
  for (auto& v : big) v = 1.5 * g(rng) + 0.3;
  const double h = stats::silverman_bandwidth(big);
  const auto [lo, hi] = std::minmax_element(big.begin(), big.end());
  const auto grid = stats::linspace(*lo - 8 * h, *hi + 8 * h, 4001);
  const auto d = stats::kde(big, grid, h);
  const double integral = stats::trapezoid(d.grid, d.density);
  Outcome o;
  o.pass = worst <= 1e-12 && std::abs(integral - 1.0) <= 1e-3;
  o.detail = "brute force max abs diff " + fmt("%.1e", worst) + ", integral " + fmt("%.6f", integral);
  return o;
}

// ---------------------------------------------------------------- 10
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome end_to_end() {
  const fs::path root = fs::path(FXRCA_TEST_TMP) / "e2e";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink, err;
  auto call = [&](std::vector<std::string> args) { return cli::run(args, sink, err); };

  bool pass = true;
  std::string detail;
  pass = pass && call({"synth", "--out", (root / "synth").string()}) == 0;
  const auto panel_path = (root / "synth" / "panel.csv").string();
  const auto rows = data::load_panel_csv(panel_path).rows();
  pass = pass && rows == 420;
  detail += "fixture rows " + std::to_string(rows);

  const std::vector<std::pair<std::string, std::vector<std::string>>> steps = {
      {"estimate", {"estimate", "--panel", panel_path}},
      {"iv", {"iv", "--panel", panel_path, "--se", "cluster"}},
      {"did", {"did", "--panel", panel_path}},
      {"placebo", {"placebo", "--panel", panel_path}},
  };
  for (const auto& [name, base] : steps) {
    auto args = base;
    args.push_back("--out");
    args.push_back((root / name).string());
    const int code = call(args);
    detail += ", " + name + " exit " + std::to_string(code);
    pass = pass && code == 0;
    if (code != 0) continue;
    const auto replay_dir = root / (name + "_replay");
    const int rcode = call({"replay", "--manifest", (root / name / "manifest.json").string(), "--out", replay_dir.string()});
    bool identical = rcode == 0;
    for (const auto& entry : fs::directory_iterator(root / name)) {
      const auto file = entry.path().filename();
      if (file == "manifest.json") continue;
      identical = identical && slurp(entry.path()) == slurp(replay_dir / file);
    }
    detail += identical ? " (replay identical)" : " (replay differs)";
    pass = pass && identical;
  }
  if (!err.str().empty()) detail += "; stderr: " + err.str();
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"simulation moments", simulation_moments},
      {"scenario ordering", scenario_ordering},
      {"post-shock mean convergence", convergence},
      {"estimator oracles", estimator_oracles},
      {"recovery coverage", recovery_coverage},
      {"event study", event_study},
      {"placebo permutation", placebo},
      {"RCA index", rca_index},
      {"KDE", kde_checks},
      {"end-to-end CLI", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
