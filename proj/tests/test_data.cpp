#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fxrca/error.hpp"
#include "fxrca/exports.hpp"
#include "fxrca/panel.hpp"
#include "fxrca/regression.hpp"
#include "fxrca/synth.hpp"

using namespace fxrca;
using namespace fxrca::data;

namespace {

const char* kHeader = "province,year,rca,exrate,unemployment,ln_population,ln_retail,ln_power,vgdp,law,ln_government,ln_first";

std::string row(const std::string& p, int y, double rca = 1.0, double ex = 6.5) {
  std::ostringstream os;
  os << p << ',' << y << ',' << rca << ',' << ex << ",3,8,8,7,7,8,8,7";
  return os.str();
}

PanelDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_panel_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("panel loading and validation") {
  const auto p = parse(std::string(kHeader) + "\n" + row("B", 2010) + "\n" + row("A", 2011) + "\n" + row("A", 2010) + "\n");
  CHECK(p.rows() == 3);
  CHECK(p.provinces()[0] == "A");
  CHECK(p.years()[0] == 2010);
  CHECK(p.column("exrate")[0] == 6.5);

  CHECK(error_of(std::string(kHeader) + "\n" + row("A", 2010) + "\n" + row("A", 2010) + "\n").find("duplicate") !=
        std::string::npos);
  const std::string no_rca = "province,year,exrate,unemployment,ln_population,ln_retail,ln_power,vgdp,law,ln_government,ln_first\nA,2010,6,3,8,8,7,7,8,8,7\n";
  CHECK(error_of(no_rca).find("rca") != std::string::npos);
  CHECK(error_of(std::string(kHeader) + "\nA,2010,abc,6,3,8,8,7,7,8,8,7\n").find("rca") != std::string::npos);
  CHECK(error_of(std::string(kHeader) + "\nA,2010,,6,3,8,8,7,7,8,8,7\n").find("line 2") != std::string::npos);
}

TEST_CASE("panel csv round trip") {
  const auto synth = synth_panel(SynthConfig{}).panel;
  CHECK(synth.rows() == 420);
  const auto derived = add_exrate_derivatives(build_instrument(synth));
  std::ostringstream os;
  write_panel_csv(os, derived);
  const auto back = parse(os.str());
  CHECK(back == derived);
}

TEST_CASE("absolute forward difference") {
  const auto d = abs_first_difference({{2010, 6.5}, {2011, 6.7}, {2012, 6.4}});
  REQUIRE(d.size() == 2);
  CHECK(d.at(2010) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(d.at(2011) == doctest::Approx(0.3).epsilon(1e-12));
  for (const auto& [y, v] : abs_first_difference({{1, 2.0}, {2, 2.0}, {3, 2.0}})) CHECK(v == 0.0);
  CHECK_THROWS_AS(abs_first_difference({{2010, 1.0}, {2012, 2.0}}), DataError);
}

TEST_CASE("threshold split") {
  auto p = parse(std::string(kHeader) + "\n" + row("A", 2010) + "\n" + row("A", 2011) + "\n" + row("A", 2012) + "\n");
  p = p.with_column("d", {0.1, 0.3, 0.2});
  auto [lo, hi] = split_by_threshold(p, "d", 0.2);
  CHECK(lo.rows() == 2);
  CHECK(hi.rows() == 1);
  auto [none, all] = split_by_threshold(p, "d", 0.0);
  CHECK(none.rows() == 0);
  CHECK(all.rows() == 3);
  auto [all2, none2] = split_by_threshold(p, "d", 1.0);
  CHECK(all2.rows() == 3);
  CHECK(none2.rows() == 0);

  // National series of 14 years: the last year has no forward difference,
  // so the two subsamples together hold 13 x 30 = 390 rows.
  const auto synth = add_exrate_derivatives(synth_panel(SynthConfig{}).panel);
  const auto [below, above] = split_by_threshold(synth, "d_exrate", 0.2);
  CHECK(below.rows() + above.rows() == 390);
  CHECK(below.rows() % 30 == 0);
}

TEST_CASE("rca bands") {
  CHECK(classify_rca(3.0) == RcaBand::extremely_strong);
  CHECK(classify_rca(1.0) == RcaBand::moderate);
  CHECK(classify_rca(0.8) == RcaBand::moderate);
  CHECK(classify_rca(0.5) == RcaBand::weak);
  CHECK(classify_rca(1.25) == RcaBand::strong);
  CHECK(classify_rca(2.5) == RcaBand::extremely_strong);
  CHECK(to_string(RcaBand::extremely_strong) == "extremely_strong");
  CHECK_THROWS(classify_rca(0.0));
  CHECK_THROWS(classify_rca(-1.0));
}

TEST_CASE("annual mean exchange rate") {
  MonthlyRates m;
  for (int month = 1; month <= 12; ++month) {
    m[{2015, month}] = 6.58;
    m[{2016, month}] = month;
  }
  const auto a = annual_mean_exrate(m);
  CHECK(a.annual.at(2015) == doctest::Approx(6.58).epsilon(1e-14));
  CHECK(a.annual.at(2016) == doctest::Approx(6.5).epsilon(1e-14));
  CHECK(a.grand_mean == doctest::Approx((6.58 + 6.5) / 2).epsilon(1e-14));
  MonthlyRates flat;
  for (int month = 1; month <= 12; ++month) flat[{2020, month}] = 6.58;
  CHECK(annual_mean_exrate(flat).grand_mean == doctest::Approx(6.58).epsilon(1e-14));
  m.erase({2016, 5});
  CHECK_THROWS_AS(annual_mean_exrate(m), DataError);
  CHECK(kDefaultTreatThreshold == 6.58);

  std::istringstream csv("year,month,rate\n2019,1,6.8\n2019,2,6.7\n");
  const auto parsed = parse_monthly_csv(csv);
  CHECK(parsed.at({2019, 2}) == 6.7);
}

TEST_CASE("treat and post assignment") {
  std::string text = std::string(kHeader) + "\n";
  for (int y = 2012; y <= 2020; ++y) text += row("A", y, 1.0, y == 2017 ? 6.7 : y == 2014 ? 6.2 : y == 2015 ? 6.58 : 6.6) + "\n";
  const auto p = parse(text);
  DidSpec spec;
  const auto a = assign_treat_post(p, spec);
  auto at = [&](int year, const std::string& col) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (a.years()[i] == year) return a.column(col)[i];
    return static_cast<double>(NAN);
  };
  CHECK(at(2017, "treat") == 1.0);
  CHECK(at(2017, "post") == 1.0);
  CHECK(at(2014, "treat") == 0.0);
  CHECK(at(2014, "post") == 0.0);
  CHECK(at(2015, "treat") == 0.0);
  CHECK(at(2016, "post") == 1.0);
  CHECK(at(2012, "relative_year") == -4.0);
  CHECK(assign_treat_post(a, spec) == a);

  spec.window_start = 2008;
  CHECK_THROWS_AS(assign_treat_post(p, spec), DataError);
}

TEST_CASE("instrument construction") {
  std::string text = std::string(kHeader) + ",market,epu,gpr\n";
  text += row("A", 2010) + ",2," + std::to_string(std::exp(1.0)) + ",1\n";
  text += row("A", 2011) + ",0,5,7\n";
  const auto p = build_instrument(parse(text));
  CHECK(p.column("tool")[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p.column("tool")[1] == 0.0);
  CHECK(std::isnan(p.column("l_tool")[0]));
  CHECK(p.column("l_tool")[1] == p.column("tool")[0]);

  std::string bad = std::string(kHeader) + ",market,epu,gpr\n" + row("A", 2010) + ",2,-1,3\n";
  CHECK_THROWS_AS(build_instrument(parse(bad)), DomainError);

  const auto synth = build_instrument(synth_panel(SynthConfig{}).panel);
  CHECK(econ::complete_rows(synth, {"l_tool"}).size() == 390);
}

TEST_CASE("rca index from exports") {
  const std::vector<ExportEntry> worked = {{"P", "ind1", 2020, 10}, {"P", "ind2", 2020, 10},
                                           {"WORLD", "ind1", 2020, 30}, {"WORLD", "ind2", 2020, 70}};
  const ExportTable t(worked);
  CHECK(rca_index_from_exports(t, "P", "ind1", 2020) == 5.0 / 3.0);

  const ExportTable single({{"P", "x", 2020, 4}, {"WORLD", "x", 2020, 40}});
  CHECK(rca_index_from_exports(single, "P", "x", 2020) == 1.0);

  const ExportTable zero({{"P", "x", 2020, 0}, {"P", "y", 2020, 0}, {"WORLD", "x", 2020, 5}, {"WORLD", "y", 2020, 5}});
  try {
    rca_index_from_exports(zero, "P", "x", 2020);
    FAIL("expected an error");
  } catch (const EstimationError& e) {
    CHECK(std::string(e.what()).find("region total") != std::string::npos);
  }
  CHECK_THROWS_AS(ExportTable({{"P", "x", 2020, 9}, {"WORLD", "x", 2020, 5}}), DataError);
  CHECK_THROWS_AS(ExportTable({{"P", "x", 2020, -1}, {"WORLD", "x", 2020, 5}}), DataError);
}

TEST_CASE("rca properties on random tables") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.5, 50.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<ExportEntry> e;
    std::map<std::string, double> world;
    for (const char* r : {"A", "B", "C"})
      for (const char* i : {"i1", "i2", "i3", "i4"}) {
        const double v = u(rng);
        e.push_back({r, i, 2020, v});
        world[i] += v;
      }
    for (const auto& [i, v] : world) e.push_back({"WORLD", i, 2020, v * 1.5});
    const ExportTable t(e);

    // Weighted by world industry shares, a region's RCA values average to 1.
    double total = 0.0;
    for (const auto& [i, v] : world) total += v * 1.5;
    for (const char* r : {"A", "B", "C"}) {
      double s = 0.0;
      for (const auto& [i, v] : world) s += (v * 1.5 / total) * rca_index_from_exports(t, r, i, 2020);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }

    auto scaled = e;
    for (auto& x : scaled) x.export_value *= 1e6;
    const ExportTable ts(scaled);
    for (const char* r : {"A", "B"})
      for (const char* i : {"i1", "i4"}) {
        const double a = rca_index_from_exports(t, r, i, 2020), b = rca_index_from_exports(ts, r, i, 2020);
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
      }
  }
}

TEST_CASE("export csv parsing") {
  std::istringstream in("region,industry,year,export_value\nP,ind1,2020,10\nP,ind2,2020,10\nWORLD,ind1,2020,30\nWORLD,ind2,2020,70\n");
  const auto t = parse_export_csv(in, "WORLD");
  CHECK(t.regions() == std::vector<std::string>{"P"});
  const auto cells = rca_all(t);
  REQUIRE(cells.size() == 2);
  CHECK(*cells[0].rca == 5.0 / 3.0);
  std::istringstream bad("region,industry,export_value\nP,a,1\n");
  CHECK_THROWS_AS(parse_export_csv(bad, "WORLD"), DataError);
}

TEST_CASE("synthetic panel") {
  SynthConfig c;
  const auto a = synth_panel(c);
  const auto b = synth_panel(c);
  CHECK(a.panel == b.panel);
  CHECK(a.panel.rows() == 420);
  CHECK(a.panel.distinct_provinces().size() == 30);
  const auto json = truth_to_json(a.truth);
  for (const auto& [name, beta] : c.beta_controls) CHECK(json.find("\"" + name + "\"") != std::string::npos);
  CHECK(json.find("\"exrate\"") != std::string::npos);
  CHECK(json.find("\"treat_post\"") != std::string::npos);

  c.seed += 1;
  CHECK(!(synth_panel(c).panel == a.panel));

  std::istringstream kv("n_provinces = 0\n");
  CHECK_THROWS_AS(synth_config_from_kv(parse_kv(kv)), ConfigError);
  std::istringstream unknown("betta = 1\n");
  CHECK_THROWS_AS(synth_config_from_kv(parse_kv(unknown)), ConfigError);
}

TEST_CASE("zero-noise synthetic panel is an exact linear system") {
  SynthConfig c;
  c.error_sd = 0.0;
  c.province_effect_sd = 0.0;
  c.tau_did = 0.0;
  c.beta_trend = 0.01;
  const auto s = synth_panel(c);
  econ::ModelSpec spec;
  spec.regressors = {"exrate"};
  spec.regressors.insert(spec.regressors.end(), kControlColumns.begin(), kControlColumns.end());
  spec.time_trend = true;
  const auto fit = econ::pooled_ols(s.panel, spec);
  for (const auto& [name, beta] : s.truth.coefficients) {
    if (name == "treat_post") continue;
    double truth = beta;
    // The generator's trend is in years since first_year; the regression
    // uses calendar years, which moves the intercept only.
    if (name == "_cons") truth = beta - c.beta_trend * c.first_year;
    CHECK(std::abs(fit.coef(name) - truth) < 1e-10 * std::max(1.0, std::abs(truth)));
  }
}
