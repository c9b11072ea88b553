#include "fxrca/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fxrca/csv.hpp"
#include "fxrca/kv_config.hpp"

namespace fxrca::report {

namespace {

using json = nlohmann::ordered_json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool is_indicator(const std::string& term) { return term.find('=') != std::string::npos; }

json fit_document(const econ::RegressionFit& fit) {
  json doc;
  doc["estimator"] = fit.estimator;
  doc["n_obs"] = fit.n_obs;
  doc["n_params"] = fit.n_params;
  doc["n_groups"] = fit.n_groups;
  doc["df_resid"] = fit.df_resid;
  doc["r_squared"] = number(fit.r_squared);
  doc["r_squared_kind"] = fit.r_squared_kind;
  doc["ssr"] = fit.ssr;
  doc["se_type"] = fit.se_type;
  doc["stat_kind"] = fit.stat_kind;
  doc["log_likelihood"] = fit.log_likelihood ? number(*fit.log_likelihood) : json(nullptr);
  doc["converged"] = fit.converged;
  doc["iterations"] = fit.iterations;
  doc["gradient_norm"] = fit.gradient_norm;
  json terms = json::array();
  for (const auto& t : fit.terms)
    terms.push_back({{"term", t.name},
                     {"estimate", number(t.estimate)},
                     {"std_error", number(t.std_error)},
                     {"stat", number(t.stat)},
                     {"p_value", number(t.p_value)}});
  doc["terms"] = terms;
  json extra = json::object();
  for (const auto& [k, v] : fit.extra) extra[k] = number(v);
  doc["diagnostics"] = extra;
  if (!fit.objective_trace.empty()) doc["objective_trace"] = fit.objective_trace;
  doc["warnings"] = fit.warnings;
  return doc;
}

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : ""; }

std::string rounded(double v, int digits) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

std::string fit_csv(const econ::RegressionFit& fit) {
  std::string out = "term,estimate,std_error,stat,p_value\n";
  for (const auto& t : fit.terms)
    out += csv_field(t.name) + "," + cell(t.estimate) + "," + cell(t.std_error) + "," + cell(t.stat) + "," +
           cell(t.p_value) + "\n";
  return out;
}

std::string fit_json(const econ::RegressionFit& fit) { return fit_document(fit).dump(2) + "\n"; }

std::string iv_json(const econ::IvResult& r) {
  json doc;
  doc["second_stage"] = fit_document(r.second_stage);
  doc["first_stage"] = fit_document(r.diagnostics.first_stage);
  const auto& d = r.diagnostics;
  doc["diagnostics"] = {{"anderson_lm", d.anderson_lm},       {"anderson_p", d.anderson_p},
                        {"kp_rk_lm", d.kp_rk_lm},             {"kp_rk_lm_p", d.kp_rk_lm_p},
                        {"cragg_donald_f", d.cragg_donald_f}, {"kp_wald_rk_f", d.kp_wald_rk_f},
                        {"first_stage_f_p", d.first_stage_f_p}, {"capped", d.capped},
                        {"excluded_instruments", d.excluded_instruments}};
  return doc.dump(2) + "\n";
}

std::string comparison_csv(const std::vector<LabelledFit>& fits) {
  std::vector<std::string> terms;
  for (const auto& [label, fit] : fits)
    for (const auto& t : fit->terms)
      if (!is_indicator(t.name) && std::find(terms.begin(), terms.end(), t.name) == terms.end())
        terms.push_back(t.name);

  std::string out = "term";
  for (const auto& [label, fit] : fits) out += "," + csv_field(label);
  out += "\n";
  for (const auto& name : terms) {
    std::string est = csv_field(name), se;
    for (const auto& [label, fit] : fits) {
      if (fit->has(name)) {
        const auto& t = fit->term(name);
        est += "," + rounded(t.estimate, 3) + stars(t.p_value);
        se += ",(" + rounded(t.std_error, 3) + ")";
      } else {
        est += ",";
        se += ",";
      }
    }
    out += est + "\n" + se + "\n";
  }
  out += "N";
  for (const auto& [label, fit] : fits) out += "," + std::to_string(fit->n_obs);
  out += "\nR2";
  for (const auto& [label, fit] : fits) out += "," + rounded(fit->r_squared, 3);
  out += "\nR2_kind";
  for (const auto& [label, fit] : fits) out += "," + fit->r_squared_kind;
  out += "\n";
  bool any_ll = false;
  for (const auto& [label, fit] : fits) any_ll = any_ll || fit->log_likelihood.has_value();
  if (any_ll) {
    out += "log_likelihood";
    for (const auto& [label, fit] : fits) out += "," + (fit->log_likelihood ? rounded(*fit->log_likelihood, 3) : "");
    out += "\n";
  }
  return out;
}

std::string event_csv(const econ::EventStudy& es) {
  std::string out = "relative_year,estimate,ci_low,ci_high\n";
  for (const auto& p : es.points)
    out += std::to_string(p.relative_year) + "," + cell(p.estimate) + "," + cell(p.ci_low) + "," + cell(p.ci_high) +
           "\n";
  return out;
}

std::string placebo_csv(const econ::PlaceboResult& r) {
  std::string out = "draw,coefficient,p_value\n";
  for (std::size_t d = 0; d < r.coefficients.size(); ++d)
    out += std::to_string(d) + "," + cell(r.coefficients[d]) + "," + cell(r.p_values[d]) + "\n";
  return out;
}

std::string iv_diagnostics_csv(const econ::IvDiagnostics& d) {
  std::string out = "statistic,value,p_value\n";
  out += "anderson_canon_corr_lm," + cell(d.anderson_lm) + "," + cell(d.anderson_p) + "\n";
  out += "kleibergen_paap_rk_lm," + cell(d.kp_rk_lm) + "," + cell(d.kp_rk_lm_p) + "\n";
  out += "cragg_donald_wald_f," + cell(d.cragg_donald_f) + "," + cell(d.first_stage_f_p) + "\n";
  out += "kleibergen_paap_wald_rk_f," + cell(d.kp_wald_rk_f) + ",\n";
  return out;
}

}  // namespace fxrca::report
