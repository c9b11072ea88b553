#include "fxrca/did.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fxrca/error.hpp"
#include "fxrca/kv_config.hpp"
#include "fxrca/stats.hpp"

namespace fxrca::econ {

namespace {

data::PanelDataset restrict_window(const data::PanelDataset& panel, const data::DidSpec& did) {
  const auto& years = panel.years();
  return panel.filter([&](std::size_t i) { return years[i] >= did.window_start && years[i] <= did.window_end; });
}

}  // namespace

std::string event_column(int n) { return n < 0 ? "ev_m" + std::to_string(-n) : "ev_p" + std::to_string(n); }

RegressionFit did_estimate_prepared(const data::PanelDataset& panel, const data::DidSpec& did, const ModelSpec& spec) {
  did.validate();
  for (const char* c : {"treat", "post"})
    if (!panel.has_column(c)) throw DataError(std::string("did: panel has no '") + c + "' column");
  const auto window = restrict_window(panel, did);
  if (window.rows() == 0) throw DataError("did: no rows inside the window");

  const auto& treat = window.column("treat");
  const auto& post = window.column("post");
  std::vector<double> tp(window.rows());
  for (std::size_t i = 0; i < tp.size(); ++i) tp[i] = treat[i] * post[i];
  const auto [lo, hi] = std::minmax_element(tp.begin(), tp.end());
  if (*lo == *hi)
    throw IdentificationError("did: treat x post is constant (" + format_double(*lo) + ") inside the window " +
                              std::to_string(did.window_start) + "-" + std::to_string(did.window_end));

  ModelSpec s = spec;
  s.regressors.insert(s.regressors.begin(), "treat_post");
  auto fit = fit_linear(window.with_column("treat_post", std::move(tp)), s);
  fit.estimator = "did";
  return fit;
}

RegressionFit did_estimate(const data::PanelDataset& panel, const data::DidSpec& did, const ModelSpec& spec) {
  return did_estimate_prepared(data::assign_treat_post(panel, did), did, spec);
}

EventStudy event_study(const data::PanelDataset& panel, const data::DidSpec& did, const ModelSpec& spec,
                       double level) {
  did.validate();
  if (did.base_period < -did.leads || did.base_period > did.lags)
    throw ConfigError("event study: base period outside the lead/lag range");
  const auto window = restrict_window(data::assign_treat_post(panel, did), did);
  const auto& treat = window.column("treat");
  const auto& rel = window.column("relative_year");

  std::vector<int> periods;
  for (int n = -did.leads; n <= did.lags; ++n)
    if (n != did.base_period) periods.push_back(n);

  std::string gaps;
  auto data = window;
  for (int n : periods) {
    std::vector<double> col(window.rows());
    bool any = false;
    for (std::size_t i = 0; i < col.size(); ++i) {
      col[i] = (treat[i] != 0.0 && rel[i] == n) ? 1.0 : 0.0;
      any = any || col[i] != 0.0;
    }
    if (!any) gaps += (gaps.empty() ? "" : ", ") + std::to_string(n);
    data = data.with_column(event_column(n), std::move(col));
  }
  if (!gaps.empty()) throw DataError("event study: no treated observations at relative years " + gaps);

  ModelSpec s = spec;
  std::vector<std::string> cols;
  for (int n : periods) cols.push_back(event_column(n));
  s.regressors.insert(s.regressors.begin(), cols.begin(), cols.end());

  EventStudy es;
  es.fit = fit_linear(data, s);
  es.fit.estimator = "event_study";
  const double z = stats::normal_quantile(0.5 + level / 2.0);
  for (int n = -did.leads; n <= did.lags; ++n) {
    EventPoint pt;
    pt.relative_year = n;
    if (n == did.base_period) {
      pt.base = true;
    } else {
      const auto& t = es.fit.term(event_column(n));
      pt.estimate = t.estimate;
      pt.std_error = t.std_error;
      pt.ci_low = t.estimate - z * t.std_error;
      pt.ci_high = t.estimate + z * t.std_error;
    }
    es.points.push_back(pt);
  }
  return es;
}

}  // namespace fxrca::econ
