#pragma once

#include <vector>

#include "fxrca/panel.hpp"
#include "fxrca/regression.hpp"

namespace fxrca::econ {

// Treat x Post regression inside the DID window. `spec` supplies the
// outcome, controls, fixed effect, trend flag and SE type; the interaction
// column "treat_post" is prepended to its regressors.
RegressionFit did_estimate(const data::PanelDataset& panel, const data::DidSpec& did, const ModelSpec& spec);

// Same, on a panel whose treat/post columns are already assigned (used by
// the placebo engine after permuting treat).
RegressionFit did_estimate_prepared(const data::PanelDataset& panel, const data::DidSpec& did, const ModelSpec& spec);

struct EventPoint {
  int relative_year = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool base = false;
};

struct EventStudy {
  std::vector<EventPoint> points;  // ordered by relative year, base included
  RegressionFit fit;
};

// One treat x 1{relative_year == n} column per n in [-leads, lags] except
// the base period. Confidence intervals are 95% normal intervals.
EventStudy event_study(const data::PanelDataset& panel, const data::DidSpec& did, const ModelSpec& spec,
                       double level = 0.95);

// Name of the event-study column for relative year n, e.g. "ev_m2", "ev_p1".
std::string event_column(int n);

}  // namespace fxrca::econ
