#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fxrca/panel.hpp"
#include "fxrca/regression.hpp"

namespace fxrca::econ {

// Variance used for the Kleibergen-Paap statistics. `homoskedastic` forces
// the classical form, under which they reproduce Anderson LM and
// Cragg-Donald F exactly.
enum class DiagnosticVariance { robust, cluster, homoskedastic };

inline constexpr double kStatisticCap = 1e12;

struct IvDiagnostics {
  double anderson_lm = 0.0;
  double anderson_p = 1.0;
  double kp_rk_lm = 0.0;
  double kp_rk_lm_p = 1.0;
  double cragg_donald_f = 0.0;
  double kp_wald_rk_f = 0.0;
  double first_stage_f_p = 1.0;
  bool capped = false;  // a statistic hit kStatisticCap (perfect first stage)
  int excluded_instruments = 0;
  RegressionFit first_stage;
};

struct IvResult {
  RegressionFit second_stage;
  IvDiagnostics diagnostics;
};

struct IvOptions {
  VarianceOptions variance;  // second-stage SE type, clusters, absorbed
  DiagnosticVariance diagnostic_variance = DiagnosticVariance::robust;
};

// 2SLS with one endogenous regressor. `exog` carries the included
// exogenous columns (constant included by the caller). Throws
// CollinearityError when an instrument is collinear with exog and
// ConfigError for more than one endogenous column.
IvResult two_sls(const Eigen::VectorXd& y, const Eigen::MatrixXd& endog, const Eigen::MatrixXd& instruments,
                 const Eigen::MatrixXd& exog, const std::string& endog_name,
                 const std::vector<std::string>& instrument_names, const std::vector<std::string>& exog_names,
                 const IvOptions& opts = {});

// Weak/under-identification statistics after partialling out exog.
IvDiagnostics iv_diagnostics(const Eigen::VectorXd& endog, const Eigen::MatrixXd& instruments,
                             const Eigen::MatrixXd& exog, std::size_t absorbed, DiagnosticVariance variance,
                             const std::vector<int>& clusters = {});

struct IvPanelSpec {
  std::string outcome = "rca";
  std::string endogenous = "exrate";
  std::vector<std::string> instruments = {"l_tool"};
  std::vector<std::string> exogenous = data::kControlColumns;
  std::optional<std::string> fixed_effect = std::string("province");
  bool time_trend = true;
  SeType se_type = SeType::homoskedastic;
  std::optional<std::string> cluster;
};

// Panel 2SLS: builds the instrument columns when absent, keeps complete
// rows, sweeps out the fixed effect by the within transform.
IvResult iv_panel(const data::PanelDataset& panel, const IvPanelSpec& spec);

}  // namespace fxrca::econ
