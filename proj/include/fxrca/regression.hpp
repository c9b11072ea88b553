#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fxrca/panel.hpp"

namespace fxrca::econ {

enum class SeType { homoskedastic, cluster };

SeType parse_se_type(const std::string& text);
std::string to_string(SeType se);

struct Term {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double stat = 0.0;
  double p_value = 1.0;
};

struct RegressionFit {
  std::string estimator;
  std::vector<Term> terms;
  Eigen::MatrixXd covariance;
  std::size_t n_obs = 0;
  std::size_t n_params = 0;  // estimated columns plus absorbed effects
  std::size_t n_groups = 0;
  double df_resid = 0.0;
  double r_squared = 0.0;
  std::string r_squared_kind = "centered";  // "centered", "within" or "none"
  double ssr = 0.0;
  std::optional<double> log_likelihood;
  bool converged = true;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;
  std::string se_type = "homoskedastic";
  std::string stat_kind = "t";
  std::map<std::string, double> extra;
  std::vector<std::string> warnings;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;

  bool has(const std::string& name) const;
  const Term& term(const std::string& name) const;
  double coef(const std::string& name) const { return term(name).estimate; }
  double se(const std::string& name) const { return term(name).std_error; }
};

struct VarianceOptions {
  SeType se_type = SeType::homoskedastic;
  std::vector<int> clusters;  // one id per row when se_type == cluster
  std::size_t absorbed = 0;   // parameters absorbed before the fit (FE)
  bool centered_r2 = true;
};

// Least squares via column-pivoted QR on unit-norm columns. Throws
// CollinearityError naming the first column that is a linear combination of
// earlier ones.
RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                  const VarianceOptions& opts = {});

// (X'X)^-1 for a full-rank X, computed through QR. Throws CollinearityError.
Eigen::MatrixXd xtx_inverse(const Eigen::MatrixXd& X, const std::vector<std::string>& names);

// Index of the first column of X that is collinear with the columns before
// it, or -1 when X has full column rank.
int first_collinear_column(const Eigen::MatrixXd& X);

// Fills std_error/stat/p_value of every term from `covariance` and df.
void finalize_terms(RegressionFit& fit, const Eigen::VectorXd& beta, const std::vector<std::string>& names,
                    double df, bool normal_reference = false);

// Cluster-robust sandwich with the G/(G-1) * (N-1)/(N-K) small-sample factor.
Eigen::MatrixXd cluster_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                   const Eigen::MatrixXd& bread, const std::vector<int>& clusters,
                                   std::size_t n_params);

std::size_t count_clusters(const std::vector<int>& clusters);

struct ModelSpec {
  std::string outcome = "rca";
  std::vector<std::string> regressors;
  std::optional<std::string> fixed_effect;  // grouping column, e.g. "province"
  bool time_trend = false;                  // adds "year" as a regressor
  bool intercept = true;
  SeType se_type = SeType::homoskedastic;
  std::optional<std::string> cluster;

  void validate(const data::PanelDataset& panel) const;
};

// Integer ids for "province", "year" or any numeric column.
std::vector<int> group_ids(const data::PanelDataset& panel, const std::string& key);

// Rows with no NaN in any of `columns`.
std::vector<std::size_t> complete_rows(const data::PanelDataset& panel, const std::vector<std::string>& columns);

// Columns the spec reads, in design order (regressors, then "year").
std::vector<std::string> design_columns(const ModelSpec& spec);

// x - group_mean(x) + grand_mean(x), column by column.
Eigen::MatrixXd demean_restore(const Eigen::MatrixXd& X, const std::vector<int>& groups);

// Drops groups with a single row (returns the kept row positions).
std::vector<std::size_t> drop_singletons(const std::vector<int>& groups, std::vector<std::string>* warnings,
                                         const std::vector<std::string>& labels);

// Pooled OLS over complete rows (intercept per spec, no group effects).
RegressionFit pooled_ols(const data::PanelDataset& panel, const ModelSpec& spec);

// One-way within estimator. Slopes equal the dummy-variable (LSDV) slopes;
// the reported constant is the grand-mean intercept and R^2 is the within
// R^2. Singleton groups are dropped with a warning.
RegressionFit within_fe(const data::PanelDataset& panel, const ModelSpec& spec);

// within_fe when the spec has a fixed effect, pooled_ols otherwise.
RegressionFit fit_linear(const data::PanelDataset& panel, const ModelSpec& spec);

}  // namespace fxrca::econ
