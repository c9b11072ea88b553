#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fxrca/panel.hpp"
#include "fxrca/regression.hpp"

namespace fxrca::econ {

struct TobitOptions {
  double lower = 0.0;
  double upper = 2.0;
  int max_iter = 200;
  double grad_tol = 1e-8;
};

// Two-sided censored-normal log-likelihood in theta = (beta, log sigma).
// Observations at or below `lower` (at or above `upper`) count as censored.
class TobitObjective {
 public:
  TobitObjective(Eigen::VectorXd y, Eigen::MatrixXd X, double lower, double upper);

  double value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const;

  int n_left() const { return n_left_; }
  int n_right() const { return n_right_; }
  int n_uncensored() const { return static_cast<int>(y_.size()) - n_left_ - n_right_; }

 private:
  enum class Kind { left, interior, right };
  Eigen::VectorXd y_;
  Eigen::MatrixXd X_;
  double lower_, upper_;
  std::vector<Kind> kind_;
  int n_left_ = 0, n_right_ = 0;
};

// log Phi(u) and phi(u)/Phi(u), stable far into the left tail.
double log_normal_cdf(double u);
double inverse_mills(double u);

// Maximum-likelihood Tobit. Terms are the columns of X plus an ancillary
// "sigma" term (delta-method SE). Reports log-likelihood, censoring counts
// (extra: n_left, n_right, n_uncensored), iterations and the gradient norm of
// the mean log-likelihood in standardized coordinates.
RegressionFit tobit_mle(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                        const TobitOptions& opts = {});

// Pooled Tobit on a panel: regressors, optional trend, one indicator per
// fixed-effect level except the first (named "<key>=<level>"), and "_cons".
RegressionFit tobit_panel(const data::PanelDataset& panel, const ModelSpec& spec, const TobitOptions& opts = {});

}  // namespace fxrca::econ
