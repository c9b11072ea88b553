#include "fxrca/tobit.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "fxrca/error.hpp"
#include "fxrca/kv_config.hpp"
#include "fxrca/stats.hpp"

namespace fxrca::econ {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

double log_normal_cdf(double u) {
  if (u > -30.0) return std::log(0.5 * std::erfc(-u / std::sqrt(2.0)));
  // Asymptotic series of the Mills ratio.
  const double u2 = u * u;
  return -0.5 * u2 - kLogSqrt2Pi - std::log(-u) + std::log1p(-1.0 / u2 + 3.0 / (u2 * u2));
}

double inverse_mills(double u) {
  if (u > -30.0) {
    const double phi = std::exp(-0.5 * u * u - kLogSqrt2Pi);
    return phi / (0.5 * std::erfc(-u / std::sqrt(2.0)));
  }
  const double u2 = u * u;
  return -u / (1.0 - 1.0 / u2 + 3.0 / (u2 * u2));
}

TobitObjective::TobitObjective(Eigen::VectorXd y, Eigen::MatrixXd X, double lower, double upper)
    : y_(std::move(y)), X_(std::move(X)), lower_(lower), upper_(upper) {
  if (!(lower_ < upper_)) throw ConfigError("tobit: lower limit must be below upper limit");
  kind_.resize(static_cast<std::size_t>(y_.size()));
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_(i) <= lower_) {
      kind_[i] = Kind::left;
      ++n_left_;
    } else if (y_(i) >= upper_) {
      kind_[i] = Kind::right;
      ++n_right_;
    } else {
      kind_[i] = Kind::interior;
    }
  }
}

double TobitObjective::value(const Eigen::VectorXd& theta) const {
  const auto k = X_.cols();
  const double eta = theta(k);
  const double inv_sigma = std::exp(-eta);
  const Eigen::VectorXd xb = X_ * theta.head(k);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    switch (kind_[i]) {
      case Kind::interior: {
        const double z = (y_(i) - xb(i)) * inv_sigma;
        ll += -kLogSqrt2Pi - eta - 0.5 * z * z;
        break;
      }
      case Kind::left: ll += log_normal_cdf((lower_ - xb(i)) * inv_sigma); break;
      case Kind::right: ll += log_normal_cdf((xb(i) - upper_) * inv_sigma); break;
    }
  }
  return ll;
}

Eigen::VectorXd TobitObjective::gradient(const Eigen::VectorXd& theta) const {
  const auto k = X_.cols();
  const double inv_sigma = std::exp(-theta(k));
  const Eigen::VectorXd xb = X_ * theta.head(k);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(k + 1);
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    double d_xb = 0.0, d_eta = 0.0;
    switch (kind_[i]) {
      case Kind::interior: {
        const double z = (y_(i) - xb(i)) * inv_sigma;
        d_xb = z * inv_sigma;
        d_eta = z * z - 1.0;
        break;
      }
      case Kind::left: {
        const double u = (lower_ - xb(i)) * inv_sigma;
        const double lam = inverse_mills(u);
        d_xb = -lam * inv_sigma;
        d_eta = -lam * u;
        break;
      }
      case Kind::right: {
        const double u = (xb(i) - upper_) * inv_sigma;
        const double lam = inverse_mills(u);
        d_xb = lam * inv_sigma;
        d_eta = -lam * u;
        break;
      }
    }
    g.head(k) += d_xb * X_.row(i).transpose();
    g(k) += d_eta;
  }
  return g;
}

Eigen::MatrixXd TobitObjective::hessian(const Eigen::VectorXd& theta) const {
  const auto k = X_.cols();
  const double inv_sigma = std::exp(-theta(k));
  const Eigen::VectorXd xb = X_ * theta.head(k);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    const auto x = X_.row(i).transpose();
    // Second derivatives with respect to (xb, eta); chain to beta via x.
    double h_bb = 0.0, h_be = 0.0, h_ee = 0.0;
    switch (kind_[i]) {
      case Kind::interior: {
        const double z = (y_(i) - xb(i)) * inv_sigma;
        h_bb = -inv_sigma * inv_sigma;
        h_be = -2.0 * z * inv_sigma;
        h_ee = -2.0 * z * z;
        break;
      }
      case Kind::left:
      case Kind::right: {
        // l = log Phi(u); u = s (xb - c) e^{-eta} with s = -1 (left) or +1 (right).
        const double s = kind_[i] == Kind::left ? -1.0 : 1.0;
        const double c = kind_[i] == Kind::left ? lower_ : upper_;
        const double u = s * (xb(i) - c) * inv_sigma;
        const double lam = inverse_mills(u);
        const double curv = -lam * (u + lam);
        const double du_b = s * inv_sigma, du_e = -u;
        h_bb = curv * du_b * du_b;
        h_be = curv * du_b * du_e + lam * (-du_b);
        h_ee = curv * du_e * du_e + lam * u;
        break;
      }
    }
    H.topLeftCorner(k, k) += h_bb * x * x.transpose();
    H.col(k).head(k) += h_be * x;
    H(k, k) += h_ee;
  }
  H.row(k).head(k) = H.col(k).head(k).transpose();
  return H;
}

RegressionFit tobit_mle(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                        const TobitOptions& opts) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (static_cast<std::size_t>(k) != names.size()) throw EstimationError("tobit: one name per column required");
  const TobitObjective objective(y, X, opts.lower, opts.upper);
  if (objective.n_uncensored() == 0) throw EstimationError("tobit: every observation is censored");
  if (n <= k + 1) throw EstimationError("tobit: too few observations for the parameter count");

  // Starting values and the standardization scale come from OLS.
  const RegressionFit start = ols(y, X, names);
  const Eigen::VectorXd scale_b = (X.colwise().norm().transpose() / std::sqrt(static_cast<double>(n))).cwiseInverse();
  Eigen::VectorXd scale(k + 1);
  scale << scale_b, 1.0;

  Eigen::VectorXd theta(k + 1);
  for (Eigen::Index j = 0; j < k; ++j) theta(j) = start.terms[j].estimate;
  theta(k) = std::log(std::max(std::sqrt(start.ssr / static_cast<double>(n)), 1e-8));

  const double inv_n = 1.0 / static_cast<double>(n);
  auto f = [&](const Eigen::VectorXd& t) { return objective.value(t) * inv_n; };
  auto grad_s = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    return scale.cwiseProduct(objective.gradient(t)) * inv_n;
  };

  RegressionFit fit;
  fit.estimator = "tobit";
  double fval = f(theta);
  Eigen::VectorXd g = grad_s(theta);
  fit.objective_trace.push_back(fval * static_cast<double>(n));
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(k + 1, k + 1);
  int iter = 0;
  bool converged = g.norm() < opts.grad_tol;
  // BFGS first; if it stalls short of the tolerance the remaining iterations
  // take Newton steps on the analytic Hessian.
  bool polish = false;
  auto newton_direction = [&](const Eigen::VectorXd& t) -> Eigen::VectorXd {
    const Eigen::MatrixXd Hs = scale.asDiagonal() * objective.hessian(t) * scale.asDiagonal() * inv_n;
    Eigen::LLT<Eigen::MatrixXd> llt(-Hs);
    if (llt.info() != Eigen::Success) return Hinv * g;
    return llt.solve(g);
  };

  while (!converged && iter < opts.max_iter) {
    ++iter;
    Eigen::VectorXd dir = polish ? newton_direction(theta) : Eigen::VectorXd(Hinv * g);
    if (g.dot(dir) <= 0.0) {
      dir = g;
      Hinv.setIdentity();
    }

    double step = 1.0;
    Eigen::VectorXd next;
    double fnext = -std::numeric_limits<double>::infinity();
    for (int ls = 0; ls < 60; ++ls) {
      next = theta + step * scale.cwiseProduct(dir);
      fnext = f(next);
      if (std::isfinite(fnext) && fnext >= fval + 1e-4 * step * g.dot(dir)) break;
      step *= 0.5;
    }
    if (!(std::isfinite(fnext) && fnext >= fval)) {
      if (polish) break;
      polish = true;
      continue;
    }

    const Eigen::VectorXd g_next = grad_s(next);
    const Eigen::VectorXd s_vec = step * dir;
    const Eigen::VectorXd y_vec = g - g_next;  // ascent: curvature of -f
    const double sy = s_vec.dot(y_vec);
    if (sy > 1e-14) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k + 1, k + 1);
      Hinv = (I - rho * s_vec * y_vec.transpose()) * Hinv * (I - rho * y_vec * s_vec.transpose()) +
             rho * s_vec * s_vec.transpose();
    }
    const double change = std::abs(fnext - fval);
    theta = next;
    fval = fnext;
    g = g_next;
    fit.objective_trace.push_back(fval * static_cast<double>(n));
    converged = g.norm() < opts.grad_tol;
    // Stall: no measurable progress, or half the budget spent.
    if (!converged && !polish && (change <= 1e-13 * std::max(1.0, std::abs(fval)) || iter >= opts.max_iter / 2))
      polish = true;
  }

  fit.iterations = iter;
  fit.gradient_norm = g.norm();
  fit.converged = converged;
  if (!converged)
    fit.warnings.push_back("tobit optimizer stopped after " + std::to_string(iter) +
                           " iterations without meeting the gradient tolerance");

  const Eigen::MatrixXd H = objective.hessian(theta);
  Eigen::MatrixXd cov_full;
  {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-H);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
      throw EstimationError("tobit: information matrix is not positive definite at the optimum");
    cov_full = ldlt.solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
  }

  const double sigma = std::exp(theta(k));
  Eigen::VectorXd est(k + 1);
  est << theta.head(k), sigma;
  fit.covariance = cov_full;
  // Delta method for sigma = exp(eta).
  fit.covariance.row(k) *= sigma;
  fit.covariance.col(k) *= sigma;
  auto all_names = names;
  all_names.push_back("sigma");
  finalize_terms(fit, est, all_names, 0.0, true);

  fit.n_obs = static_cast<std::size_t>(n);
  fit.n_params = static_cast<std::size_t>(k + 1);
  fit.df_resid = static_cast<double>(n - k - 1);
  fit.log_likelihood = objective.value(theta);
  fit.fitted = X * theta.head(k);
  fit.residuals = y - fit.fitted;
  fit.ssr = fit.residuals.squaredNorm();
  fit.r_squared_kind = "none";
  fit.r_squared = std::numeric_limits<double>::quiet_NaN();
  fit.extra["n_left"] = objective.n_left();
  fit.extra["n_right"] = objective.n_right();
  fit.extra["n_uncensored"] = objective.n_uncensored();
  fit.extra["lower"] = opts.lower;
  fit.extra["upper"] = opts.upper;
  return fit;
}

RegressionFit tobit_panel(const data::PanelDataset& panel, const ModelSpec& spec, const TobitOptions& opts) {
  spec.validate(panel);
  auto cols = design_columns(spec);
  auto needed = cols;
  needed.push_back(spec.outcome);
  const auto sub = panel.select_rows(complete_rows(panel, needed));
  const auto n = static_cast<Eigen::Index>(sub.rows());
  if (n == 0) throw EstimationError("tobit: no complete rows");

  std::vector<int> groups;
  std::vector<std::string> levels;
  if (spec.fixed_effect) {
    groups = group_ids(sub, *spec.fixed_effect);
    std::map<int, std::string> label;
    for (std::size_t i = 0; i < sub.rows(); ++i)
      label.emplace(groups[i], *spec.fixed_effect == "province" ? sub.provinces()[i]
                                                                : format_double(sub.values(*spec.fixed_effect)[i]));
    for (const auto& [id, name] : label) levels.push_back(name);
  }
  const auto n_dummies = levels.empty() ? 0 : static_cast<Eigen::Index>(levels.size() - 1);

  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()) + n_dummies + 1);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto v = sub.values(cols[j]);
    X.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }
  auto names = cols;
  for (Eigen::Index d = 0; d < n_dummies; ++d) {
    const auto c = static_cast<Eigen::Index>(cols.size()) + d;
    for (Eigen::Index i = 0; i < n; ++i) X(i, c) = groups[i] == d + 1 ? 1.0 : 0.0;
    names.push_back(*spec.fixed_effect + "=" + levels[static_cast<std::size_t>(d + 1)]);
  }
  X.col(X.cols() - 1).setOnes();
  names.push_back("_cons");

  const auto outcome = sub.values(spec.outcome);
  auto fit = tobit_mle(Eigen::Map<const Eigen::VectorXd>(outcome.data(), n), X, names, opts);
  fit.n_groups = levels.size();
  return fit;
}

}  // namespace fxrca::econ
