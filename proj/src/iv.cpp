#include "fxrca/iv.hpp"

#include <cmath>
#include <map>
#include <set>

#include "fxrca/error.hpp"
#include "fxrca/stats.hpp"

namespace fxrca::econ {

namespace {

Eigen::MatrixXd hcat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

template <typename T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Residuals of every column of A after projection on W.
Eigen::MatrixXd partial_out(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W) {
  if (W.cols() == 0) return A;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
  return A - W * qr.solve(A);
}

double cap(double value, bool& capped) {
  if (!std::isfinite(value) || value > kStatisticCap) {
    capped = true;
    return kStatisticCap;
  }
  return std::max(0.0, value);
}

}  // namespace

IvDiagnostics iv_diagnostics(const Eigen::VectorXd& endog, const Eigen::MatrixXd& instruments,
                             const Eigen::MatrixXd& exog, std::size_t absorbed, DiagnosticVariance variance,
                             const std::vector<int>& clusters) {
  const auto n = endog.size();
  const auto l2 = instruments.cols();
  if (l2 < 1) throw ConfigError("iv diagnostics need at least one excluded instrument");
  const double df_d = static_cast<double>(n) - static_cast<double>(exog.cols() + l2) - static_cast<double>(absorbed);
  if (df_d <= 0) throw EstimationError("iv diagnostics: not enough observations");

  const Eigen::VectorXd x = partial_out(endog, exog);
  const Eigen::MatrixXd Z = partial_out(instruments, exog);
  const double sxx = x.squaredNorm();
  if (!(sxx > 0.0)) throw IdentificationError("endogenous regressor has no variation beyond the exogenous columns");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  const Eigen::VectorXd pi = qr.solve(x);
  const Eigen::VectorXd e = x - Z * pi;
  const double rss = e.squaredNorm();
  const double ess = std::max(0.0, sxx - rss);
  const double N = static_cast<double>(n);
  const bool perfect = rss <= 1e-14 * sxx;

  IvDiagnostics d;
  d.excluded_instruments = static_cast<int>(l2);
  d.anderson_lm = cap(N * ess / sxx, d.capped);
  d.cragg_donald_f = perfect ? cap(INFINITY, d.capped) : cap((ess / l2) / (rss / df_d), d.capped);

  const Eigen::MatrixXd ZtZ = Z.transpose() * Z;
  const Eigen::MatrixXd bread = ZtZ.ldlt().solve(Eigen::MatrixXd::Identity(l2, l2));
  Eigen::MatrixXd meat(l2, l2), meat0(l2, l2);
  switch (variance) {
    case DiagnosticVariance::homoskedastic:
      meat = (rss / df_d) * ZtZ;
      meat0 = (sxx / N) * ZtZ;
      break;
    case DiagnosticVariance::robust: {
      meat.setZero();
      meat0.setZero();
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd z = Z.row(i).transpose();
        meat += (e(i) * e(i)) * z * z.transpose();
        meat0 += (x(i) * x(i)) * z * z.transpose();
      }
      meat *= N / df_d;
      break;
    }
    case DiagnosticVariance::cluster: {
      if (clusters.size() != static_cast<std::size_t>(n))
        throw EstimationError("cluster ids must have one entry per observation");
      std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> sums;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] =
            sums.try_emplace(clusters[i], Eigen::VectorXd::Zero(l2), Eigen::VectorXd::Zero(l2));
        it->second.first += Z.row(i).transpose() * e(i);
        it->second.second += Z.row(i).transpose() * x(i);
      }
      const double g = static_cast<double>(sums.size());
      if (g < 2) throw EstimationError("cluster-robust diagnostics need at least 2 clusters");
      meat.setZero();
      meat0.setZero();
      for (const auto& [id, s] : sums) {
        meat += s.first * s.first.transpose();
        meat0 += s.second * s.second.transpose();
      }
      meat *= g / (g - 1.0) * (N - 1.0) / df_d;
      break;
    }
  }

  if (perfect) {
    d.kp_wald_rk_f = cap(INFINITY, d.capped);
  } else {
    const Eigen::MatrixXd V = bread * meat * bread;
    const double wald = pi.dot(V.ldlt().solve(pi));
    d.kp_wald_rk_f = cap(wald / static_cast<double>(l2), d.capped);
  }
  const Eigen::VectorXd s = Z.transpose() * x;
  const auto meat0_ldlt = meat0.ldlt();
  d.kp_rk_lm = meat0_ldlt.info() == Eigen::Success ? cap(s.dot(meat0_ldlt.solve(s)), d.capped) : cap(INFINITY, d.capped);
  // A perfect first stage leaves no score variance to estimate: report the cap.
  if (perfect && variance != DiagnosticVariance::homoskedastic) d.kp_rk_lm = cap(INFINITY, d.capped);

  d.anderson_p = stats::chi2_pvalue(d.anderson_lm, static_cast<double>(l2));
  d.kp_rk_lm_p = stats::chi2_pvalue(d.kp_rk_lm, static_cast<double>(l2));
  d.first_stage_f_p = stats::f_pvalue(d.cragg_donald_f, static_cast<double>(l2), df_d);
  return d;
}

IvResult two_sls(const Eigen::VectorXd& y, const Eigen::MatrixXd& endog, const Eigen::MatrixXd& instruments,
                 const Eigen::MatrixXd& exog, const std::string& endog_name,
                 const std::vector<std::string>& instrument_names, const std::vector<std::string>& exog_names,
                 const IvOptions& opts) {
  if (endog.cols() != 1)
    throw ConfigError("two_sls supports exactly one endogenous regressor (got " + std::to_string(endog.cols()) + ")");
  if (instruments.cols() < 1) throw ConfigError("two_sls needs at least one excluded instrument");
  if (instrument_names.size() != static_cast<std::size_t>(instruments.cols()) ||
      exog_names.size() != static_cast<std::size_t>(exog.cols()))
    throw EstimationError("two_sls: one name per column required");

  // Exogenous columns first so a collinear instrument is the one named.
  const Eigen::MatrixXd first_X = hcat(exog, instruments);
  const auto first_names = concat(exog_names, instrument_names);
  const int bad = first_collinear_column(first_X);
  if (bad >= 0) {
    const auto& name = first_names[static_cast<std::size_t>(bad)];
    throw CollinearityError(name, "instrument set is rank deficient: '" + name + "' is collinear with earlier columns");
  }

  IvResult result;
  const Eigen::VectorXd x = endog.col(0);
  result.diagnostics.first_stage =
      ols(x, hcat(instruments, exog), concat(instrument_names, exog_names), opts.variance);
  result.diagnostics.first_stage.estimator = "first_stage";
  const Eigen::VectorXd xhat = result.diagnostics.first_stage.fitted;

  const auto names = concat(std::vector<std::string>{endog_name}, exog_names);
  const Eigen::MatrixXd Xhat = hcat(xhat, exog);
  const Eigen::MatrixXd X = hcat(x, exog);
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  if (n <= p + opts.variance.absorbed) throw EstimationError("two_sls: too few observations");

  const Eigen::VectorXd inv_norms = Xhat.colwise().norm().transpose().cwiseInverse();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xhat * inv_norms.asDiagonal());
  const Eigen::VectorXd beta = inv_norms.asDiagonal() * qr.solve(y);
  const Eigen::MatrixXd bread = xtx_inverse(Xhat, names);

  RegressionFit& fit = result.second_stage;
  fit.estimator = "2sls";
  fit.n_obs = n;
  fit.n_params = p + opts.variance.absorbed;
  fit.fitted = X * beta;
  fit.residuals = y - fit.fitted;
  fit.ssr = fit.residuals.squaredNorm();
  fit.df_resid = static_cast<double>(n - p - opts.variance.absorbed);
  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  fit.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 0.0;
  double df = fit.df_resid;
  if (opts.variance.se_type == SeType::cluster) {
    fit.covariance = cluster_covariance(Xhat, fit.residuals, bread, opts.variance.clusters, p);
    fit.se_type = "cluster";
    df = static_cast<double>(count_clusters(opts.variance.clusters)) - 1.0;
  } else {
    fit.covariance = (fit.ssr / fit.df_resid) * bread;
  }
  finalize_terms(fit, beta, names, df);

  result.diagnostics = [&] {
    auto diag = iv_diagnostics(x, instruments, exog, opts.variance.absorbed, opts.diagnostic_variance,
                               opts.variance.clusters);
    diag.first_stage = std::move(result.diagnostics.first_stage);
    return diag;
  }();
  fit.extra["anderson_lm"] = result.diagnostics.anderson_lm;
  fit.extra["kp_rk_lm"] = result.diagnostics.kp_rk_lm;
  fit.extra["cragg_donald_f"] = result.diagnostics.cragg_donald_f;
  fit.extra["kp_wald_rk_f"] = result.diagnostics.kp_wald_rk_f;
  return result;
}

IvResult iv_panel(const data::PanelDataset& panel, const IvPanelSpec& spec) {
  data::PanelDataset p = panel;
  for (const auto& z : spec.instruments)
    if (!p.has_column(z) && (z == "tool" || z == "l_tool")) {
      p = data::build_instrument(p);
      break;
    }
  auto exog_cols = spec.exogenous;
  if (spec.time_trend) exog_cols.push_back("year");

  auto needed = concat(std::vector<std::string>{spec.outcome, spec.endogenous}, spec.instruments);
  needed = concat(needed, exog_cols);
  for (const auto& c : needed)
    if (!p.has_column(c)) throw DataError("iv: column '" + c + "' is not in the panel");
  if (spec.se_type == SeType::cluster && !spec.cluster) throw ConfigError("cluster standard errors require a cluster key");

  auto sub = p.select_rows(complete_rows(p, needed));
  std::vector<std::string> warnings;
  std::vector<int> groups;
  if (spec.fixed_effect) {
    const auto ids = group_ids(sub, *spec.fixed_effect);
    std::vector<std::string> labels(sub.rows());
    for (std::size_t i = 0; i < sub.rows(); ++i) labels[i] = sub.provinces()[i];
    const auto keep = drop_singletons(ids, &warnings, labels);
    if (keep.size() != sub.rows()) sub = sub.select_rows(keep);
    groups = group_ids(sub, *spec.fixed_effect);
  }
  const auto n = static_cast<Eigen::Index>(sub.rows());
  if (n == 0) throw EstimationError("iv: no complete rows");

  auto matrix_of = [&](const std::vector<std::string>& cols) {
    Eigen::MatrixXd M(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto v = sub.values(cols[j]);
      M.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    }
    return M;
  };
  Eigen::MatrixXd Y = matrix_of({spec.outcome});
  Eigen::MatrixXd X = matrix_of({spec.endogenous});
  Eigen::MatrixXd Z = matrix_of(spec.instruments);
  Eigen::MatrixXd W = matrix_of(exog_cols);

  std::size_t absorbed = 0;
  std::size_t n_groups = 0;
  if (spec.fixed_effect) {
    Y = demean_restore(Y, groups);
    X = demean_restore(X, groups);
    Z = demean_restore(Z, groups);
    W = demean_restore(W, groups);
    n_groups = std::set<int>(groups.begin(), groups.end()).size();
    absorbed = n_groups - 1;
  }
  W = hcat(W, Eigen::VectorXd::Ones(n));
  exog_cols.push_back("_cons");

  IvOptions opts;
  opts.variance.se_type = spec.se_type;
  opts.variance.absorbed = absorbed;
  if (spec.se_type == SeType::cluster) {
    opts.variance.clusters = group_ids(sub, *spec.cluster);
    opts.diagnostic_variance = DiagnosticVariance::cluster;
  }
  auto result = two_sls(Y.col(0), X, Z, W, spec.endogenous, spec.instruments, exog_cols, opts);
  for (RegressionFit* f : {&result.second_stage, &result.diagnostics.first_stage}) {
    f->n_groups = n_groups;
    f->warnings = warnings;
    if (spec.fixed_effect) f->r_squared_kind = "within";
  }
  return result;
}

}  // namespace fxrca::econ
