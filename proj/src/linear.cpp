#include "fxrca/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "fxrca/error.hpp"
#include "fxrca/stats.hpp"

namespace fxrca::econ {

namespace {

constexpr double kRankTolerance = 1e-9;

Eigen::VectorXd column_norms(const Eigen::MatrixXd& X) {
  Eigen::VectorXd norms = X.colwise().norm().transpose();
  return norms;
}

}  // namespace

SeType parse_se_type(const std::string& text) {
  if (text == "homoskedastic") return SeType::homoskedastic;
  if (text == "cluster") return SeType::cluster;
  throw ConfigError("unknown standard-error type '" + text + "' (expected homoskedastic or cluster)");
}

std::string to_string(SeType se) { return se == SeType::cluster ? "cluster" : "homoskedastic"; }

bool RegressionFit::has(const std::string& name) const {
  return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.name == name; });
}

const Term& RegressionFit::term(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return t;
  throw EstimationError("fit has no term '" + name + "'");
}

int first_collinear_column(const Eigen::MatrixXd& X) {
  const auto p = X.cols();
  const Eigen::VectorXd norms = column_norms(X);
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(norms(j) > 0.0) || !std::isfinite(norms(j))) return static_cast<int>(j);
  const Eigen::MatrixXd Xs = X * norms.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs.rows(), Xs.cols());
  qr.setThreshold(kRankTolerance);
  qr.compute(Xs);
  if (qr.rank() == p) return -1;
  for (Eigen::Index j = 1; j < p; ++j) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> sub(Xs.rows(), j + 1);
    sub.setThreshold(kRankTolerance);
    sub.compute(Xs.leftCols(j + 1));
    if (sub.rank() < j + 1) return static_cast<int>(j);
  }
  return static_cast<int>(p - 1);
}

namespace {

void require_full_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  const int bad = first_collinear_column(X);
  if (bad < 0) return;
  const auto& name = names.at(static_cast<std::size_t>(bad));
  throw CollinearityError(name, "column '" + name + "' is collinear with the preceding design columns");
}

}  // namespace

Eigen::MatrixXd xtx_inverse(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  require_full_rank(X, names);
  const Eigen::VectorXd inv_norms = column_norms(X).cwiseInverse();
  const Eigen::MatrixXd Xs = X * inv_norms.asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  const auto p = X.cols();
  const Eigen::MatrixXd R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const auto& P = qr.colsPermutation();
  const Eigen::MatrixXd inv_s = P * (Rinv * Rinv.transpose()) * P.transpose();
  return inv_norms.asDiagonal() * inv_s * inv_norms.asDiagonal();
}

std::size_t count_clusters(const std::vector<int>& clusters) {
  return std::set<int>(clusters.begin(), clusters.end()).size();
}

Eigen::MatrixXd cluster_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                   const Eigen::MatrixXd& bread, const std::vector<int>& clusters,
                                   std::size_t n_params) {
  if (clusters.size() != static_cast<std::size_t>(X.rows()))
    throw EstimationError("cluster ids must have one entry per observation");
  std::map<int, Eigen::VectorXd> scores;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    auto [it, inserted] = scores.try_emplace(clusters[i], Eigen::VectorXd::Zero(X.cols()));
    it->second += X.row(i).transpose() * resid(i);
  }
  const double g = static_cast<double>(scores.size());
  if (g < 2) throw EstimationError("cluster-robust variance needs at least 2 clusters");
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  for (const auto& [id, s] : scores) meat += s * s.transpose();
  const double n = static_cast<double>(X.rows());
  const double k = static_cast<double>(n_params);
  const double factor = g / (g - 1.0) * (n - 1.0) / (n - k);
  return factor * bread * meat * bread;
}

void finalize_terms(RegressionFit& fit, const Eigen::VectorXd& beta, const std::vector<std::string>& names,
                    double df, bool normal_reference) {
  fit.terms.clear();
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Term t;
    t.name = names.at(static_cast<std::size_t>(j));
    t.estimate = beta(j);
    t.std_error = std::sqrt(std::max(0.0, fit.covariance(j, j)));
    t.stat = t.std_error > 0.0 ? t.estimate / t.std_error : std::numeric_limits<double>::infinity();
    t.p_value = normal_reference ? 2.0 * (1.0 - stats::normal_cdf(std::abs(t.stat)))
                                 : stats::student_t_pvalue(t.stat, df);
    fit.terms.push_back(t);
  }
  fit.stat_kind = normal_reference ? "z" : "t";
}

RegressionFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                  const VarianceOptions& opts) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  if (names.size() != p) throw EstimationError("ols: one name per design column required");
  if (static_cast<std::size_t>(y.size()) != n) throw EstimationError("ols: outcome length mismatch");
  if (n <= p + opts.absorbed)
    throw EstimationError("ols: " + std::to_string(n) + " observations cannot identify " +
                          std::to_string(p + opts.absorbed) + " parameters");
  require_full_rank(X, names);

  const Eigen::VectorXd inv_norms = column_norms(X).cwiseInverse();
  const Eigen::MatrixXd Xs = X * inv_norms.asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  const Eigen::VectorXd beta = inv_norms.asDiagonal() * qr.solve(y);

  RegressionFit fit;
  fit.estimator = "ols";
  fit.n_obs = n;
  fit.n_params = p + opts.absorbed;
  fit.fitted = X * beta;
  fit.residuals = y - fit.fitted;
  fit.ssr = fit.residuals.squaredNorm();
  fit.df_resid = static_cast<double>(n - p - opts.absorbed);

  const double sst = opts.centered_r2 ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
  fit.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 0.0;
  fit.r_squared_kind = opts.centered_r2 ? "centered" : "uncentered";

  const Eigen::MatrixXd bread = xtx_inverse(X, names);
  double df = fit.df_resid;
  if (opts.se_type == SeType::cluster) {
    fit.covariance = cluster_covariance(X, fit.residuals, bread, opts.clusters, p);
    fit.se_type = "cluster";
    df = static_cast<double>(count_clusters(opts.clusters)) - 1.0;
  } else {
    fit.covariance = (fit.ssr / fit.df_resid) * bread;
  }
  finalize_terms(fit, beta, names, df);
  return fit;
}

void ModelSpec::validate(const data::PanelDataset& panel) const {
  if (!panel.has_column(outcome)) throw DataError("model outcome '" + outcome + "' is not a panel column");
  for (const auto& r : regressors)
    if (!panel.has_column(r)) throw DataError("regressor '" + r + "' is not a panel column");
  if (fixed_effect && *fixed_effect != "province" && !panel.has_column(*fixed_effect))
    throw DataError("fixed-effect key '" + *fixed_effect + "' is not a panel column");
  if (se_type == SeType::cluster) {
    if (!cluster) throw ConfigError("cluster standard errors require a cluster key");
    if (*cluster != "province" && !panel.has_column(*cluster))
      throw DataError("cluster key '" + *cluster + "' is not a panel column");
  }
}

std::vector<int> group_ids(const data::PanelDataset& panel, const std::string& key) {
  std::vector<int> out(panel.rows());
  if (key == "province") {
    std::map<std::string, int> ids;
    for (const auto& p : panel.distinct_provinces()) ids.emplace(p, static_cast<int>(ids.size()));
    for (std::size_t i = 0; i < panel.rows(); ++i) out[i] = ids.at(panel.provinces()[i]);
    return out;
  }
  const auto values = panel.values(key);
  std::map<double, int> ids;
  for (double v : values) {
    if (std::isnan(v)) throw DataError("group key '" + key + "' has missing values");
    ids.emplace(v, 0);
  }
  int next = 0;
  for (auto& [v, id] : ids) id = next++;
  for (std::size_t i = 0; i < panel.rows(); ++i) out[i] = ids.at(values[i]);
  return out;
}

std::vector<std::size_t> complete_rows(const data::PanelDataset& panel, const std::vector<std::string>& columns) {
  std::vector<std::vector<double>> cols;
  for (const auto& c : columns) cols.push_back(panel.values(c));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    bool ok = true;
    for (const auto& c : cols) ok = ok && !std::isnan(c[i]);
    if (ok) out.push_back(i);
  }
  return out;
}

std::vector<std::string> design_columns(const ModelSpec& spec) {
  auto cols = spec.regressors;
  if (spec.time_trend && std::find(cols.begin(), cols.end(), "year") == cols.end()) cols.push_back("year");
  return cols;
}

Eigen::MatrixXd demean_restore(const Eigen::MatrixXd& X, const std::vector<int>& groups) {
  const auto n = X.rows();
  std::map<int, std::pair<Eigen::VectorXd, double>> sums;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, inserted] = sums.try_emplace(groups[i], Eigen::VectorXd::Zero(X.cols()), 0.0);
    it->second.first += X.row(i).transpose();
    it->second.second += 1.0;
  }
  const Eigen::RowVectorXd grand = X.colwise().mean();
  Eigen::MatrixXd out(n, X.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [sum, count] = sums.at(groups[i]);
    out.row(i) = X.row(i) - (sum / count).transpose() + grand;
  }
  return out;
}

std::vector<std::size_t> drop_singletons(const std::vector<int>& groups, std::vector<std::string>* warnings,
                                         const std::vector<std::string>& labels) {
  std::map<int, std::size_t> counts;
  for (int g : groups) ++counts[g];
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (counts[groups[i]] >= 2) {
      keep.push_back(i);
    } else if (warnings) {
      warnings->push_back("dropped singleton fixed-effect group '" + labels[i] + "'");
    }
  }
  return keep;
}

namespace {

struct Assembled {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  std::vector<int> clusters;
  std::vector<int> groups;
  std::vector<std::string> warnings;
};

Assembled assemble(const data::PanelDataset& panel, const ModelSpec& spec, bool with_groups) {
  spec.validate(panel);
  const auto cols = design_columns(spec);
  auto needed = cols;
  needed.push_back(spec.outcome);
  auto rows = complete_rows(panel, needed);
  auto sub = panel.select_rows(rows);

  Assembled a;
  if (with_groups) {
    auto groups = group_ids(sub, *spec.fixed_effect);
    std::vector<std::string> labels(sub.rows());
    for (std::size_t i = 0; i < sub.rows(); ++i)
      labels[i] = *spec.fixed_effect == "province" ? sub.provinces()[i]
                                                   : std::to_string(sub.values(*spec.fixed_effect)[i]);
    const auto keep = drop_singletons(groups, &a.warnings, labels);
    if (keep.size() != sub.rows()) sub = sub.select_rows(keep);
    a.groups = group_ids(sub, *spec.fixed_effect);
  }

  const auto n = static_cast<Eigen::Index>(sub.rows());
  const auto outcome = sub.values(spec.outcome);
  a.y = Eigen::Map<const Eigen::VectorXd>(outcome.data(), n);
  a.X.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const auto v = sub.values(cols[j]);
    a.X.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }
  a.names = cols;
  if (spec.se_type == SeType::cluster) a.clusters = group_ids(sub, *spec.cluster);
  return a;
}

Eigen::MatrixXd append_constant(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out(X.rows(), X.cols() + 1);
  out << X, Eigen::VectorXd::Ones(X.rows());
  return out;
}

}  // namespace

RegressionFit pooled_ols(const data::PanelDataset& panel, const ModelSpec& spec) {
  auto a = assemble(panel, spec, false);
  if (spec.intercept) {
    a.X = append_constant(a.X);
    a.names.push_back("_cons");
  }
  VarianceOptions opts;
  opts.se_type = spec.se_type;
  opts.clusters = a.clusters;
  opts.centered_r2 = spec.intercept;
  auto fit = ols(a.y, a.X, a.names, opts);
  fit.estimator = "ols";
  return fit;
}

RegressionFit within_fe(const data::PanelDataset& panel, const ModelSpec& spec) {
  if (!spec.fixed_effect) throw ConfigError("within_fe requires a fixed-effect key");
  auto a = assemble(panel, spec, true);
  const auto n_groups = std::set<int>(a.groups.begin(), a.groups.end()).size();
  if (n_groups == 0) throw EstimationError("within_fe: no groups with at least two observations");

  const Eigen::VectorXd y = demean_restore(a.y, a.groups);
  const Eigen::MatrixXd X = append_constant(demean_restore(a.X, a.groups));
  a.names.push_back("_cons");

  VarianceOptions opts;
  opts.se_type = spec.se_type;
  opts.clusters = a.clusters;
  opts.absorbed = n_groups - 1;
  auto fit = ols(y, X, a.names, opts);
  fit.estimator = "fe";
  fit.n_groups = n_groups;
  fit.r_squared_kind = "within";
  fit.warnings = std::move(a.warnings);
  return fit;
}

RegressionFit fit_linear(const data::PanelDataset& panel, const ModelSpec& spec) {
  return spec.fixed_effect ? within_fe(panel, spec) : pooled_ols(panel, spec);
}

}  // namespace fxrca::econ
