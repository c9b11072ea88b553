#include "fxrca/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "fxrca/error.hpp"
#include "fxrca/kv_config.hpp"

namespace fxrca::stats {

namespace {

void require_nonempty(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw DomainError(std::string(what) + ": empty sample");
}

}  // namespace

double mean(std::span<const double> xs) {
  require_nonempty(xs, "mean");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw DomainError("sample_variance: need at least 2 observations");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double quantile(std::span<const double> xs, double p) {
  require_nonempty(xs, "quantile");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0, 1]");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Moments moments(std::span<const double> xs) {
  require_nonempty(xs, "moments");
  Moments m;
  m.n = xs.size();
  m.mean = mean(xs);
  if (xs.size() >= 2) {
    m.variance = sample_variance(xs);
    m.sd = std::sqrt(m.variance);
  } else {
    m.variance = std::numeric_limits<double>::quiet_NaN();
    m.sd = std::numeric_limits<double>::quiet_NaN();
  }
  m.iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  return m;
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("silverman_bandwidth: need at least 2 samples");
  const auto m = moments(samples);
  if (!(m.sd > 0.0)) throw DomainError("silverman_bandwidth: zero dispersion");
  const double spread = m.iqr > 0.0 ? std::min(m.sd, m.iqr / 1.34) : m.sd;
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

DensityGrid kde(std::span<const double> samples, std::span<const double> grid, double h) {
  require_nonempty(samples, "kde");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("kde: bandwidth must be positive");
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  DensityGrid out;
  out.grid.assign(grid.begin(), grid.end());
  out.density.resize(grid.size());
  out.bandwidth = h;
  out.n_samples = samples.size();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double s : samples) {
      const double u = (grid[g] - s) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out.density[g] = acc * norm;
  }
  return out;
}

DensityGrid kde_auto(std::span<const double> samples, std::size_t points, double pad) {
  const double h = silverman_bandwidth(samples);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const auto grid = linspace(*lo - pad * h, *hi + pad * h, points);
  return kde(samples, grid, h);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw DomainError("linspace: need at least 2 points");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("trapezoid: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double student_t_pvalue(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  if (!(df > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  boost::math::students_t_distribution<double> dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double chi2_pvalue(double stat, double df) {
  if (!std::isfinite(stat)) return 0.0;
  if (stat <= 0.0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double f_pvalue(double stat, double df1, double df2) {
  if (!std::isfinite(stat)) return 0.0;
  if (stat <= 0.0) return 1.0;
  boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double kolmogorov_pvalue(double d, std::size_t n) {
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_uniform(std::span<const double> xs) {
  require_nonempty(xs, "ks_uniform");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_pvalue(d, sorted.size())};
}

void write_density_csv(std::ostream& out, const DensityGrid& density) {
  out << "# bandwidth=" << format_double(density.bandwidth) << " n_samples=" << density.n_samples << '\n';
  out << "x,density\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i)
    out << format_double(density.grid[i]) << ',' << format_double(density.density[i]) << '\n';
}

}  // namespace fxrca::stats
