#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fxrca::stats {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // n-1 denominator; NaN when n < 2
  double sd = 0.0;
  double iqr = 0.0;
  std::size_t n = 0;
};

struct DensityGrid {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::size_t n_samples = 0;
};

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

// Linear-interpolation quantile: position p*(n-1) in the sorted sample.
double quantile(std::span<const double> xs, double p);

Moments moments(std::span<const double> xs);

// 0.9 * min(sd, IQR/1.34) * n^(-1/5). Falls back to sd when IQR is zero.
double silverman_bandwidth(std::span<const double> samples);

// Gaussian-kernel density evaluated at each grid point.
DensityGrid kde(std::span<const double> samples, std::span<const double> grid, double h);

// Silverman bandwidth and `points` equally spaced grid points spanning
// [min - pad*h, max + pad*h].
DensityGrid kde_auto(std::span<const double> samples, std::size_t points = 512, double pad = 3.0);

std::vector<double> linspace(double lo, double hi, std::size_t n);
double trapezoid(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);
double normal_quantile(double p);

// Two-sided p-values.
double student_t_pvalue(double t, double df);
double chi2_pvalue(double stat, double df);
double f_pvalue(double stat, double df1, double df2);

// One-sample Kolmogorov-Smirnov test against U(0,1).
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_uniform(std::span<const double> xs);

// Asymptotic Kolmogorov survival function with the Stephens small-sample
// correction.
double kolmogorov_pvalue(double d, std::size_t n);

void write_density_csv(std::ostream& out, const DensityGrid& density);

}  // namespace fxrca::stats
