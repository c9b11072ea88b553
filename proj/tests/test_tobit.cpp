#include <doctest.h>

#include <cmath>
#include <random>

#include "fxrca/error.hpp"
#include "fxrca/regression.hpp"
#include "fxrca/synth.hpp"
#include "fxrca/tobit.hpp"

using namespace fxrca;
using namespace fxrca::econ;

namespace {

struct Sample {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
};

// Latent y* = 1 + 0.8 x1 - 0.5 x2 + 0.6 e, observed inside [lower, upper].
Sample censored_sample(std::uint64_t seed, int n, double lower, double upper) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Sample s{Eigen::VectorXd(n), Eigen::MatrixXd(n, 3)};
  for (int i = 0; i < n; ++i) {
    const double a = z(rng), b = z(rng);
    s.X.row(i) << a, b, 1.0;
    s.y(i) = std::clamp(1.0 + 0.8 * a - 0.5 * b + 0.6 * z(rng), lower, upper);
  }
  return s;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("log_normal_cdf and inverse_mills in the tails") {
  CHECK(log_normal_cdf(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(log_normal_cdf(-40.0) < -800.0);
  CHECK(std::isfinite(log_normal_cdf(-40.0)));
  // Mills ratio tends to -u far left.
  CHECK(inverse_mills(-40.0) == doctest::Approx(40.0).epsilon(1e-3));
  CHECK(inverse_mills(0.0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-12));
  double prev = INFINITY;
  for (double u = -50.0; u < 10.0; u += 0.5) {
    const double m = inverse_mills(u);
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("analytic gradient and hessian agree with central differences") {
  const auto s = censored_sample(3, 300, 0.0, 2.0);
  const TobitObjective f(s.y, s.X, 0.0, 2.0);
  CHECK(f.n_left() > 0);
  CHECK(f.n_right() > 0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd theta(4);
    theta << 1.0 + 0.3 * z(rng), 0.8 + 0.3 * z(rng), -0.5 + 0.3 * z(rng), std::log(0.6) + 0.2 * z(rng);
    const Eigen::VectorXd g = f.gradient(theta);
    const Eigen::MatrixXd H = f.hessian(theta);
    const double h = 1e-5;
    for (int j = 0; j < 4; ++j) {
      Eigen::VectorXd up = theta, dn = theta;
      up(j) += h;
      dn(j) -= h;
      const double fd = (f.value(up) - f.value(dn)) / (2 * h);
      CHECK(rel_err(g(j), fd) < 1e-6);
      const Eigen::VectorXd hd = (f.gradient(up) - f.gradient(dn)) / (2 * h);
      for (int i = 0; i < 4; ++i) CHECK(rel_err(H(i, j), hd(i)) < 1e-5);
    }
  }
}

TEST_CASE("uncensored sample reproduces OLS") {
  auto s = censored_sample(4, 400, -1e9, 1e9);
  const auto fit = tobit_mle(s.y, s.X, {"x1", "x2", "_cons"}, {-1e9, 1e9, 200, 1e-8});
  const auto o = ols(s.y, s.X, {"x1", "x2", "_cons"});
  for (const char* name : {"x1", "x2", "_cons"}) CHECK(rel_err(fit.coef(name), o.coef(name)) < 1e-4);
  // MLE sigma is the root mean squared residual.
  CHECK(rel_err(fit.coef("sigma"), std::sqrt(o.ssr / 400.0)) < 1e-4);
  CHECK(fit.extra.at("n_uncensored") == 400);
  CHECK(fit.stat_kind == "z");
}

TEST_CASE("censored fit converges with a monotone likelihood trace") {
  const auto s = censored_sample(5, 1000, 0.0, 2.0);
  const auto fit = tobit_mle(s.y, s.X, {"x1", "x2", "_cons"});
  CHECK(fit.converged);
  CHECK(fit.gradient_norm < 1e-6);
  REQUIRE(fit.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
    CHECK(fit.objective_trace[i] >= fit.objective_trace[i - 1] - 1e-9);
  CHECK(fit.log_likelihood.has_value());
  CHECK(*fit.log_likelihood == doctest::Approx(fit.objective_trace.back()).epsilon(1e-12));
  CHECK(std::abs(fit.coef("x1") - 0.8) < 0.1);
  CHECK(std::abs(fit.coef("x2") + 0.5) < 0.1);
  CHECK(std::abs(fit.coef("sigma") - 0.6) < 0.1);
  CHECK(fit.extra.at("n_left") + fit.extra.at("n_right") + fit.extra.at("n_uncensored") == 1000);
  CHECK(fit.extra.at("n_left") > 0);
  CHECK(fit.se("x1") > 0.0);

  // The maximum is stationary: every finite-difference direction lowers the likelihood.
  const TobitObjective f(s.y, s.X, 0.0, 2.0);
  Eigen::VectorXd theta(4);
  theta << fit.coef("x1"), fit.coef("x2"), fit.coef("_cons"), std::log(fit.coef("sigma"));
  for (int j = 0; j < 4; ++j) {
    Eigen::VectorXd t = theta;
    t(j) += 1e-3;
    CHECK(f.value(t) < f.value(theta));
  }
}

TEST_CASE("everything censored is an estimation error") {
  auto s = censored_sample(6, 50, 0.0, 2.0);
  s.y.setConstant(0.0);
  CHECK_THROWS_AS(tobit_mle(s.y, s.X, {"x1", "x2", "_cons"}), EstimationError);
  CHECK_THROWS_AS(tobit_mle(s.y, s.X, {"x1", "x2", "_cons"}, {1.0, 0.5, 200, 1e-8}), ConfigError);
}

TEST_CASE("panel tobit with a calendar-year trend converges") {
  data::SynthConfig cfg;
  cfg.censor_upper = 2.0;
  const auto synth = data::synth_panel(cfg);
  ModelSpec spec;
  spec.regressors = {"exrate", "ln_population"};
  spec.fixed_effect = "province";
  spec.time_trend = true;
  const auto fit = tobit_panel(synth.panel, spec);
  CHECK(fit.converged);
  CHECK(fit.gradient_norm < 1e-6);
  CHECK(fit.has("province=P02"));
  CHECK_FALSE(fit.has("province=P01"));
  CHECK(fit.extra.at("n_right") > 0);
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
    CHECK(fit.objective_trace[i] >= fit.objective_trace[i - 1] - 1e-9);
}
