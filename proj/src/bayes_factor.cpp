#include "lips/bayes_factor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lips/errors.hpp"
#include "lips/math.hpp"

namespace lips {

namespace {

// guards the hyper-g domain requirement z < 1
double clamp_r2(double r2) { return std::clamp(r2, 0.0, 1.0 - 1e-12); }

}  // namespace

CoefficientPrior CoefficientPrior::g_prior(double g) {
  if (!(g > 0.0)) throw std::domain_error("g-prior requires g > 0");
  CoefficientPrior prior;
  prior.kind = Kind::g;
  prior.g = g;
  return prior;
}

CoefficientPrior CoefficientPrior::hyper_g(double a) {
  if (!(a > 2.0)) throw std::domain_error("hyper-g prior requires a > 2");
  CoefficientPrior prior;
  prior.kind = Kind::hyper_g;
  prior.a = a;
  return prior;
}

double log_bf0_g(int model_size, double r_squared, int n, double g) {
  if (!(g > 0.0)) throw std::domain_error("g-prior requires g > 0");
  if (model_size == 0) return 0.0;
  const double r2 = clamp_r2(r_squared);
  return 0.5 * (n - 1 - model_size) * std::log1p(g) -
         0.5 * (n - 1) * std::log1p(g * (1.0 - r2));
}

double log_bf0_hyper_g(int model_size, double r_squared, int n, double a) {
  if (!(a > 2.0)) throw std::domain_error("hyper-g prior requires a > 2");
  if (model_size == 0) return 0.0;
  const double r2 = clamp_r2(r_squared);
  const double t = static_cast<double>(model_size);
  return std::log(a - 2.0) - std::log(t + a - 2.0) +
         log_gauss_2f1(0.5 * (n - 1), 1.0, 0.5 * (t + a), r2);
}

double log_bf0(const RegressionState& state, const RegressionData& data,
               const CoefficientPrior& prior) {
  if (prior.kind == CoefficientPrior::Kind::g)
    return log_bf0_g(state.size(), state.r_squared(), data.n, prior.g);
  return log_bf0_hyper_g(state.size(), state.r_squared(), data.n, prior.a);
}

double log_bf_step(const RegressionState& next, const RegressionState& prev,
                   const RegressionData& data, const CoefficientPrior& prior) {
  return log_bf0(next, data, prior) - log_bf0(prev, data, prior);
}

double log_gauss_2f1(double a, double b, double c, double z) {
  if (!(c > b && b > 0.0)) throw std::domain_error("gauss_2f1 requires c > b > 0");
  if (!(z >= 0.0 && z < 1.0)) throw std::domain_error("gauss_2f1 requires 0 <= z < 1");
  if (z == 0.0) return 0.0;

  const double log_prefactor = std::lgamma(c) - std::lgamma(b) - std::lgamma(c - b);
  const double log_integral = log_integrate_unit(
      [=](double t, double one_minus_t) {
        // t^{b-1} (1-t)^{c-b-1} (1-tz)^{-a}, with 1-tz = (1-z) + z(1-t)
        return (b - 1.0) * std::log(t) + (c - b - 1.0) * std::log(one_minus_t) -
               a * std::log((1.0 - z) + z * one_minus_t);
      },
      1e-13);
  return log_prefactor + log_integral;
}

double gauss_2f1(double a, double b, double c, double z) {
  return std::exp(log_gauss_2f1(a, b, c, z));
}

double hyper_g_shrinkage(int model_size, double r_squared, int n, double a) {
  if (!(a > 2.0)) throw std::domain_error("hyper-g prior requires a > 2");
  const double r2 = clamp_r2(r_squared);
  const double expo = 0.5 * (model_size + a) - 2.0;
  const double half_n1 = 0.5 * (n - 1);
  // posterior density of u = g/(1+g) is prop. to (1-u)^{(t+a)/2-2} (1-u R^2)^{-(n-1)/2}
  const auto log_base = [=](double u, double one_minus_u) {
    return expo * std::log(one_minus_u) - half_n1 * std::log((1.0 - r2) + r2 * one_minus_u);
  };
  const double log_num = log_integrate_unit(
      [&](double u, double one_minus_u) { return std::log(u) + log_base(u, one_minus_u); },
      1e-12);
  const double log_den = log_integrate_unit(log_base, 1e-12);
  return std::exp(log_num - log_den);
}

}  // namespace lips
