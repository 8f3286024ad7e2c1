#pragma once

#include "lips/regression.hpp"

namespace lips {

/// Prior on the regression coefficients given a model. Both variants give
/// closed-form Bayes factors against the null model in terms of R^2.
struct CoefficientPrior {
  enum class Kind { g, hyper_g };
  Kind kind = Kind::g;
  double g = 1.0;  // g-prior shrinkage, > 0
  double a = 3.0;  // hyper-g hyperparameter, > 2

  static CoefficientPrior g_prior(double g);
  static CoefficientPrior hyper_g(double a = 3.0);
  /// Unit-information default: g = n.
  static CoefficientPrior default_for(int n) { return g_prior(static_cast<double>(n)); }
};

/// log BF against the null model under the g-prior:
/// ((n-1-t)/2) log(1+g) - ((n-1)/2) log(1+g(1-R^2)).
double log_bf0_g(int model_size, double r_squared, int n, double g);

/// log BF against the null model under the hyper-g prior:
/// log[(a-2)/(t+a-2)] + log 2F1((n-1)/2, 1; (t+a)/2; R^2).
double log_bf0_hyper_g(int model_size, double r_squared, int n, double a);

double log_bf0(const RegressionState& state, const RegressionData& data,
               const CoefficientPrior& prior);

/// log BF between consecutive path models: the ratio of their null BFs.
double log_bf_step(const RegressionState& next, const RegressionState& prev,
                   const RegressionData& data, const CoefficientPrior& prior);

/// Gauss hypergeometric 2F1(a,b;c;z) for c > b > 0 and 0 <= z < 1, evaluated
/// by quadrature on the Euler integral (endpoint singularities handled by a
/// tanh-sinh rule). log variant is overflow-safe for large a.
double log_gauss_2f1(double a, double b, double c, double z);
double gauss_2f1(double a, double b, double c, double z);

/// Posterior mean of the shrinkage factor g/(1+g) under the hyper-g prior,
/// by one-dimensional quadrature.
double hyper_g_shrinkage(int model_size, double r_squared, int n, double a);

}  // namespace lips
