#pragma once

// Independent test-side oracles. Everything here recomputes quantities by a
// route the library does not use: power series instead of quadrature, dense
// least squares instead of incremental factors, tensor-grid integration of
// the marginal likelihood instead of the closed forms.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "lips/model.hpp"
#include "lips/prior.hpp"

namespace lips::test {

/// Power-series evaluation of the Gauss hypergeometric function.
double series_2f1(double a, double b, double c, double z, int max_terms = 4000);

/// R^2 of the ordinary least-squares fit of y on the given columns of x
/// (plus an intercept), by dense QR.
double dense_r2(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                std::span<const int> cols);

/// OLS prediction for a new row under the model given by cols.
double dense_ols_prediction(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            std::span<const int> cols, const Eigen::VectorXd& x_new);

/// Brute-force log marginal-likelihood ratio against the null model under the
/// g-prior, by tensor-grid quadrature over (intercept, coefficients, noise
/// precision). Supports model sizes 0..2.
double quadrature_log_bf_g(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           std::span<const int> cols, double g);

/// Same ratio under the hyper-g prior: an outer quadrature over the shrinkage
/// hyperparameter wrapped around the regression-parameter integral.
double quadrature_log_bf_hyper_g(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 std::span<const int> cols, double a);

/// Survival function of the chi-squared distribution (regularized upper
/// incomplete gamma).
double chi2_sf(double x, double df);

/// Sum of path_probability over every admissible complete path ending at the
/// given final model (brute-force marginal).
double path_sum_marginal(const PfsPrior& prior, const ModelVector& target);

/// Deterministic iid standard-normal design (independent of the library's
/// banded generator).
Eigen::MatrixXd gaussian_design(int n, int p, std::uint64_t seed);

/// A fixed-seed regression instance: iid design, sparse +-coefficient signal.
struct Instance {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};
Instance make_instance(int n, int p, std::uint64_t seed, int n_true = 3,
                       double coef = 1.5, double noise_sd = 1.0);

}  // namespace lips::test
