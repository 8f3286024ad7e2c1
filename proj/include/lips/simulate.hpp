#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lips {

/// Gaussian design with unit variances and banded correlation
/// corr(X_i, X_j) = (1 - 0.05 |i-j|) for |i-j| <= 20, 0 beyond; nearby
/// columns are strongly correlated. Draws are deterministic in (seed, row,
/// column). Throws if the correlation matrix fails to factor.
Eigen::MatrixXd simulate_design(int n, int p, std::uint64_t seed);

struct ResponseSpec {
  std::vector<int> indices;    // 1-based true predictors
  std::vector<double> coefs;
  double intercept = 10.0;
  double noise_sd = 10.0;
};

/// The two preset signal patterns: +-3 at five well separated indices.
ResponseSpec ex3_response();
ResponseSpec ex4_response();
ResponseSpec response_variant(const std::string& name);  // "ex3" or "ex4"

Eigen::VectorXd simulate_response(const Eigen::MatrixXd& x, const ResponseSpec& spec,
                                  std::uint64_t seed);

/// Mean squared prediction error over a held-out set.
double ase(std::span<const double> predictions, std::span<const double> truths);

}  // namespace lips
