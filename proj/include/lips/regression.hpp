#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lips/model.hpp"

namespace lips {

/// Centered design and response with precomputed cross products. The Gram
/// matrix makes column extensions O(t^2) instead of O(n t).
struct RegressionData {
  Eigen::MatrixXd x;        // n x p, columns mean-centered
  Eigen::VectorXd y;        // length n, mean-centered
  Eigen::MatrixXd gram;     // x' x
  Eigen::VectorXd xty;      // x' y
  double ssy = 0.0;         // y' y
  int n = 0;
  int p = 0;

  /// Centers the inputs and builds the cross products. Requires n >= 3.
  static RegressionData from_raw(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y_raw);

  /// Largest estimable model size: min(p, n-2).
  int max_model_size() const { return std::min(p, n - 2); }
};

/// Sufficient statistics of one model along a stepwise path: the triangular
/// factor of the model's Gram matrix, the forward-solved cross products, the
/// residual sum of squares and R^2. Value semantics; extensions copy.
class RegressionState {
 public:
  static RegressionState null_state(const RegressionData& data);

  /// From-scratch build over the model's variables in ascending order.
  /// Throws CollinearityError when a column is numerically dependent.
  static RegressionState for_model(const RegressionData& data, const ModelVector& model);

  const ModelVector& model() const { return model_; }
  int size() const { return static_cast<int>(cols_.size()); }
  const std::vector<int>& columns() const { return cols_; }
  double rss() const { return rss_; }
  double r_squared() const { return r2_; }

  /// Least-squares coefficients on the centered design, in columns() order.
  Eigen::VectorXd coefficients() const;

  /// Appends column j (gamma_j must be 0). Returns nullopt when the pivot
  /// falls below 1e-10 times the column norm.
  std::optional<RegressionState> try_extend(const RegressionData& data, int j) const;

 private:
  ModelVector model_;
  std::vector<int> cols_;     // insertion order, 1-based
  Eigen::MatrixXd chol_;      // lower-triangular factor, size x size
  Eigen::VectorXd qty_;       // chol^{-1} (x_cols' y)
  double rss_ = 0.0;
  double r2_ = 0.0;
};

/// try_extend wrapped with the error contract of callers that cannot skip.
RegressionState extend_state(const RegressionState& state, int j, const RegressionData& data);

}  // namespace lips
