#include "lips/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lips/errors.hpp"
#include "lips/rng.hpp"

namespace lips {

namespace {

constexpr int kBandwidth = 20;

double target_corr(int lag) {
  return lag <= kBandwidth ? 1.0 - 0.05 * lag : 0.0;
}

// banded Cholesky factor of the banded correlation matrix
Eigen::MatrixXd banded_factor(int p) {
  const int b = std::min(kBandwidth, p - 1);
  Eigen::MatrixXd low = Eigen::MatrixXd::Zero(p, b + 1);  // low(i, i-j) = L(i,j)
  for (int i = 0; i < p; ++i) {
    for (int j = std::max(0, i - b); j <= i; ++j) {
      double sum = target_corr(i - j);
      for (int k = std::max(0, i - b); k < j; ++k)
        sum -= low(i, i - k) * low(j, j - k);
      if (i == j) {
        if (sum <= 0.0)
          throw NumericError("banded correlation matrix is not positive definite");
        low(i, 0) = std::sqrt(sum);
      } else {
        low(i, i - j) = sum / low(j, 0);
      }
    }
  }
  return low;
}

}  // namespace

Eigen::MatrixXd simulate_design(int n, int p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::domain_error("design dimensions must be positive");
  const Eigen::MatrixXd low = banded_factor(p);
  const int b = static_cast<int>(low.cols()) - 1;

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    rng::Stream stream = rng::substream(seed, rng::Tag::design, i);
    for (int j = 0; j < p; ++j) z[j] = stream.normal();
    for (int j = 0; j < p; ++j) {
      double value = 0.0;
      for (int k = std::max(0, j - b); k <= j; ++k) value += low(j, j - k) * z[k];
      x(i, j) = value;
    }
  }
  return x;
}

ResponseSpec ex3_response() {
  return {{2, 30, 58, 75, 97}, {3.0, -3.0, 3.0, -3.0, 3.0}, 10.0, 10.0};
}

ResponseSpec ex4_response() {
  return {{120, 280, 400, 560, 807}, {3.0, -3.0, 3.0, -3.0, 3.0}, 10.0, 10.0};
}

ResponseSpec response_variant(const std::string& name) {
  if (name == "ex3") return ex3_response();
  if (name == "ex4") return ex4_response();
  throw ConfigError("unknown response variant '" + name + "'");
}

Eigen::VectorXd simulate_response(const Eigen::MatrixXd& x, const ResponseSpec& spec,
                                  std::uint64_t seed) {
  if (spec.indices.size() != spec.coefs.size())
    throw std::domain_error("index and coefficient lists must have equal length");
  for (int j : spec.indices)
    if (j < 1 || j > x.cols())
      throw std::domain_error("response index " + std::to_string(j) +
                              " needs p >= " + std::to_string(j));
  const int n = static_cast<int>(x.rows());
  Eigen::VectorXd y = Eigen::VectorXd::Constant(n, spec.intercept);
  for (std::size_t k = 0; k < spec.indices.size(); ++k)
    y += spec.coefs[k] * x.col(spec.indices[k] - 1);
  if (spec.noise_sd > 0.0) {
    for (int i = 0; i < n; ++i) {
      rng::Stream stream = rng::substream(seed, rng::Tag::response, i);
      y[i] += spec.noise_sd * stream.normal();
    }
  }
  return y;
}

double ase(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.empty() || predictions.size() != truths.size())
    throw std::domain_error("prediction and truth vectors must have equal nonzero length");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

}  // namespace lips
