#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lips/math.hpp"
#include "lips/rng.hpp"

namespace lips::test {

double series_2f1(double a, double b, double c, double z, int max_terms) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < max_terms; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
  }
  return sum;
}

namespace {

Eigen::MatrixXd centered_columns(const Eigen::MatrixXd& x, std::span<const int> cols) {
  Eigen::MatrixXd xc(x.rows(), cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto col = x.col(cols[i] - 1);
    xc.col(i) = col.array() - col.mean();
  }
  return xc;
}

}  // namespace

double dense_r2(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                std::span<const int> cols) {
  const Eigen::VectorXd yc = y.array() - y.mean();
  const double ssy = yc.squaredNorm();
  if (cols.empty()) return 0.0;
  const Eigen::MatrixXd xc = centered_columns(x, cols);
  const Eigen::VectorXd beta = xc.colPivHouseholderQr().solve(yc);
  const double rss = (yc - xc * beta).squaredNorm();
  return 1.0 - rss / ssy;
}

double dense_ols_prediction(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            std::span<const int> cols, const Eigen::VectorXd& x_new) {
  if (cols.empty()) return y.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::MatrixXd xc = centered_columns(x, cols);
  const Eigen::VectorXd beta = xc.colPivHouseholderQr().solve(yc);
  double value = y.mean();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto col = x.col(cols[i] - 1);
    value += beta[static_cast<int>(i)] * (x_new[cols[i] - 1] - col.mean());
  }
  return value;
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on Legendre
// polynomials.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

struct Grid {
  std::vector<double> nodes, log_weights;
  void build(int n, double lo, double hi) {
    std::vector<double> raw_nodes, raw_weights;
    gauss_legendre(n, raw_nodes, raw_weights);
    nodes.resize(n);
    log_weights.resize(n);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < n; ++i) {
      nodes[i] = mid + half * raw_nodes[i];
      log_weights[i] = std::log(raw_weights[i] * half);
    }
  }
};

// log of the marginal likelihood integral over (alpha, beta, log phi) for the
// model given by cols, at a fixed g (cols may be empty for the null model).
// The improper 1/phi and flat-alpha factors are shared with the null model,
// so only ratios of these values are meaningful.
double log_ml_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   std::span<const int> cols, double g) {
  const int n = static_cast<int>(y.size());
  const int t = static_cast<int>(cols.size());
  if (t > 2) throw std::invalid_argument("quadrature oracle supports sizes 0..2");

  const double y_bar = y.mean();
  const Eigen::VectorXd yc = y.array() - y_bar;
  const double ssy = yc.squaredNorm();
  const Eigen::MatrixXd xc = centered_columns(x, cols);
  const Eigen::MatrixXd gram = xc.transpose() * xc;
  const Eigen::VectorXd xty = xc.transpose() * yc;
  const double log_det_gram = t > 0 ? std::log(gram.determinant()) : 0.0;

  // reference scales for the integration boxes
  const double sigma0 = std::sqrt(ssy / n);
  Eigen::VectorXd beta_hat = Eigen::VectorXd::Zero(std::max(t, 1));
  Eigen::VectorXd beta_sd = Eigen::VectorXd::Ones(std::max(t, 1));
  if (t > 0) {
    beta_hat.head(t) = gram.ldlt().solve(xty);
    const Eigen::MatrixXd ginv = gram.inverse();
    for (int i = 0; i < t; ++i) beta_sd[i] = sigma0 * std::sqrt(ginv(i, i));
  }

  Grid alpha_grid, v_grid;
  alpha_grid.build(64, y_bar - 10.0 * sigma0, y_bar + 10.0 * sigma0);
  const double v0 = std::log(n / ssy);
  v_grid.build(64, v0 - 9.0, v0 + 9.0);
  std::vector<Grid> beta_grids(t);
  for (int i = 0; i < t; ++i)
    beta_grids[i].build(48, beta_hat[i] - 12.0 * beta_sd[i], beta_hat[i] + 12.0 * beta_sd[i]);

  const double log_2pi = std::log(2.0 * M_PI);
  LogSumAccumulator acc;
  Eigen::VectorXd beta(t);
  std::vector<int> idx(t, 0);
  while (true) {
    double log_beta_weight = 0.0;
    for (int i = 0; i < t; ++i) {
      beta[i] = beta_grids[i].nodes[idx[i]];
      log_beta_weight += beta_grids[i].log_weights[idx[i]];
    }
    // quadratic forms shared across the (alpha, v) sweep
    const double fit2 = t > 0 ? ssy - 2.0 * beta.dot(xty) + beta.dot(gram * beta) : ssy;
    const double prior_quad = t > 0 ? beta.dot(gram * beta) / g : 0.0;

    for (std::size_t ai = 0; ai < alpha_grid.nodes.size(); ++ai) {
      const double shift = n * (alpha_grid.nodes[ai] - y_bar) * (alpha_grid.nodes[ai] - y_bar);
      for (std::size_t vi = 0; vi < v_grid.nodes.size(); ++vi) {
        const double v = v_grid.nodes[vi];
        const double phi = std::exp(v);
        double log_f = 0.5 * n * (v - log_2pi) - 0.5 * phi * (fit2 + shift);
        if (t > 0)
          log_f += 0.5 * t * (v - log_2pi - std::log(g)) + 0.5 * log_det_gram -
                   0.5 * phi * prior_quad;
        acc.add(log_f + alpha_grid.log_weights[ai] + v_grid.log_weights[vi] +
                log_beta_weight);
      }
    }

    int d = t - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < static_cast<int>(beta_grids[d].nodes.size())) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
  return acc.value();
}

}  // namespace

double quadrature_log_bf_g(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           std::span<const int> cols, double g) {
  return log_ml_grid(x, y, cols, g) - log_ml_grid(x, y, {}, 1.0);
}

double quadrature_log_bf_hyper_g(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 std::span<const int> cols, double a) {
  // p(g) dg = (a/2 - 1)(1-u)^{a/2-2} du with u = g/(1+g); substituting
  // u = 1 - s^2 removes the endpoint singularity for a >= 3
  const int n_nodes = 32;
  std::vector<double> nodes, weights;
  gauss_legendre(n_nodes, nodes, weights);
  LogSumAccumulator acc;
  for (int i = 0; i < n_nodes; ++i) {
    const double s = 0.5 * (nodes[i] + 1.0);
    const double w = 0.5 * weights[i];
    const double u = 1.0 - s * s;
    const double g = u / (1.0 - u);
    const double log_prior = std::log(a / 2.0 - 1.0) + (a - 3.0) * std::log(s) +
                             std::log(2.0);
    acc.add(std::log(w) + log_prior + log_ml_grid(x, y, cols, g));
  }
  return acc.value() - log_ml_grid(x, y, {}, 1.0);
}

double chi2_sf(double x, double df) {
  // regularized upper incomplete gamma Q(df/2, x/2)
  const double a = 0.5 * df;
  const double z = 0.5 * x;
  if (z <= 0.0) return 1.0;
  if (z < a + 1.0) {
    // series for P, return 1 - P
    double term = 1.0 / a, sum = term;
    for (int k = 1; k < 1000; ++k) {
      term *= z / (a + k);
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    return 1.0 - sum * std::exp(-z + a * std::log(z) - std::lgamma(a));
  }
  // continued fraction for Q
  double b = z + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int k = 1; k < 1000; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-z + a * std::log(z) - std::lgamma(a));
}

double path_sum_marginal(const PfsPrior& prior, const ModelVector& target) {
  const int p = prior.dimension();
  std::vector<int> vars;
  target.for_each([&](int j) { vars.push_back(j); });
  std::sort(vars.begin(), vars.end());

  double total = 0.0;
  do {
    std::vector<ModelVector> path;
    path.emplace_back(p);
    for (int j : vars) path.push_back(path.back().with(j));
    while (static_cast<int>(path.size()) < p + 1) path.push_back(path.back());
    total += path_probability(prior, path);
  } while (std::next_permutation(vars.begin(), vars.end()));
  return total;
}

Eigen::MatrixXd gaussian_design(int n, int p, std::uint64_t seed) {
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    rng::Stream stream(seed, std::uint64_t{777}, std::uint64_t(i));
    for (int j = 0; j < p; ++j) x(i, j) = stream.normal();
  }
  return x;
}

Instance make_instance(int n, int p, std::uint64_t seed, int n_true, double coef,
                       double noise_sd) {
  Instance inst;
  inst.x = gaussian_design(n, p, seed);
  inst.y = Eigen::VectorXd::Constant(n, 0.5);
  const int gap = std::max(1, p / std::max(1, n_true));
  for (int k = 0; k < n_true; ++k) {
    const int j = std::min(p, 1 + k * gap);
    inst.y += (k % 2 == 0 ? coef : -coef) * inst.x.col(j - 1);
  }
  rng::Stream noise(seed, std::uint64_t{778});
  for (int i = 0; i < n; ++i) inst.y[i] += noise_sd * noise.normal();
  return inst;
}

}  // namespace lips::test
