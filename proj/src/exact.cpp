#include "lips/exact.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "lips/errors.hpp"
#include "lips/math.hpp"

namespace lips {

LogBf regression_log_bf(const RegressionData& data, const CoefficientPrior& prior) {
  auto cache = std::make_shared<std::unordered_map<std::uint64_t, double>>();
  return [&data, prior, cache](const ModelVector& model) {
    const std::uint64_t mask = model.mask();
    if (auto it = cache->find(mask); it != cache->end()) return it->second;
    const RegressionState state = RegressionState::for_model(data, model);
    const double value = log_bf0(state, data, prior);
    cache->emplace(mask, value);
    return value;
  };
}

std::vector<double> log_expected_bf_table(const PfsPrior& prior, const LogBf& log_bf, int p) {
  if (p != prior.dimension()) throw std::domain_error("dimension mismatch");
  if (p > kEnumerationLimit)
    throw ConfigError("exact propagation limited to p <= " + std::to_string(kEnumerationLimit));

  const std::size_t n = std::size_t{1} << p;
  std::vector<double> table(n, kNegInf);
  // models grouped by size so each sweep only reads the level above
  std::vector<std::vector<std::uint64_t>> by_size(p + 1);
  for_each_model(p, [&](const ModelVector& m) { by_size[m.size()].push_back(m.mask()); });

  std::vector<double> sel(p);
  for (int s = p; s >= 0; --s) {
    for (const std::uint64_t mask : by_size[s]) {
      const ModelVector model = ModelVector::from_mask(p, mask);
      const double lbf = log_bf(model);
      if (s == p) {
        table[mask] = lbf;
        continue;
      }
      const double stop = prior.stop_prob(model);
      if (stop >= 1.0) {
        table[mask] = lbf;
        continue;
      }
      LogSumAccumulator acc;
      if (stop > 0.0) acc.add(std::log(stop) + lbf);
      prior.selection_probs(model, sel);
      const double log_cont = std::log1p(-stop);
      for (int j = 1; j <= p; ++j) {
        if (sel[j - 1] <= 0.0 || (mask >> (j - 1)) & 1) continue;
        acc.add(log_cont + std::log(sel[j - 1]) + table[mask | (1ull << (j - 1))]);
      }
      table[mask] = acc.value();
    }
  }
  return table;
}

TabulatedPfs posterior_pfs(const PfsPrior& prior, std::span<const double> log_ebf,
                           const LogBf& log_bf, PropagationDiagnostics* diag) {
  const int p = prior.dimension();
  const std::size_t n = std::size_t{1} << p;
  if (log_ebf.size() != n) throw std::domain_error("forward table has wrong size");

  std::vector<double> stop_post(n, 1.0);
  std::vector<double> select_post(n * static_cast<std::size_t>(p), 0.0);
  std::vector<double> sel(p);

  for_each_model(p, [&](const ModelVector& model) {
    const std::uint64_t mask = model.mask();
    double* row = select_post.data() + mask * static_cast<std::size_t>(p);
    if (model.full()) return;  // stop stays 1, selection row stays zero

    const double stop = prior.stop_prob(model);
    prior.selection_probs(model, sel);
    if (stop >= 1.0) {
      stop_post[mask] = 1.0;
      for (int j = 0; j < p; ++j) row[j] = sel[j];
      return;
    }

    const double lbf = log_bf(model);
    const double log_phi = log_ebf[mask];
    const double log_stop_mass = (stop > 0.0 ? std::log(stop) + lbf : kNegInf);
    stop_post[mask] = std::clamp(std::exp(log_stop_mass - log_phi), 0.0, 1.0);

    // log(phi - stop*BF0) via the complement of the stop share
    const double share = log_stop_mass - log_phi;
    const double log_denom = share < -1e-15 ? log_phi + log1m_exp(share) : kNegInf;
    if (log_denom == kNegInf) {
      // pure cancellation: continuation mass lost to rounding while the
      // posterior stop probability is still < 1; fall back to the prior
      if (stop_post[mask] < 1.0 && diag) ++diag->cancellation_fallbacks;
      for (int j = 0; j < p; ++j) row[j] = sel[j];
      return;
    }

    const double log_cont = std::log1p(-stop);
    double total = 0.0;
    for (int j = 1; j <= p; ++j) {
      if (sel[j - 1] <= 0.0 || model.contains(j)) continue;
      const double v = std::exp(std::log(sel[j - 1]) + log_cont +
                                log_ebf[mask | (1ull << (j - 1))] - log_denom);
      row[j - 1] = v;
      total += v;
    }
    if (total > 0.0) {
      const double dev = std::abs(total - 1.0);
      if (dev > 1e-9 && diag) {
        ++diag->renormalized_rows;
        diag->max_row_deviation = std::max(diag->max_row_deviation, dev);
      }
      for (int j = 0; j < p; ++j) row[j] /= total;
    } else {
      if (diag) ++diag->cancellation_fallbacks;
      for (int j = 0; j < p; ++j) row[j] = sel[j];
    }
  });

  return TabulatedPfs(p, std::move(stop_post), std::move(select_post));
}

std::vector<double> exact_posterior(const PfsPrior& prior, const LogBf& log_bf, int p) {
  const std::vector<double> prior_marginal = marginal_model_table(prior);
  const std::size_t n = prior_marginal.size();
  std::vector<double> log_post(n, kNegInf);
  double hi = kNegInf;
  for (std::size_t mask = 0; mask < n; ++mask) {
    if (prior_marginal[mask] <= 0.0) continue;
    log_post[mask] = std::log(prior_marginal[mask]) + log_bf(ModelVector::from_mask(p, mask));
    hi = std::max(hi, log_post[mask]);
  }
  double total = 0.0;
  std::vector<double> post(n, 0.0);
  for (std::size_t mask = 0; mask < n; ++mask) {
    if (log_post[mask] == kNegInf) continue;
    post[mask] = std::exp(log_post[mask] - hi);
    total += post[mask];
  }
  for (double& v : post) v /= total;
  return post;
}

std::vector<double> exact_pip(std::span<const double> posterior, int p) {
  std::vector<double> pip(p, 0.0);
  for (std::size_t mask = 0; mask < posterior.size(); ++mask) {
    if (posterior[mask] == 0.0) continue;
    for (int j = 0; j < p; ++j)
      if ((mask >> j) & 1) pip[j] += posterior[mask];
  }
  return pip;
}

}  // namespace lips
