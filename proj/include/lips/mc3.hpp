#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lips/bayes_factor.hpp"
#include "lips/exact.hpp"
#include "lips/prior.hpp"

namespace lips {

/// Pointwise log prior mass over models, as MC3 needs it.
class LogPriorMass {
 public:
  virtual ~LogPriorMass() = default;
  virtual double log_prob(const ModelVector& model) const = 0;
};

using LogPriorMassPtr = std::shared_ptr<const LogPriorMass>;

/// Closed form for size-symmetric priors: log q_s - log C(p, s).
LogPriorMassPtr symmetric_log_prior(std::span<const double> q);

/// Any pFS prior via its marginal table (p <= enumeration limit).
LogPriorMassPtr tabulated_log_prior(const PfsPrior& prior);

struct Mc3Config {
  std::int64_t iterations = 100000;
  std::int64_t burnin = 0;
  std::uint64_t seed = 0;
  std::int64_t thin = 0;        // keep every thin-th post-burn-in model (0: none)
  int batches = 50;             // batch count for the PIP standard errors
  bool track_occupancy = false; // per-mask visit counts, p <= 64 only
};

struct Mc3Result {
  std::vector<double> pip;
  std::vector<double> pip_se;  // batch-means standard errors
  double accept_rate = 0.0;
  std::vector<ModelVector> chain;            // thinned, post burn-in
  std::vector<std::uint64_t> visit_counts;   // by mask when tracked
  std::int64_t kept = 0;
};

/// Metropolis-Hastings over models with add/delete/swap moves: a feasible
/// move type is drawn uniformly, then a uniform move of that type, with the
/// usual asymmetry correction in the acceptance ratio.
Mc3Result mc3_run(const RegressionData& data, const LogPriorMass& prior,
                  const CoefficientPrior& coef_prior, const Mc3Config& config);

}  // namespace lips
