#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "lips/dataset.hpp"
#include "lips/proposal.hpp"

namespace lips {

/// One sequential-importance-sampling particle: a tentative model with its
/// log weight; once stopped both are frozen.
struct Particle {
  RegressionState state;  // carries the model
  double log_weight = 0.0;
  int step = 0;
  bool stopped = false;
  std::vector<PathStep> path;  // recorded only when requested

  const ModelVector& model() const { return state.model(); }
};

struct LipsConfig {
  int particles_per_island = 1000;
  int islands = 1;
  int lookahead = 3;
  std::uint64_t seed = 0;
  bool proposal_is_prior = false;  // bypass look-ahead (diagnostic mode)
  bool record_paths = false;
  int threads = 1;
};

/// Weighted sample of final models from one island.
struct IslandRun {
  std::vector<ModelVector> models;
  std::vector<double> log_weights;
  double ess = 0.0;
  int sweeps = 0;
  ProposalDiagnostics diagnostics;
};

struct HtEstimate {
  double value = 0.0;
  double se = 0.0;
  double ess = 0.0;
  int islands_used = 1;
};

/// E(quantity | model, data) as a pure function of the model.
struct DeltaEvaluator {
  enum class Kind { inclusion, prediction, custom };
  Kind kind = Kind::custom;
  std::function<double(const ModelVector&)> fn;

  double operator()(const ModelVector& m) const { return fn(m); }
};

/// Advances a particle one step: frozen once stopped, otherwise draws the
/// stop/select decision from the proposal and accumulates the log ratio of
/// prior to proposal kernel plus the Bayes-factor step.
Particle propagate_step(const Particle& particle, int t, const Proposal& proposal,
                        const PfsPrior& prior, const BfContext& bf, double u_stop,
                        double u_select);

class LipsSampler {
 public:
  LipsSampler(const RegressionData& data, PfsPrior prior, CoefficientPrior coef_prior,
              LipsConfig config);

  /// Deterministic given (seed, island); proposal construction is cached per
  /// distinct tentative model within the island.
  IslandRun run_island(int island) const;

  /// All islands, optionally in parallel; results are indexed by island so the
  /// output does not depend on the thread count.
  std::vector<IslandRun> run() const;

  const LipsConfig& config() const { return config_; }
  const PfsPrior& prior() const { return prior_; }

 private:
  const RegressionData* data_;
  PfsPrior prior_;
  CoefficientPrior coef_prior_;
  LipsConfig config_;
};

/// Self-normalized importance-sampling estimate with the delta-method
/// standard error; invariant to rescaling all weights.
HtEstimate ht_estimate(std::span<const ModelVector> models,
                       std::span<const double> log_weights, const DeltaEvaluator& delta);
HtEstimate ht_estimate(const IslandRun& run, const DeltaEvaluator& delta);

/// Mean of independent island estimates with the between-island standard
/// error; se is infinite for a single island.
HtEstimate islanded_estimate(std::span<const HtEstimate> estimates);

/// Convenience: per-island HT estimates combined across islands.
HtEstimate islanded_estimate(std::span<const IslandRun> runs, const DeltaEvaluator& delta);

DeltaEvaluator pip_delta(int j);

/// Posterior-mean prediction per model: shrinkage times the model's
/// least-squares fit around the training means. Coefficients are cached per
/// model; not safe for concurrent use.
class BmaPredictor {
 public:
  BmaPredictor(const Dataset& data, CoefficientPrior coef_prior);
  double predict(const ModelVector& model, const Eigen::VectorXd& x_new) const;
  DeltaEvaluator delta(Eigen::VectorXd x_new) const;

 private:
  struct ModelFit {
    std::vector<int> cols;
    Eigen::VectorXd shrunk_coef;
  };
  const ModelFit& fit_for(const ModelVector& model) const;

  const Dataset* data_;
  CoefficientPrior coef_prior_;
  mutable std::unordered_map<ModelVector, ModelFit, ModelHash> cache_;
};

}  // namespace lips
