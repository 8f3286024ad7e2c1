#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "lips/model.hpp"
#include "lips/rng.hpp"

namespace lips {

/// Stopping probability of the stepwise chain. Must return 1 for every model
/// of size >= max_size().
class StoppingRule {
 public:
  virtual ~StoppingRule() = default;
  virtual double stop_prob(const ModelVector& model) const = 0;
  /// Smallest size at which stopping is certain (p if no earlier bound).
  virtual int max_size() const = 0;
};

/// Selection probabilities over the candidate variables. For every non-full
/// model the result is a simplex supported on the excluded variables.
class SelectionRule {
 public:
  virtual ~SelectionRule() = default;
  /// Writes the p selection probabilities into `out` (entry j-1 holds
  /// variable j). `out.size()` must equal the dimension.
  virtual void selection_probs(const ModelVector& model, std::span<double> out) const = 0;
};

using StoppingPtr = std::shared_ptr<const StoppingRule>;
using SelectionPtr = std::shared_ptr<const SelectionRule>;

/// A stopping rule paired with a selection rule: the two mappings that define
/// a probabilistic forward-stepwise (pFS) model-space distribution. An
/// optional size cap (for estimability on attached data) forces stopping.
class PfsPrior {
 public:
  PfsPrior(int p, StoppingPtr stopping, SelectionPtr selection);

  int dimension() const { return p_; }
  /// Smallest size at which stopping is certain.
  int max_size() const;

  double stop_prob(const ModelVector& model) const;
  void selection_probs(const ModelVector& model, std::span<double> out) const;
  std::vector<double> selection_probs(const ModelVector& model) const;

  /// Same prior with stopping forced at min(current cap, cap).
  [[nodiscard]] PfsPrior with_max_size(int cap) const;

  const StoppingPtr& stopping() const { return stopping_; }
  const SelectionPtr& selection() const { return selection_; }

 private:
  int p_;
  int cap_;
  StoppingPtr stopping_;
  SelectionPtr selection_;
};

// ---- stopping rules -------------------------------------------------------

/// Stopping rule h(s) = q_s / (1 - sum_{r<s} q_r) realizing the model-size
/// distribution q (length p+1). Sizes with exhausted mass map to h = 1.
StoppingPtr size_prior_to_h(std::span<const double> q);

/// Explicit h table; h(s) = 1 for s >= s_max.
StoppingPtr size_stopping(std::vector<double> h, int s_max);

// ---- selection rules ------------------------------------------------------

/// Equal mass on the excluded variables.
SelectionPtr uniform_selection(int p);

/// Mass proportional to base_weights, multiplied by `boost` for variables in
/// `boosted` (1-based), renormalized over the excluded set.
SelectionPtr weighted_selection(int p, std::vector<double> base_weights, double boost,
                                std::span<const int> boosted);

/// Conditional reweighting of a base rule. factor > 0: multiply the target's
/// selection probability by factor when any trigger is in the model (pathway
/// boosting). factor == 0: zero the target unless all triggers are in the
/// model (interaction constraint).
struct ConditionalRule {
  std::vector<int> triggers;
  int target = 0;
  double factor = 1.0;
};
SelectionPtr conditional_selection(SelectionPtr base, std::vector<ConditionalRule> rules);

/// Whole-block inclusion: while a block is partially included, stopping is
/// suppressed and selection mass goes uniformly to the block's missing
/// members; otherwise the base rules apply.
std::pair<StoppingPtr, SelectionPtr> block_rule(StoppingPtr stopping, SelectionPtr selection,
                                                std::vector<std::vector<int>> blocks);

/// Complete-linkage clusters of predictors under similarity |corr|, cut at
/// threshold s: two variables share a cluster only if every cross pair has
/// |corr| >= s. Merge ties break toward the smallest index pair.
std::vector<std::vector<int>> correlation_clusters(const Eigen::MatrixXd& corr,
                                                   double threshold);

/// Redundancy-diluting selection: each cluster with at least one excluded
/// member receives equal total mass, split evenly within the cluster.
SelectionPtr dilution_selection(const Eigen::MatrixXd& corr, double threshold);

// ---- whole priors ---------------------------------------------------------

/// Uniform size distribution q_s = 1/(p+1) with uniform selection; the
/// marginal puts mass 1/((p+1) C(p,s)) on every model of size s.
PfsPrior beta_binomial_prior(int p);

/// Size distribution q with uniform selection.
PfsPrior size_vector_prior(std::span<const double> q);

/// pFS representation of the symmetric prior pi(model) = q_{|model|}/C(p,s),
/// built by the inductive stopping recursion paired with uniform selection.
PfsPrior symmetric_pfs(std::span<const double> q);

/// Explicit stopping/selection tables over all 2^p models (p small).
class TabulatedPfs {
 public:
  TabulatedPfs(int p, std::vector<double> stop, std::vector<double> select);

  int dimension() const { return p_; }
  double stop_prob(const ModelVector& model) const { return stop_[model.mask()]; }
  double selection_prob(const ModelVector& model, int j) const {
    return select_[model.mask() * p_ + (j - 1)];
  }
  std::span<const double> stop_table() const { return stop_; }

  PfsPrior as_prior() const;

 private:
  int p_;
  std::shared_ptr<const std::vector<double>> stop_holder_;
  std::shared_ptr<const std::vector<double>> select_holder_;
  std::span<const double> stop_;
  std::span<const double> select_;
};

/// Constructs a pFS representation of an arbitrary model-space distribution
/// (indexed by bit mask, size 2^p) by peeling off the last predictor and
/// recursing; the marginal law of the result's final model equals pi.
TabulatedPfs pfs_from_distribution(std::span<const double> pi, int p);

// ---- marginals and simulation ---------------------------------------------

/// Probability that the stepwise chain's final model equals `model`, by
/// dynamic programming over subsets in increasing size order.
double marginal_model_probability(const PfsPrior& prior, const ModelVector& model);

/// All 2^p marginal probabilities, indexed by bit mask.
std::vector<double> marginal_model_table(const PfsPrior& prior);

/// Draws one stepwise pass: stop/select decisions until the chain stops.
std::pair<ModelVector, std::vector<PathStep>> simulate_pfs(const PfsPrior& prior,
                                                           rng::Stream& stream);

}  // namespace lips
