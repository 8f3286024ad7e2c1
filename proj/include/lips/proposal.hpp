#pragma once

#include <cstdint>
#include <vector>

#include "lips/exact.hpp"

namespace lips {

struct ProposalDiagnostics {
  std::uint64_t forced_stops = 0;        // no continuable child, stop forced
  std::uint64_t collinear_branches = 0;  // children dropped for collinearity
  std::uint64_t cancellation_fallbacks = 0;
};

/// Proposal mappings at one model, built by expanding the propagation
/// recursion k levels deep. The cached lookahead values let callers verify
/// that the root equals its own one-step combination of the children.
struct Proposal {
  double stop_prob = 1.0;
  std::vector<double> selection;        // normalized over selectable children
  double log_lookahead = 0.0;           // truncated forward value at the root
  double log_bf = 0.0;                  // log BF0 of the root model
  std::vector<double> child_lookahead;  // per variable (j-1); NaN if unavailable
  bool forced_stop = false;
};

/// Regression-backed Bayes factor evaluation for proposal construction;
/// look-ahead extensions are copies discarded with the proposal.
class BfContext {
 public:
  BfContext(const RegressionData& data, const CoefficientPrior& prior)
      : data_(&data), prior_(prior) {}
  const RegressionData& data() const { return *data_; }
  const CoefficientPrior& coef_prior() const { return prior_; }
  double log_bf(const RegressionState& state) const { return log_bf0(state, *data_, prior_); }

 private:
  const RegressionData* data_;
  CoefficientPrior prior_;
};

/// Depth-k truncation of the forward recursion rooted at the given model
/// (log scale). Equals the exact forward table entry once k covers the
/// remaining dimensions.
double log_lookahead_bf(const ModelVector& model, int k, const PfsPrior& prior,
                        const LogBf& log_bf);
double log_lookahead_bf(const RegressionState& state, int k, const PfsPrior& prior,
                        const BfContext& bf);

Proposal build_proposal(const ModelVector& model, int k, const PfsPrior& prior,
                        const LogBf& log_bf, ProposalDiagnostics* diag = nullptr);
Proposal build_proposal(const RegressionState& state, int k, const PfsPrior& prior,
                        const BfContext& bf, ProposalDiagnostics* diag = nullptr);

}  // namespace lips
