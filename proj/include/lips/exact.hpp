#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lips/bayes_factor.hpp"
#include "lips/prior.hpp"

namespace lips {

/// log Bayes factor against the null model, as a function of the model.
using LogBf = std::function<double(const ModelVector&)>;

/// Wraps regression data as a LogBf with a per-mask cache (p <= enumeration
/// limit; models are solved from scratch in ascending column order).
LogBf regression_log_bf(const RegressionData& data, const CoefficientPrior& prior);

struct PropagationDiagnostics {
  std::uint64_t cancellation_fallbacks = 0;  // phi - rho*BF underflowed
  std::uint64_t renormalized_rows = 0;       // selection row off simplex by > 1e-9
  double max_row_deviation = 0.0;
};

/// Forward summation of the information-propagation recursion: entry m is
/// log E[BF0(final model) | the chain reached model m], computed over sizes
/// p down to 0. Indexed by bit mask.
std::vector<double> log_expected_bf_table(const PfsPrior& prior, const LogBf& log_bf, int p);

/// Posterior stopping/selection mappings from the forward table:
/// stop' = stop * BF0 / ebf, select'_j prop. to select_j (1-stop) ebf(+j).
TabulatedPfs posterior_pfs(const PfsPrior& prior, std::span<const double> log_ebf,
                           const LogBf& log_bf, PropagationDiagnostics* diag = nullptr);

/// Enumeration posterior pi(model | data) over all 2^p models (by mask).
std::vector<double> exact_posterior(const PfsPrior& prior, const LogBf& log_bf, int p);

/// Posterior inclusion probabilities from a normalized posterior table.
std::vector<double> exact_pip(std::span<const double> posterior, int p);

}  // namespace lips
