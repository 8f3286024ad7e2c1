#include "lips/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lips/errors.hpp"
#include "lips/math.hpp"

namespace lips {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Levels of the look-ahead tree hold one entry per distinct model, i.e. per
// m-subset of the available variables, laid out in colexicographic rank
// order. A subset extended by a new largest position c lands at rank
// C(c, m+1) + rank(prefix), so levels build by a linear sweep and shared
// submodels are evaluated once.
class Binomials {
 public:
  Binomials(int n, int k) : k_(k), table_((n + 1) * (k + 1), 0) {
    for (int i = 0; i <= n; ++i) {
      at(i, 0) = 1;
      for (int m = 1; m <= std::min(i, k); ++m)
        at(i, m) = at(i - 1, m - 1) + (i - 1 >= m ? at(i - 1, m) : 0);
    }
  }
  std::size_t operator()(int i, int m) const {
    if (m < 0 || m > k_ || i < m) return 0;
    return table_[static_cast<std::size_t>(i) * (k_ + 1) + m];
  }

 private:
  std::size_t& at(int i, int m) { return table_[static_cast<std::size_t>(i) * (k_ + 1) + m]; }
  int k_;
  std::vector<std::size_t> table_;
};

// rank of pos + {extra} in colex order (pos ascending, extra not in pos)
std::size_t rank_with(std::span<const int> pos, int extra, const Binomials& binom) {
  std::size_t rank = 0;
  int slot = 0;
  bool placed = false;
  for (int v : pos) {
    if (!placed && extra < v) {
      rank += binom(extra, ++slot);
      placed = true;
    }
    rank += binom(v, ++slot);
  }
  if (!placed) rank += binom(extra, ++slot);
  return rank;
}

// advances an ascending m-subset of {0..limit-1} to its colex successor
bool next_subset(std::span<int> pos, int limit) {
  const int m = static_cast<int>(pos.size());
  for (int i = 0; i < m; ++i) {
    const int bound = (i + 1 < m) ? pos[i + 1] : limit;
    if (pos[i] + 1 < bound) {
      ++pos[i];
      for (int l = 0; l < i; ++l) pos[l] = l;
      return true;
    }
  }
  return false;
}

// evaluation policy backed by incremental regression states
struct RegressionPolicy {
  using State = RegressionState;
  const BfContext& bf;
  bool extend(const State& src, int j, State& dst) const {
    auto next = src.try_extend(bf.data(), j);
    if (!next) return false;
    dst = std::move(*next);
    return true;
  }
  double log_bf(const State& state) const { return bf.log_bf(state); }
  static const ModelVector& model_of(const State& state) { return state.model(); }
  int max_depth(int t) const { return bf.data().max_model_size() - t; }
};

// evaluation policy backed by an arbitrary model -> log BF function
struct FunctionPolicy {
  using State = ModelVector;
  const LogBf& fn;
  bool extend(const State& src, int j, State& dst) const {
    dst = src.with(j);
    return true;
  }
  double log_bf(const State& state) const { return fn(state); }
  static const ModelVector& model_of(const State& state) { return state; }
  int max_depth(int) const { return std::numeric_limits<int>::max(); }
};

template <class Policy>
struct Level {
  std::vector<double> log_bf;
  std::vector<double> log_phi;
  std::vector<typename Policy::State> states;
};

template <class Policy>
Proposal build_impl(const typename Policy::State& root_state, int k, const PfsPrior& prior,
                    const Policy& policy, ProposalDiagnostics* diag) {
  if (k < 1) throw std::domain_error("look-ahead depth must be >= 1");
  const ModelVector& root = Policy::model_of(root_state);
  const int p = prior.dimension();
  const int t = root.size();

  Proposal out;
  out.selection.assign(p, 0.0);
  out.child_lookahead.assign(p, kNaN);
  out.log_bf = policy.log_bf(root_state);

  const double stop0 = prior.stop_prob(root);
  if (stop0 >= 1.0) {
    // certain stop: the prior mappings pass through unchanged
    out.stop_prob = 1.0;
    out.log_lookahead = out.log_bf;
    if (!root.full()) prior.selection_probs(root, out.selection);
    return out;
  }

  std::vector<int> avail;
  avail.reserve(p - t);
  for (int j = 1; j <= p; ++j)
    if (!root.contains(j)) avail.push_back(j);
  const int A = static_cast<int>(avail.size());
  const int depth = std::min({k, A, prior.max_size() - t, policy.max_depth(t)});

  if (depth < 1) {
    // nothing can be extended although stopping is not certain
    out.stop_prob = 1.0;
    out.forced_stop = true;
    out.log_lookahead = out.log_bf;
    prior.selection_probs(root, out.selection);
    if (diag) ++diag->forced_stops;
    return out;
  }

  const Binomials binom(A, depth);

  // build levels 0..depth; states kept only while the next level needs them
  std::vector<Level<Policy>> levels(depth + 1);
  levels[0].log_bf = {out.log_bf};
  levels[0].log_phi = {kNaN};
  for (int m = 0; m < depth; ++m) {
    Level<Policy>& next = levels[m + 1];
    const std::size_t count = binom(A, m + 1);
    if (count > (std::size_t{1} << 28))
      throw NumericError("look-ahead tree too large; reduce the depth k");
    next.log_bf.assign(count, kNaN);
    next.log_phi.assign(count, kNaN);
    const bool keep_states = (m + 1 < depth);
    if (keep_states) next.states.resize(count);

    typename Policy::State scratch;
    for (int c = m; c < A; ++c) {
      const std::size_t base = binom(c, m + 1);
      const std::size_t prefixes = binom(c, m);
      for (std::size_t r = 0; r < prefixes; ++r) {
        const typename Policy::State* parent;
        if (m == 0) {
          parent = &root_state;
        } else {
          if (std::isnan(levels[m].log_bf[r])) {
            if (diag) ++diag->collinear_branches;
            continue;  // collinear ancestry: whole branch unavailable
          }
          parent = &levels[m].states[r];
        }
        if (!policy.extend(*parent, avail[c], scratch)) {
          if (diag) ++diag->collinear_branches;
          continue;
        }
        next.log_bf[base + r] = policy.log_bf(scratch);
        if (keep_states) next.states[base + r] = std::move(scratch);
      }
    }
    if (m >= 1) levels[m].states = {};
  }

  // leaves take their Bayes factor; inner levels combine stop and child mass
  levels[depth].log_phi = levels[depth].log_bf;
  std::vector<double> sel(p);
  std::vector<int> pos;
  ModelVector scratch_model = root;
  for (int m = depth - 1; m >= 1; --m) {
    pos.assign(m, 0);
    for (int i = 0; i < m; ++i) pos[i] = i;
    std::size_t rank = 0;
    do {
      if (std::isnan(levels[m].log_bf[rank])) {
        ++rank;
        continue;
      }
      // materialize the node's model
      for (int i = 0; i < m; ++i) scratch_model.add(avail[pos[i]]);
      const double stop = prior.stop_prob(scratch_model);
      if (stop >= 1.0) {
        levels[m].log_phi[rank] = levels[m].log_bf[rank];
      } else {
        prior.selection_probs(scratch_model, sel);
        LogSumAccumulator acc;
        if (stop > 0.0) acc.add(std::log(stop) + levels[m].log_bf[rank]);
        const double log_cont = std::log1p(-stop);
        int next_pos = 0;
        for (int c = 0; c < A; ++c) {
          if (next_pos < m && pos[next_pos] == c) {
            ++next_pos;
            continue;
          }
          const double lambda = sel[avail[c] - 1];
          if (lambda <= 0.0) continue;
          const double child = levels[m + 1].log_phi[rank_with(pos, c, binom)];
          if (std::isnan(child)) continue;
          acc.add(log_cont + std::log(lambda) + child);
        }
        levels[m].log_phi[rank] = acc.empty() ? levels[m].log_bf[rank] : acc.value();
      }
      for (int i = 0; i < m; ++i) scratch_model.remove(avail[pos[i]]);
      ++rank;
    } while (next_subset(pos, A));
  }

  // root combination and the proposal mappings
  prior.selection_probs(root, sel);
  LogSumAccumulator acc;
  if (stop0 > 0.0) acc.add(std::log(stop0) + out.log_bf);
  const double log_cont = std::log1p(-stop0);
  bool any_child = false;
  for (int c = 0; c < A; ++c) {
    const double child = levels[1].log_phi[c];
    out.child_lookahead[avail[c] - 1] = child;
    const double lambda = sel[avail[c] - 1];
    if (lambda <= 0.0 || std::isnan(child)) continue;
    acc.add(log_cont + std::log(lambda) + child);
    any_child = true;
  }
  out.log_lookahead = acc.empty() ? out.log_bf : acc.value();

  if (!any_child) {
    out.stop_prob = 1.0;
    out.forced_stop = true;
    out.selection = sel;
    if (diag) ++diag->forced_stops;
    return out;
  }

  const double log_stop_mass = stop0 > 0.0 ? std::log(stop0) + out.log_bf : kNegInf;
  out.stop_prob = std::clamp(std::exp(log_stop_mass - out.log_lookahead), 0.0, 1.0);
  const double share = log_stop_mass - out.log_lookahead;
  const double log_denom = share < -1e-15 ? out.log_lookahead + log1m_exp(share) : kNegInf;
  if (log_denom == kNegInf) {
    // continuation mass cancelled away; fall back to the prior selection
    out.selection = sel;
    if (diag) ++diag->cancellation_fallbacks;
    return out;
  }

  double total = 0.0;
  for (int c = 0; c < A; ++c) {
    const double lambda = sel[avail[c] - 1];
    const double child = out.child_lookahead[avail[c] - 1];
    if (lambda <= 0.0 || std::isnan(child)) continue;
    const double v = std::exp(std::log(lambda) + log_cont + child - log_denom);
    out.selection[avail[c] - 1] = v;
    total += v;
  }
  if (total <= 0.0) {
    out.stop_prob = 1.0;
    out.forced_stop = true;
    out.selection = sel;
    if (diag) ++diag->forced_stops;
    return out;
  }
  for (double& v : out.selection) v /= total;
  return out;
}

}  // namespace

double log_lookahead_bf(const ModelVector& model, int k, const PfsPrior& prior,
                        const LogBf& log_bf) {
  return build_proposal(model, k, prior, log_bf).log_lookahead;
}

double log_lookahead_bf(const RegressionState& state, int k, const PfsPrior& prior,
                        const BfContext& bf) {
  return build_proposal(state, k, prior, bf).log_lookahead;
}

Proposal build_proposal(const ModelVector& model, int k, const PfsPrior& prior,
                        const LogBf& log_bf, ProposalDiagnostics* diag) {
  return build_impl(model, k, prior, FunctionPolicy{log_bf}, diag);
}

Proposal build_proposal(const RegressionState& state, int k, const PfsPrior& prior,
                        const BfContext& bf, ProposalDiagnostics* diag) {
  return build_impl(state, k, prior, RegressionPolicy{bf}, diag);
}

}  // namespace lips
