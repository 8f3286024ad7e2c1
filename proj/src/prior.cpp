#include "lips/prior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lips/errors.hpp"

namespace lips {

namespace {

void validate_size_distribution(std::span<const double> q) {
  if (q.size() < 2) throw std::domain_error("size distribution needs p+1 >= 2 entries");
  double total = 0.0;
  for (double v : q) {
    if (v < 0.0) throw std::domain_error("size distribution entries must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("size distribution must sum to 1");
}

int last_positive(std::span<const double> q) {
  for (int s = static_cast<int>(q.size()) - 1; s >= 0; --s)
    if (q[s] > 0.0) return s;
  return 0;
}

class SizeStopping final : public StoppingRule {
 public:
  SizeStopping(std::vector<double> h, int s_max) : h_(std::move(h)), s_max_(s_max) {}
  double stop_prob(const ModelVector& model) const override {
    const int s = model.size();
    if (s >= s_max_ || s >= static_cast<int>(h_.size())) return 1.0;
    return h_[s];
  }
  int max_size() const override { return s_max_; }

 private:
  std::vector<double> h_;
  int s_max_;
};

class UniformSelection final : public SelectionRule {
 public:
  explicit UniformSelection(int p) : p_(p) {}
  void selection_probs(const ModelVector& model, std::span<double> out) const override {
    const int excluded = p_ - model.size();
    if (excluded <= 0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double v = 1.0 / excluded;
    for (int j = 1; j <= p_; ++j) out[j - 1] = model.contains(j) ? 0.0 : v;
  }

 private:
  int p_;
};

class WeightedSelection final : public SelectionRule {
 public:
  WeightedSelection(std::vector<double> w) : w_(std::move(w)) {}
  void selection_probs(const ModelVector& model, std::span<double> out) const override {
    const int p = model.dimension();
    double total = 0.0;
    for (int j = 1; j <= p; ++j) {
      out[j - 1] = model.contains(j) ? 0.0 : w_[j - 1];
      total += out[j - 1];
    }
    if (model.size() == p) return;
    if (total <= 0.0)
      throw ConfigError("weighted selection: no selectable variable has positive weight");
    for (int j = 0; j < p; ++j) out[j] /= total;
  }

 private:
  std::vector<double> w_;
};

class ConditionalSelection final : public SelectionRule {
 public:
  ConditionalSelection(SelectionPtr base, std::vector<ConditionalRule> rules)
      : base_(std::move(base)), rules_(std::move(rules)) {}
  void selection_probs(const ModelVector& model, std::span<double> out) const override {
    base_->selection_probs(model, out);
    if (model.full()) return;
    for (const auto& rule : rules_) {
      if (rule.factor == 0.0) {
        // interaction constraint: selectable only once all triggers are in
        bool all_in = true;
        for (int t : rule.triggers) all_in = all_in && model.contains(t);
        if (!all_in) out[rule.target - 1] = 0.0;
      } else {
        bool any_in = false;
        for (int t : rule.triggers) any_in = any_in || model.contains(t);
        if (any_in) out[rule.target - 1] *= rule.factor;
      }
    }
    double total = std::accumulate(out.begin(), out.end(), 0.0);
    if (total <= 0.0)
      throw ConfigError("conditional selection left no selectable variable");
    for (double& v : out) v /= total;
  }

 private:
  SelectionPtr base_;
  std::vector<ConditionalRule> rules_;
};

// index of the first block with some but not all members included, -1 if none
int partial_block(const std::vector<std::vector<int>>& blocks, const ModelVector& model) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    int in = 0;
    for (int j : blocks[b]) in += model.contains(j);
    if (in > 0 && in < static_cast<int>(blocks[b].size())) return static_cast<int>(b);
  }
  return -1;
}

class BlockStopping final : public StoppingRule {
 public:
  BlockStopping(StoppingPtr base, std::shared_ptr<const std::vector<std::vector<int>>> blocks)
      : base_(std::move(base)), blocks_(std::move(blocks)), limit_(0) {
    // a partially included block suppresses stopping, so no size bound short
    // of completing every block can be guaranteed
    for (const auto& blk : *blocks_)
      limit_ = std::max(limit_, static_cast<int>(blk.size()));
  }
  double stop_prob(const ModelVector& model) const override {
    if (partial_block(*blocks_, model) >= 0) return 0.0;
    return base_->stop_prob(model);
  }
  int max_size() const override { return base_->max_size() + std::max(0, limit_ - 1); }

 private:
  StoppingPtr base_;
  std::shared_ptr<const std::vector<std::vector<int>>> blocks_;
  int limit_;
};

class BlockSelection final : public SelectionRule {
 public:
  BlockSelection(SelectionPtr base, std::shared_ptr<const std::vector<std::vector<int>>> blocks)
      : base_(std::move(base)), blocks_(std::move(blocks)) {}
  void selection_probs(const ModelVector& model, std::span<double> out) const override {
    const int b = partial_block(*blocks_, model);
    if (b < 0) {
      base_->selection_probs(model, out);
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    int missing = 0;
    for (int j : (*blocks_)[b]) missing += !model.contains(j);
    for (int j : (*blocks_)[b])
      if (!model.contains(j)) out[j - 1] = 1.0 / missing;
  }

 private:
  SelectionPtr base_;
  std::shared_ptr<const std::vector<std::vector<int>>> blocks_;
};

class ClusterSelection final : public SelectionRule {
 public:
  explicit ClusterSelection(std::vector<std::vector<int>> clusters)
      : clusters_(std::move(clusters)) {}
  void selection_probs(const ModelVector& model, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    int available = 0;
    for (const auto& cluster : clusters_) {
      for (int j : cluster)
        if (!model.contains(j)) {
          ++available;
          break;
        }
    }
    if (available == 0) return;
    for (const auto& cluster : clusters_) {
      int excluded = 0;
      for (int j : cluster) excluded += !model.contains(j);
      if (excluded == 0) continue;
      const double each = 1.0 / (static_cast<double>(available) * excluded);
      for (int j : cluster)
        if (!model.contains(j)) out[j - 1] = each;
    }
  }

 private:
  std::vector<std::vector<int>> clusters_;
};

class TabStopping final : public StoppingRule {
 public:
  TabStopping(std::shared_ptr<const std::vector<double>> table, int s_max)
      : table_(std::move(table)), s_max_(s_max) {}
  double stop_prob(const ModelVector& model) const override {
    return (*table_)[model.mask()];
  }
  int max_size() const override { return s_max_; }

 private:
  std::shared_ptr<const std::vector<double>> table_;
  int s_max_;
};

class TabSelection final : public SelectionRule {
 public:
  TabSelection(std::shared_ptr<const std::vector<double>> table, int p)
      : table_(std::move(table)), p_(p) {}
  void selection_probs(const ModelVector& model, std::span<double> out) const override {
    const std::size_t base = model.mask() * static_cast<std::size_t>(p_);
    for (int j = 0; j < p_; ++j) out[j] = (*table_)[base + j];
  }

 private:
  std::shared_ptr<const std::vector<double>> table_;
  int p_;
};

}  // namespace

// ---- PfsPrior ---------------------------------------------------------------

PfsPrior::PfsPrior(int p, StoppingPtr stopping, SelectionPtr selection)
    : p_(p), cap_(p), stopping_(std::move(stopping)), selection_(std::move(selection)) {
  if (p < 1) throw std::domain_error("prior dimension must be positive");
  if (!stopping_ || !selection_) throw std::domain_error("prior rules must be non-null");
}

double PfsPrior::stop_prob(const ModelVector& model) const {
  if (model.dimension() != p_) throw std::domain_error("model dimension mismatch");
  if (model.size() >= max_size()) return 1.0;
  const double v = stopping_->stop_prob(model);
  return std::clamp(v, 0.0, 1.0);
}

void PfsPrior::selection_probs(const ModelVector& model, std::span<double> out) const {
  if (model.dimension() != p_ || static_cast<int>(out.size()) != p_)
    throw std::domain_error("model dimension mismatch");
  selection_->selection_probs(model, out);
}

std::vector<double> PfsPrior::selection_probs(const ModelVector& model) const {
  std::vector<double> out(p_);
  selection_probs(model, out);
  return out;
}

int PfsPrior::max_size() const { return std::min(cap_, std::min(p_, stopping_->max_size())); }

PfsPrior PfsPrior::with_max_size(int cap) const {
  PfsPrior out = *this;
  out.cap_ = std::clamp(cap, 0, p_);
  return out;
}

// ---- stopping rules ---------------------------------------------------------

StoppingPtr size_prior_to_h(std::span<const double> q) {
  validate_size_distribution(q);
  const int p = static_cast<int>(q.size()) - 1;
  const int s_max = last_positive(q);
  std::vector<double> h(p, 1.0);
  double remaining = 1.0;  // 1 - sum_{r<s} q_r
  for (int s = 0; s < p; ++s) {
    h[s] = remaining > 1e-300 ? std::clamp(q[s] / remaining, 0.0, 1.0) : 1.0;
    remaining -= q[s];
  }
  return std::make_shared<SizeStopping>(std::move(h), s_max);
}

StoppingPtr size_stopping(std::vector<double> h, int s_max) {
  for (double v : h)
    if (v < 0.0 || v > 1.0) throw std::domain_error("stopping probabilities must be in [0,1]");
  return std::make_shared<SizeStopping>(std::move(h), s_max);
}

// ---- selection rules --------------------------------------------------------

SelectionPtr uniform_selection(int p) {
  if (p < 1) throw std::domain_error("dimension must be positive");
  return std::make_shared<UniformSelection>(p);
}

SelectionPtr weighted_selection(int p, std::vector<double> base_weights, double boost,
                                std::span<const int> boosted) {
  if (boost < 1.0) throw std::domain_error("boost factor must be >= 1");
  if (base_weights.empty()) base_weights.assign(p, 1.0);
  if (static_cast<int>(base_weights.size()) != p)
    throw std::domain_error("weight vector length must equal p");
  for (double w : base_weights)
    if (w < 0.0) throw std::domain_error("weights must be nonnegative");
  for (int j : boosted) {
    if (j < 1 || j > p) throw std::domain_error("boosted index out of range");
    base_weights[j - 1] *= boost;
  }
  return std::make_shared<WeightedSelection>(std::move(base_weights));
}

SelectionPtr conditional_selection(SelectionPtr base, std::vector<ConditionalRule> rules) {
  for (const auto& rule : rules) {
    if (rule.target < 1) throw std::domain_error("rule target must be a 1-based index");
    if (rule.factor < 0.0) throw std::domain_error("rule factor must be >= 0");
    for (int t : rule.triggers)
      if (t < 1) throw std::domain_error("rule trigger must be a 1-based index");
  }
  return std::make_shared<ConditionalSelection>(std::move(base), std::move(rules));
}

std::pair<StoppingPtr, SelectionPtr> block_rule(StoppingPtr stopping, SelectionPtr selection,
                                                std::vector<std::vector<int>> blocks) {
  std::vector<int> seen;
  for (const auto& blk : blocks) {
    if (blk.empty()) throw std::domain_error("blocks must be non-empty");
    for (int j : blk) {
      if (j < 1) throw std::domain_error("block index must be a 1-based index");
      if (std::find(seen.begin(), seen.end(), j) != seen.end())
        throw std::domain_error("blocks must be disjoint");
      seen.push_back(j);
    }
  }
  auto shared = std::make_shared<const std::vector<std::vector<int>>>(std::move(blocks));
  return {std::make_shared<BlockStopping>(std::move(stopping), shared),
          std::make_shared<BlockSelection>(std::move(selection), shared)};
}

std::vector<std::vector<int>> correlation_clusters(const Eigen::MatrixXd& corr,
                                                   double threshold) {
  const int p = static_cast<int>(corr.rows());
  if (corr.cols() != p) throw std::domain_error("correlation matrix must be square");
  for (int i = 0; i < p; ++i) {
    if (std::abs(corr(i, i) - 1.0) > 1e-8)
      throw std::domain_error("correlation matrix must have unit diagonal");
    for (int j = i + 1; j < p; ++j)
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-10)
        throw std::domain_error("correlation matrix must be symmetric");
  }
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw std::domain_error("clustering threshold must be in (0,1]");

  // complete-linkage agglomeration on similarity |corr|
  Eigen::MatrixXd sim = corr.cwiseAbs();
  std::vector<std::vector<int>> clusters(p);
  std::vector<bool> alive(p, true);
  for (int i = 0; i < p; ++i) clusters[i] = {i + 1};

  while (true) {
    int best_a = -1, best_b = -1;
    double best = -1.0;
    for (int a = 0; a < p; ++a) {
      if (!alive[a]) continue;
      for (int b = a + 1; b < p; ++b) {
        if (!alive[b]) continue;
        if (sim(a, b) > best) {
          best = sim(a, b);
          best_a = a;
          best_b = b;
        }
        // ties resolve to the smallest (a,b) pair, which the scan order gives
      }
    }
    if (best_a < 0 || best < threshold) break;
    // merge b into a; complete linkage keeps the minimum cross similarity
    for (int c = 0; c < p; ++c) {
      if (!alive[c] || c == best_a || c == best_b) continue;
      const double s = std::min(sim(best_a, c), sim(best_b, c));
      sim(best_a, c) = sim(c, best_a) = s;
    }
    auto& dst = clusters[best_a];
    dst.insert(dst.end(), clusters[best_b].begin(), clusters[best_b].end());
    std::sort(dst.begin(), dst.end());
    clusters[best_b].clear();
    alive[best_b] = false;
  }

  std::vector<std::vector<int>> out;
  for (int i = 0; i < p; ++i)
    if (alive[i]) out.push_back(std::move(clusters[i]));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

SelectionPtr dilution_selection(const Eigen::MatrixXd& corr, double threshold) {
  return std::make_shared<ClusterSelection>(correlation_clusters(corr, threshold));
}

// ---- whole priors -----------------------------------------------------------

PfsPrior beta_binomial_prior(int p) {
  if (p < 1) throw std::domain_error("dimension must be positive");
  std::vector<double> h(p);
  for (int s = 0; s < p; ++s) h[s] = 1.0 / (p + 1 - s);
  return PfsPrior(p, size_stopping(std::move(h), p), uniform_selection(p));
}

PfsPrior size_vector_prior(std::span<const double> q) {
  const int p = static_cast<int>(q.size()) - 1;
  return PfsPrior(p, size_prior_to_h(q), uniform_selection(p));
}

PfsPrior symmetric_pfs(std::span<const double> q) {
  validate_size_distribution(q);
  const int p = static_cast<int>(q.size()) - 1;
  const int s_max = last_positive(q);
  // h(t) = pi_t * C(p,t) / prod_{s<t} (1 - h(s)) with pi_t = q_t / C(p,t)
  std::vector<double> h(p, 1.0);
  double continue_prob = 1.0;  // prod_{s<t} (1 - h(s))
  for (int t = 0; t < p; ++t) {
    h[t] = continue_prob > 1e-300 ? std::clamp(q[t] / continue_prob, 0.0, 1.0) : 1.0;
    continue_prob *= 1.0 - h[t];
  }
  return PfsPrior(p, size_stopping(std::move(h), s_max), uniform_selection(p));
}

// ---- tabulated priors -------------------------------------------------------

TabulatedPfs::TabulatedPfs(int p, std::vector<double> stop, std::vector<double> select)
    : p_(p) {
  if (p < 1 || p > kEnumerationLimit)
    throw ConfigError("tabulated priors limited to p <= " + std::to_string(kEnumerationLimit));
  const std::size_t n = std::size_t{1} << p;
  if (stop.size() != n || select.size() != n * static_cast<std::size_t>(p))
    throw std::domain_error("tabulated prior has wrong table sizes");
  stop_holder_ = std::make_shared<const std::vector<double>>(std::move(stop));
  select_holder_ = std::make_shared<const std::vector<double>>(std::move(select));
  stop_ = *stop_holder_;
  select_ = *select_holder_;
}

PfsPrior TabulatedPfs::as_prior() const {
  // smallest size at which every model stops for sure
  int s_max = 0;
  const std::size_t n = std::size_t{1} << p_;
  for (std::size_t mask = 0; mask + 1 < n; ++mask)
    if (stop_[mask] < 1.0)
      s_max = std::max(s_max, std::popcount(mask) + 1);
  return PfsPrior(p_, std::make_shared<TabStopping>(stop_holder_, s_max),
                  std::make_shared<TabSelection>(select_holder_, p_));
}

namespace {

struct TableBuild {
  std::vector<double> stop;
  std::vector<double> select;
};

TableBuild build_pfs_tables(std::span<const double> pi, int p) {
  const std::size_t n = std::size_t{1} << p;
  TableBuild out;
  out.stop.assign(n, 1.0);
  out.select.assign(n * static_cast<std::size_t>(p), 0.0);

  if (p == 1) {
    out.stop[0] = std::clamp(pi[0], 0.0, 1.0);
    out.select[0] = 1.0;
    return out;
  }

  const std::uint64_t bit = 1ull << (p - 1);
  const std::size_t half = n >> 1;
  std::vector<double> folded(half);
  for (std::size_t m = 0; m < half; ++m) folded[m] = pi[m] + pi[m | bit];
  const TableBuild sub = build_pfs_tables(folded, p - 1);

  std::vector<double> bar_sel(p);
  for (std::size_t m = 0; m < half; ++m) {
    const int s = std::popcount(m);
    // lift the (p-1)-variable mappings: the last predictor is only selectable
    // once everything else is in
    double bar_stop;
    std::fill(bar_sel.begin(), bar_sel.end(), 0.0);
    if (s < p - 1) {
      bar_stop = sub.stop[m];
      for (int j = 0; j < p - 1; ++j)
        bar_sel[j] = sub.select[m * static_cast<std::size_t>(p - 1) + j];
    } else {
      bar_stop = 1.0;
      bar_sel[p - 1] = 1.0;
    }

    double* row = out.select.data() + m * static_cast<std::size_t>(p);
    if (pi[m | bit] > 0.0) {
      // the mass on model+last is diverted through a new selection branch
      const double denom = folded[m] - bar_stop * pi[m];  // = (1 - rho) * folded
      out.stop[m] = std::clamp(bar_stop * pi[m] / folded[m], 0.0, 1.0);
      if (denom <= 0.0) {
        // stopping certain; the selection row is irrelevant, keep it valid
        const int excluded = p - s;
        for (int j = 0; j < p; ++j)
          row[j] = (m >> j) & 1 ? 0.0 : 1.0 / excluded;
        out.stop[m] = 1.0;
      } else {
        for (int j = 0; j < p - 1; ++j)
          row[j] = (1.0 - bar_stop) * bar_sel[j] * folded[m] / denom;
        row[p - 1] = pi[m | bit] * bar_stop / denom;
      }
    } else {
      out.stop[m] = bar_stop;
      for (int j = 0; j < p; ++j) row[j] = bar_sel[j];
    }
  }

  // models already containing the last predictor stop unless incomplete, in
  // which case any remaining variable is equally likely
  for (std::size_t m = 0; m < half; ++m) {
    const std::size_t full_mask = (m | bit);
    const int s = std::popcount(full_mask);
    out.stop[full_mask] = 1.0;
    if (s < p) {
      double* row = out.select.data() + full_mask * static_cast<std::size_t>(p);
      for (int j = 0; j < p; ++j)
        row[j] = (full_mask >> j) & 1 ? 0.0 : 1.0 / (p - s);
    }
  }
  return out;
}

}  // namespace

TabulatedPfs pfs_from_distribution(std::span<const double> pi, int p) {
  if (p < 1 || p > kEnumerationLimit)
    throw ConfigError("pfs_from_distribution limited to p <= " +
                      std::to_string(kEnumerationLimit));
  if (pi.size() != (std::size_t{1} << p))
    throw std::domain_error("distribution table must have 2^p entries");
  double total = 0.0;
  for (double v : pi) {
    if (v < 0.0) throw std::domain_error("distribution entries must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("distribution must sum to 1");
  TableBuild tables = build_pfs_tables(pi, p);
  return TabulatedPfs(p, std::move(tables.stop), std::move(tables.select));
}

// ---- marginals and simulation -----------------------------------------------

std::vector<double> marginal_model_table(const PfsPrior& prior) {
  const int p = prior.dimension();
  if (p > kEnumerationLimit)
    throw ConfigError("marginal table limited to p <= " + std::to_string(kEnumerationLimit));
  const std::size_t n = std::size_t{1} << p;
  std::vector<double> reach(n, 0.0), marginal(n, 0.0);
  reach[0] = 1.0;
  std::vector<double> sel(p);
  for_each_model(p, [&](const ModelVector& model) {
    const std::uint64_t mask = model.mask();
    const double r = reach[mask];
    if (r == 0.0) return;
    const double stop = model.full() ? 1.0 : prior.stop_prob(model);
    marginal[mask] = r * stop;
    if (model.full() || stop >= 1.0) return;
    prior.selection_probs(model, sel);
    for (int j = 1; j <= p; ++j)
      if (sel[j - 1] > 0.0 && !model.contains(j))
        reach[mask | (1ull << (j - 1))] += r * (1.0 - stop) * sel[j - 1];
  });
  return marginal;
}

double marginal_model_probability(const PfsPrior& prior, const ModelVector& model) {
  return marginal_model_table(prior)[model.mask()];
}

std::pair<ModelVector, std::vector<PathStep>> simulate_pfs(const PfsPrior& prior,
                                                           rng::Stream& stream) {
  const int p = prior.dimension();
  ModelVector model(p);
  std::vector<PathStep> steps;
  std::vector<double> sel(p);
  for (int t = 1; t <= p; ++t) {
    const double stop = prior.stop_prob(model);
    if (stream.uniform() < stop) {
      steps.push_back({true, std::nullopt});
      break;
    }
    prior.selection_probs(model, sel);
    const double u = stream.uniform();
    double cum = 0.0;
    int picked = 0;
    for (int j = 1; j <= p; ++j) {
      if (sel[j - 1] <= 0.0) continue;
      cum += sel[j - 1];
      picked = j;
      if (u < cum) break;
    }
    if (picked == 0) throw ConfigError("selection rule returned no positive probability");
    model.add(picked);
    steps.push_back({false, picked});
  }
  return {std::move(model), std::move(steps)};
}

}  // namespace lips
