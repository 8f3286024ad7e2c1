#include "lips/mc3.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "lips/errors.hpp"
#include "lips/math.hpp"
#include "lips/rng.hpp"

namespace lips {

namespace {

class SymmetricLogPrior final : public LogPriorMass {
 public:
  explicit SymmetricLogPrior(std::span<const double> q) {
    const int p = static_cast<int>(q.size()) - 1;
    log_mass_.resize(q.size());
    double log_binom = 0.0;  // log C(p, s), updated incrementally
    for (int s = 0; s <= p; ++s) {
      if (s > 0) log_binom += std::log(double(p - s + 1)) - std::log(double(s));
      log_mass_[s] = q[s] > 0.0 ? std::log(q[s]) - log_binom : kNegInf;
    }
  }
  double log_prob(const ModelVector& model) const override {
    return log_mass_[model.size()];
  }

 private:
  std::vector<double> log_mass_;
};

class TabulatedLogPrior final : public LogPriorMass {
 public:
  explicit TabulatedLogPrior(const PfsPrior& prior)
      : table_(marginal_model_table(prior)) {}
  double log_prob(const ModelVector& model) const override {
    const double v = table_[model.mask()];
    return v > 0.0 ? std::log(v) : kNegInf;
  }

 private:
  std::vector<double> table_;
};

enum Move { kAdd = 0, kDelete = 1, kSwap = 2 };

struct Feasible {
  int types = 0;
  bool add = false, del = false, swap = false;
};

Feasible feasible_moves(int size, int p, int cap) {
  Feasible f;
  f.add = size < cap;
  f.del = size > 0;
  f.swap = size > 0 && size < p;
  f.types = int(f.add) + int(f.del) + int(f.swap);
  return f;
}

double log_move_prob(const Feasible& f, Move move, int size, int p) {
  // uniform over feasible types, then uniform over that type's moves
  const double log_type = -std::log(double(f.types));
  switch (move) {
    case kAdd:
      return log_type - std::log(double(p - size));
    case kDelete:
      return log_type - std::log(double(size));
    case kSwap:
      return log_type - std::log(double(size) * double(p - size));
  }
  return kNegInf;
}

}  // namespace

LogPriorMassPtr symmetric_log_prior(std::span<const double> q) {
  return std::make_shared<SymmetricLogPrior>(q);
}

LogPriorMassPtr tabulated_log_prior(const PfsPrior& prior) {
  return std::make_shared<TabulatedLogPrior>(prior);
}

Mc3Result mc3_run(const RegressionData& data, const LogPriorMass& prior,
                  const CoefficientPrior& coef_prior, const Mc3Config& config) {
  const int p = data.p;
  if (p < 1) throw ConfigError("mc3 needs at least one candidate variable");
  if (config.iterations <= config.burnin)
    throw ConfigError("mc3 needs iterations > burnin");
  const int cap = data.max_model_size();

  // log pi(model) + log BF0(model), rebuilt from scratch per candidate;
  // collinear candidates get -inf and are rejected
  const auto log_target = [&](const ModelVector& model) -> double {
    const double lp = prior.log_prob(model);
    if (lp == kNegInf) return kNegInf;
    try {
      const RegressionState st = RegressionState::for_model(data, model);
      return lp + log_bf0(st, data, coef_prior);
    } catch (const CollinearityError&) {
      return kNegInf;
    }
  };

  ModelVector current(p);
  double current_target = log_target(current);

  Mc3Result out;
  out.pip.assign(p, 0.0);
  out.pip_se.assign(p, 0.0);
  const std::int64_t post = config.iterations - config.burnin;
  const int n_batches = std::max(2, config.batches);
  const std::int64_t batch_len = std::max<std::int64_t>(1, post / n_batches);
  std::vector<std::vector<double>> batch_incl(n_batches, std::vector<double>(p, 0.0));
  std::vector<std::int64_t> batch_count(n_batches, 0);
  if (config.track_occupancy) {
    if (p > kEnumerationLimit) throw ConfigError("occupancy tracking needs small p");
    out.visit_counts.assign(std::size_t{1} << p, 0);
  }

  std::vector<int> included, excluded;
  std::int64_t accepted = 0;
  for (std::int64_t it = 0; it < config.iterations; ++it) {
    rng::Stream stream = rng::substream(config.seed, rng::Tag::mc3, it);
    const int size = current.size();
    const Feasible f = feasible_moves(size, p, cap);
    if (f.types == 0) throw ConfigError("no feasible mc3 move from the current model");

    // pick the move type uniformly among the feasible ones
    int which = static_cast<int>(stream.below(static_cast<std::uint64_t>(f.types)));
    Move move = kAdd;
    for (Move m : {kAdd, kDelete, kSwap}) {
      const bool ok = (m == kAdd && f.add) || (m == kDelete && f.del) || (m == kSwap && f.swap);
      if (!ok) continue;
      if (which == 0) {
        move = m;
        break;
      }
      --which;
    }

    included.clear();
    excluded.clear();
    for (int j = 1; j <= p; ++j)
      (current.contains(j) ? included : excluded).push_back(j);

    ModelVector candidate = current;
    if (move == kAdd) {
      candidate.add(excluded[stream.below(excluded.size())]);
    } else if (move == kDelete) {
      candidate.remove(included[stream.below(included.size())]);
    } else {
      candidate.remove(included[stream.below(included.size())]);
      candidate.add(excluded[stream.below(excluded.size())]);
    }

    const double cand_target = log_target(candidate);
    if (cand_target > kNegInf) {
      const Feasible fr = feasible_moves(candidate.size(), p, cap);
      const Move reverse = move == kSwap ? kSwap : (move == kAdd ? kDelete : kAdd);
      const double log_fwd = log_move_prob(f, move, size, p);
      const double log_rev = log_move_prob(fr, reverse, candidate.size(), p);
      const double log_alpha = cand_target - current_target + log_rev - log_fwd;
      if (log_alpha >= 0.0 || std::log(stream.uniform()) < log_alpha) {
        current = std::move(candidate);
        current_target = cand_target;
        ++accepted;
      }
    }

    if (it >= config.burnin) {
      const std::int64_t k = it - config.burnin;
      const int b = static_cast<int>(std::min<std::int64_t>(k / batch_len, n_batches - 1));
      ++batch_count[b];
      current.for_each([&](int j) { batch_incl[b][j - 1] += 1.0; });
      if (config.track_occupancy) ++out.visit_counts[current.mask()];
      if (config.thin > 0 && k % config.thin == 0) out.chain.push_back(current);
      ++out.kept;
    }
  }

  // batch means give the PIPs and their Monte Carlo standard errors
  std::vector<double> means(n_batches);
  for (int j = 0; j < p; ++j) {
    double grand = 0.0;
    std::int64_t total = 0;
    for (int b = 0; b < n_batches; ++b) {
      means[b] = batch_count[b] > 0 ? batch_incl[b][j] / batch_count[b] : 0.0;
      grand += batch_incl[b][j];
      total += batch_count[b];
    }
    out.pip[j] = grand / total;
    double ss = 0.0;
    int used = 0;
    for (int b = 0; b < n_batches; ++b) {
      if (batch_count[b] == 0) continue;
      ss += (means[b] - out.pip[j]) * (means[b] - out.pip[j]);
      ++used;
    }
    out.pip_se[j] = used > 1 ? std::sqrt(ss / (double(used) * double(used - 1))) : 0.0;
  }
  out.accept_rate = static_cast<double>(accepted) / config.iterations;
  return out;
}

}  // namespace lips
