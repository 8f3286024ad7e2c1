#include "lips/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "lips/errors.hpp"
#include "lips/math.hpp"
#include "lips/rng.hpp"

namespace lips {

namespace {

int sample_index(std::span<const double> probs, double u) {
  double cum = 0.0;
  int picked = -1;
  for (int j = 0; j < static_cast<int>(probs.size()); ++j) {
    if (probs[j] <= 0.0) continue;
    cum += probs[j];
    picked = j;
    if (u < cum) break;
  }
  return picked;
}

}  // namespace

Particle propagate_step(const Particle& particle, int t, const Proposal& proposal,
                        const PfsPrior& prior, const BfContext& bf, double u_stop,
                        double u_select) {
  if (particle.stopped) return particle;  // identity kernel, weight factor 1
  if (particle.model().size() != t - 1)
    throw std::domain_error("unstopped particle must have size t-1 at step t");

  Particle out = particle;
  out.step = t;
  const double prior_stop = prior.stop_prob(particle.model());

  if (u_stop < proposal.stop_prob) {
    // stop: prior/proposal ratio only, the Bayes factor term is 1
    out.stopped = true;
    out.log_weight += std::log(prior_stop) - std::log(proposal.stop_prob);
    out.path.push_back({true, std::nullopt});
    return out;
  }

  const int idx = sample_index(proposal.selection, u_select);
  if (idx < 0) throw NumericError("proposal selection has no positive mass");
  const int j = idx + 1;

  const std::vector<double> prior_sel = prior.selection_probs(particle.model());
  // absolute continuity: a proposable child always has prior mass
  if (prior_sel[idx] <= 0.0)
    throw NumericError("proposal selected a variable with zero prior mass");

  RegressionState next = extend_state(particle.state, j, bf.data());
  out.log_weight += std::log1p(-prior_stop) + std::log(prior_sel[idx]) -
                    std::log1p(-proposal.stop_prob) - std::log(proposal.selection[idx]);
  out.log_weight += bf.log_bf(next) - bf.log_bf(particle.state);
  out.state = std::move(next);
  out.path.push_back({false, j});
  return out;
}

LipsSampler::LipsSampler(const RegressionData& data, PfsPrior prior,
                         CoefficientPrior coef_prior, LipsConfig config)
    : data_(&data),
      prior_(prior.with_max_size(data.max_model_size())),
      coef_prior_(coef_prior),
      config_(config) {
  if (data.p != prior.dimension())
    throw ConfigError("prior dimension does not match the data");
  if (config_.particles_per_island < 1 || config_.islands < 1 || config_.lookahead < 1)
    throw ConfigError("particles, islands and lookahead must all be >= 1");
}

IslandRun LipsSampler::run_island(int island) const {
  const int p = data_->p;
  const int n_particles = config_.particles_per_island;
  BfContext bf(*data_, coef_prior_);

  IslandRun out;
  std::vector<Particle> particles(n_particles);
  {
    Particle init;
    init.state = RegressionState::null_state(*data_);
    std::fill(particles.begin(), particles.end(), init);
  }

  // one proposal per distinct tentative model; exact reuse across particles
  std::unordered_map<ModelVector, Proposal, ModelHash> proposals;
  int alive = n_particles;
  for (int t = 1; t <= p && alive > 0; ++t) {
    out.sweeps = t;
    for (int i = 0; i < n_particles; ++i) {
      Particle& particle = particles[i];
      if (particle.stopped) continue;

      const Proposal* proposal;
      if (config_.proposal_is_prior) {
        auto it = proposals.find(particle.model());
        if (it == proposals.end()) {
          Proposal from_prior;
          from_prior.stop_prob = prior_.stop_prob(particle.model());
          from_prior.selection = prior_.selection_probs(particle.model());
          from_prior.log_bf = bf.log_bf(particle.state);
          from_prior.log_lookahead = from_prior.log_bf;
          it = proposals.emplace(particle.model(), std::move(from_prior)).first;
        }
        proposal = &it->second;
      } else {
        auto it = proposals.find(particle.model());
        if (it == proposals.end()) {
          Proposal built = build_proposal(particle.state, config_.lookahead, prior_, bf,
                                          &out.diagnostics);
          built.child_lookahead = {};  // not needed past construction
          it = proposals.emplace(particle.model(), std::move(built)).first;
        }
        proposal = &it->second;
      }

      rng::Stream stop_stream =
          rng::substream(config_.seed, rng::Tag::particle, island, i, t, 0);
      rng::Stream select_stream =
          rng::substream(config_.seed, rng::Tag::particle, island, i, t, 1);
      Particle next = propagate_step(particle, t, *proposal, prior_, bf,
                                     stop_stream.uniform(), select_stream.uniform());
      if (!config_.record_paths) next.path.clear();
      if (next.stopped) --alive;
      particle = std::move(next);
    }
  }

  out.models.reserve(n_particles);
  out.log_weights.reserve(n_particles);
  double hi = kNegInf;
  for (const Particle& particle : particles) hi = std::max(hi, particle.log_weight);
  double sum = 0.0, sum2 = 0.0;
  for (Particle& particle : particles) {
    const double w = std::exp(particle.log_weight - hi);
    sum += w;
    sum2 += w * w;
    out.models.push_back(particle.model());
    out.log_weights.push_back(particle.log_weight);
  }
  out.ess = sum2 > 0.0 ? sum * sum / sum2 : 0.0;
  return out;
}

std::vector<IslandRun> LipsSampler::run() const {
  std::vector<IslandRun> runs(config_.islands);
  const int threads = std::max(1, config_.threads);
  if (threads == 1 || config_.islands == 1) {
    for (int l = 0; l < config_.islands; ++l) runs[l] = run_island(l);
    return runs;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < std::min(threads, config_.islands); ++w) {
    pool.emplace_back([&] {
      for (int l = next.fetch_add(1); l < config_.islands; l = next.fetch_add(1))
        runs[l] = run_island(l);
    });
  }
  for (auto& th : pool) th.join();
  return runs;
}

HtEstimate ht_estimate(std::span<const ModelVector> models,
                       std::span<const double> log_weights, const DeltaEvaluator& delta) {
  const std::size_t n = models.size();
  if (n == 0 || log_weights.size() != n)
    throw std::domain_error("estimate needs matching nonempty samples");

  // stabilized weights: exp(log w - max log w); every reported quantity is
  // invariant to this common rescaling
  double hi = kNegInf;
  for (double lw : log_weights) hi = std::max(hi, lw);
  if (hi == kNegInf) throw NumericError("all weights are zero");

  double sum_w = 0.0, sum_w2 = 0.0, sum_wd = 0.0;
  std::vector<double> w(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(log_weights[i] - hi);
    d[i] = delta(models[i]);
    sum_w += w[i];
    sum_w2 += w[i] * w[i];
    sum_wd += w[i] * d[i];
  }

  HtEstimate out;
  out.value = sum_wd / sum_w;
  out.ess = sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0;
  if (n == 1) {
    out.se = std::numeric_limits<double>::infinity();
    return out;
  }

  // delta-method variance on weights normalized to mean one
  const double w_bar = sum_w / static_cast<double>(n);
  double s_ww = 0.0, s_zz = 0.0, s_wz = 0.0;
  const double z_bar = out.value;  // mean of z_i = (w_i/w_bar) d_i equals the estimate
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w[i] / w_bar;
    const double zi = wi * d[i];
    s_ww += (wi - 1.0) * (wi - 1.0);
    s_zz += (zi - z_bar) * (zi - z_bar);
    s_wz += (wi - 1.0) * (zi - z_bar);
  }
  const double denom = static_cast<double>(n) * static_cast<double>(n - 1);
  const double var =
      (out.value * out.value * s_ww + s_zz - 2.0 * out.value * s_wz) / denom;
  out.se = std::sqrt(std::max(var, 0.0));
  return out;
}

HtEstimate ht_estimate(const IslandRun& run, const DeltaEvaluator& delta) {
  return ht_estimate(run.models, run.log_weights, delta);
}

HtEstimate islanded_estimate(std::span<const HtEstimate> estimates) {
  if (estimates.empty()) throw std::domain_error("no island estimates");
  HtEstimate out;
  out.islands_used = static_cast<int>(estimates.size());
  for (const HtEstimate& e : estimates) {
    out.value += e.value;
    out.ess += e.ess;
  }
  out.value /= estimates.size();
  if (estimates.size() < 2) {
    out.se = std::numeric_limits<double>::infinity();
    return out;
  }
  double ss = 0.0;
  for (const HtEstimate& e : estimates) ss += (e.value - out.value) * (e.value - out.value);
  out.se = std::sqrt(ss / (static_cast<double>(estimates.size()) *
                           static_cast<double>(estimates.size() - 1)));
  return out;
}

HtEstimate islanded_estimate(std::span<const IslandRun> runs, const DeltaEvaluator& delta) {
  std::vector<HtEstimate> per_island;
  per_island.reserve(runs.size());
  for (const IslandRun& run : runs) per_island.push_back(ht_estimate(run, delta));
  return islanded_estimate(per_island);
}

DeltaEvaluator pip_delta(int j) {
  if (j < 1) throw std::domain_error("variable index must be positive");
  return {DeltaEvaluator::Kind::inclusion,
          [j](const ModelVector& m) { return m.contains(j) ? 1.0 : 0.0; }};
}

BmaPredictor::BmaPredictor(const Dataset& data, CoefficientPrior coef_prior)
    : data_(&data), coef_prior_(coef_prior) {}

const BmaPredictor::ModelFit& BmaPredictor::fit_for(const ModelVector& model) const {
  auto it = cache_.find(model);
  if (it != cache_.end()) return it->second;

  ModelFit fit;
  if (model.size() > 0) {
    const RegressionState state = RegressionState::for_model(data_->reg, model);
    const double shrink =
        coef_prior_.kind == CoefficientPrior::Kind::g
            ? coef_prior_.g / (1.0 + coef_prior_.g)
            : hyper_g_shrinkage(state.size(), state.r_squared(), data_->reg.n, coef_prior_.a);
    fit.cols = state.columns();
    fit.shrunk_coef = shrink * state.coefficients();
  }
  return cache_.emplace(model, std::move(fit)).first->second;
}

double BmaPredictor::predict(const ModelVector& model, const Eigen::VectorXd& x_new) const {
  if (x_new.size() != data_->p()) throw std::domain_error("new row has wrong length");
  const ModelFit& fit = fit_for(model);
  double value = data_->y_mean;
  for (std::size_t i = 0; i < fit.cols.size(); ++i) {
    const int j = fit.cols[i];
    value += fit.shrunk_coef[static_cast<int>(i)] * (x_new[j - 1] - data_->x_mean[j - 1]);
  }
  return value;
}

DeltaEvaluator BmaPredictor::delta(Eigen::VectorXd x_new) const {
  auto self = this;
  auto row = std::make_shared<Eigen::VectorXd>(std::move(x_new));
  return {DeltaEvaluator::Kind::prediction,
          [self, row](const ModelVector& m) { return self->predict(m, *row); }};
}

}  // namespace lips
