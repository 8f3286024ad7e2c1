#include "lips/model.hpp"

#include <bit>
#include <stdexcept>

#include "lips/errors.hpp"
#include "lips/prior.hpp"
#include "lips/rng.hpp"

namespace lips {

ModelVector::ModelVector(int p) : p_(p) {
  if (p < 0) throw std::domain_error("model dimension must be nonnegative");
  words_.assign((p + 63) / 64, 0);
}

ModelVector ModelVector::parse(std::string_view bits) {
  ModelVector m(static_cast<int>(bits.size()));
  for (int j = 1; j <= m.p_; ++j) {
    const char c = bits[j - 1];
    if (c == '1')
      m.add(j);
    else if (c != '0')
      throw std::domain_error("model string must contain only '0'/'1'");
  }
  return m;
}

ModelVector ModelVector::from_mask(int p, std::uint64_t mask) {
  if (p > 64) throw std::domain_error("from_mask requires p <= 64");
  ModelVector m(p);
  if (p > 0) {
    if (p < 64 && (mask >> p) != 0) throw std::domain_error("mask exceeds dimension");
    m.words_[0] = mask;
    m.count_ = std::popcount(mask);
  }
  return m;
}

ModelVector ModelVector::from_indices(int p, std::span<const int> indices) {
  ModelVector m(p);
  for (int j : indices) m.add(j);
  return m;
}

void ModelVector::check_index(int j) const {
  if (j < 1 || j > p_) throw std::domain_error("variable index out of range");
}

bool ModelVector::contains(int j) const {
  check_index(j);
  return (words_[(j - 1) >> 6] >> ((j - 1) & 63)) & 1u;
}

void ModelVector::add(int j) {
  check_index(j);
  std::uint64_t& w = words_[(j - 1) >> 6];
  const std::uint64_t bit = 1ull << ((j - 1) & 63);
  count_ += !(w & bit);
  w |= bit;
}

void ModelVector::remove(int j) {
  check_index(j);
  std::uint64_t& w = words_[(j - 1) >> 6];
  const std::uint64_t bit = 1ull << ((j - 1) & 63);
  count_ -= !!(w & bit);
  w &= ~bit;
}

ModelVector ModelVector::with(int j) const {
  ModelVector out = *this;
  out.add(j);
  return out;
}

std::uint64_t ModelVector::mask() const {
  if (p_ > 64) throw std::domain_error("mask() requires p <= 64");
  return words_.empty() ? 0 : words_[0];
}

std::string ModelVector::str() const {
  std::string s(static_cast<std::size_t>(p_), '0');
  for_each([&](int j) { s[j - 1] = '1'; });
  return s;
}

std::size_t ModelVector::hash() const {
  std::uint64_t h = 0x243F6A8885A308D3ull ^ static_cast<std::uint64_t>(p_);
  for (std::uint64_t w : words_) h = rng::mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

bool canonical_less(const ModelVector& a, const ModelVector& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto wa = a.words(), wb = b.words();
  for (std::size_t i = std::max(wa.size(), wb.size()); i-- > 0;) {
    const std::uint64_t x = i < wa.size() ? wa[i] : 0;
    const std::uint64_t y = i < wb.size() ? wb[i] : 0;
    if (x != y) return x < y;
  }
  return false;
}

void for_each_model(int p, const std::function<void(const ModelVector&)>& fn) {
  if (p < 1) throw std::domain_error("dimension must be positive");
  if (p > kEnumerationLimit)
    throw ConfigError("model space enumeration limited to p <= " +
                      std::to_string(kEnumerationLimit));
  fn(ModelVector(p));
  const std::uint64_t top = 1ull << p;
  for (int s = 1; s <= p; ++s) {
    // Gosper's hack walks masks of fixed popcount in increasing value order
    std::uint64_t mask = (1ull << s) - 1;
    while (mask < top) {
      fn(ModelVector::from_mask(p, mask));
      const std::uint64_t c = mask & -mask;
      const std::uint64_t r = mask + c;
      mask = (((r ^ mask) >> 2) / c) | r;
    }
  }
}

std::vector<ModelVector> enumerate_models(int p) {
  std::vector<ModelVector> out;
  out.reserve(std::size_t{1} << p);
  for_each_model(p, [&](const ModelVector& m) { out.push_back(m); });
  return out;
}

namespace {

// Returns the single added index if next == prev + {j}, 0 if next == prev,
// -1 for anything else (removals, jumps of two or more).
int single_addition(const ModelVector& prev, const ModelVector& next) {
  const auto wp = prev.words(), wn = next.words();
  int added = 0;
  for (std::size_t i = 0; i < wn.size(); ++i) {
    const std::uint64_t p = i < wp.size() ? wp[i] : 0;
    if (p & ~wn[i]) return -1;  // removal
    std::uint64_t diff = wn[i] & ~p;
    if (diff) {
      if (added || (diff & (diff - 1))) return -1;
      added = static_cast<int>(i) * 64 + std::countr_zero(diff) + 1;
    }
  }
  return added;
}

}  // namespace

double transition_probability(const PfsPrior& prior, const ModelVector& prev,
                              const ModelVector& next, int t) {
  const int p = prior.dimension();
  if (prev.dimension() != p || next.dimension() != p)
    throw std::domain_error("model dimension does not match the prior");
  if (t < 1 || t > p) throw std::domain_error("step index must be in 1..p");
  if (prev.size() > t - 1)
    throw std::domain_error("model is not reachable at the given step");

  if (prev.size() < t - 1) return prev == next ? 1.0 : 0.0;

  const int added = single_addition(prev, next);
  if (added < 0) return 0.0;
  const double stop = prior.stop_prob(prev);
  if (added == 0) return stop;
  std::vector<double> sel(p);
  prior.selection_probs(prev, sel);
  return (1.0 - stop) * sel[added - 1];
}

double path_probability(const PfsPrior& prior, std::span<const ModelVector> path) {
  const int p = prior.dimension();
  if (static_cast<int>(path.size()) != p + 1)
    throw std::domain_error("path must have length p+1");
  if (!path[0].empty()) throw std::domain_error("path must start at the null model");
  for (int t = 1; t <= p; ++t) {
    if (single_addition(path[t - 1], path[t]) < 0)
      throw std::domain_error("consecutive models must differ by at most one added variable");
  }
  double prob = 1.0;
  for (int t = 1; t <= p && prob > 0.0; ++t)
    prob *= transition_probability(prior, path[t - 1], path[t], t);
  return prob;
}

}  // namespace lips
