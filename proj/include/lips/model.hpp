#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lips {

class PfsPrior;

/// Largest dimension for which whole-model-space tables are allowed.
inline constexpr int kEnumerationLimit = 20;

/// A subset of the p candidate predictors, stored as packed 64-bit words.
/// Variable indices are 1-based throughout; the set-bit count is cached.
class ModelVector {
 public:
  ModelVector() = default;
  explicit ModelVector(int p);

  /// Parses a '0'/'1' string, variable 1 leftmost (the serialization used in
  /// all file outputs).
  static ModelVector parse(std::string_view bits);
  static ModelVector from_mask(int p, std::uint64_t mask);
  static ModelVector from_indices(int p, std::span<const int> indices);

  int dimension() const { return p_; }
  int size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool full() const { return count_ == p_; }

  bool contains(int j) const;
  void add(int j);     // idempotent; throws std::domain_error if j out of range
  void remove(int j);  // idempotent

  /// The model with variable j added; equals *this when j is already present.
  [[nodiscard]] ModelVector with(int j) const;

  /// Bit mask with variable j at bit j-1. Only valid for p <= 64.
  std::uint64_t mask() const;

  std::string str() const;
  std::size_t hash() const;

  bool operator==(const ModelVector& other) const = default;

  /// Included variable indices in ascending order.
  template <typename F>
  void for_each(F&& fn) const {
    for (int w = 0; w < static_cast<int>(words_.size()); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        fn(w * 64 + b + 1);
        bits &= bits - 1;
      }
    }
  }

  std::span<const std::uint64_t> words() const { return words_; }

 private:
  void check_index(int j) const;

  std::vector<std::uint64_t> words_;
  int p_ = 0;
  int count_ = 0;
};

struct ModelHash {
  std::size_t operator()(const ModelVector& m) const { return m.hash(); }
};

/// (size, lexicographic-bits) order: smaller models first, then models whose
/// earliest set bits come first. This is the canonical enumeration order.
bool canonical_less(const ModelVector& a, const ModelVector& b);

/// One decision of a forward-stepwise pass: either stop, or select a variable.
struct PathStep {
  bool stopped = false;
  std::optional<int> selected;  // absent once stopped
};

/// Visits all 2^p models in canonical (size, lex) order.
/// Throws ConfigError above the enumeration limit.
void for_each_model(int p, const std::function<void(const ModelVector&)>& fn);
std::vector<ModelVector> enumerate_models(int p);

/// One-step transition kernel of the stepwise chain at step t (1-based):
/// identity once stopped, stop with the stopping probability, otherwise move
/// to a one-variable extension with the selection probability.
double transition_probability(const PfsPrior& prior, const ModelVector& prev,
                              const ModelVector& next, int t);

/// Probability of a complete tentative-model path (length p+1, starting at
/// the null model): the product of the kernel over steps 1..p.
double path_probability(const PfsPrior& prior, std::span<const ModelVector> path);

}  // namespace lips
