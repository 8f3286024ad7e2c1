#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>

namespace lips {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum(exp(v))) accumulated in index order after a max shift.
inline double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

/// log(1 - exp(x)) for x <= 0.
inline double log1m_exp(double x) {
  if (x >= 0.0) return kNegInf;
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// Streaming log-sum-exp accumulator; result is independent of the scale of
/// the incoming terms but depends on their order (callers feed a fixed order).
class LogSumAccumulator {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term <= shift_) {
      sum_ += std::exp(log_term - shift_);
      return;
    }
    // rescale to the new maximum
    if (shift_ != kNegInf) sum_ *= std::exp(shift_ - log_term);
    sum_ += 1.0;
    shift_ = log_term;
  }
  double value() const { return shift_ == kNegInf ? kNegInf : shift_ + std::log(sum_); }
  bool empty() const { return shift_ == kNegInf; }

 private:
  double shift_ = kNegInf;
  double sum_ = 0.0;
};

/// Integrates exp(log_f(x, 1-x)) over (0,1) with a tanh-sinh rule, returning
/// the log of the integral. The integrand receives both x and 1-x so endpoint
/// factors like (1-x)^a stay accurate; integrable endpoint singularities are
/// handled by the double-exponential decay of the weights.
double log_integrate_unit(const std::function<double(double, double)>& log_f,
                          double rel_tol = 1e-12, int max_level = 12);

}  // namespace lips
