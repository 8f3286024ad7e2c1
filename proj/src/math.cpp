#include "lips/math.hpp"

#include <vector>

namespace lips {

namespace {

constexpr double kHalfPi = 1.5707963267948966;
constexpr double kLogPi = 1.1447298858494002;
constexpr double kLog2 = 0.6931471805599453;

// tanh-sinh node: x in (0,1), its complement, and the log weight
struct Node {
  double x;
  double one_minus_x;
  double log_w;
};

// Nodes at t = i*h. include_center adds t = 0; otherwise only odd i are
// visited (the refinement pattern). Stops once weights are negligible.
void collect_nodes(double h, bool include_center, std::vector<Node>& out) {
  const double log_h = std::log(h);
  if (include_center) out.push_back({0.5, 0.5, log_h + kLogPi - 2.0 * kLog2});
  const int step = include_center ? 1 : 2;
  for (int i = 1;; i += step) {
    const double t = i * h;
    const double s = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * s);
    const double x_hi = 1.0 / (1.0 + e);  // x(t) = (1 + tanh s)/2
    const double x_lo = e / (1.0 + e);    // 1 - x(t) = x(-t)
    // w = h * pi * cosh(t) * x_hi * x_lo
    const double log_w = log_h + kLogPi + std::log(std::cosh(t)) +
                         std::log(x_hi) + std::log(x_lo);
    out.push_back({x_hi, x_lo, log_w});
    out.push_back({x_lo, x_hi, log_w});
    if (t > 7.2 || log_w < -760.0) break;
  }
}

double accumulate(const std::function<double(double, double)>& log_f,
                  const std::vector<Node>& nodes, LogSumAccumulator& acc) {
  for (const Node& nd : nodes) {
    if (nd.log_w == kNegInf) continue;
    const double lf = log_f(nd.x, nd.one_minus_x);
    if (std::isfinite(lf)) acc.add(lf + nd.log_w);
  }
  return acc.value();
}

}  // namespace

double log_integrate_unit(const std::function<double(double, double)>& log_f,
                          double rel_tol, int max_level) {
  double h = 0.5;
  std::vector<Node> nodes;
  nodes.reserve(256);
  collect_nodes(h, true, nodes);

  LogSumAccumulator acc;
  double prev = accumulate(log_f, nodes, acc);

  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    nodes.clear();
    collect_nodes(h, false, nodes);
    // halving h halves every existing weight, then the new nodes join
    LogSumAccumulator next;
    next.add(prev - kLog2);
    const double cur = accumulate(log_f, nodes, next);
    if (level >= 3 && std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur)))
      return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace lips
