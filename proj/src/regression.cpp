#include "lips/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "lips/errors.hpp"

namespace lips {

RegressionData RegressionData::from_raw(const Eigen::MatrixXd& x_raw,
                                        const Eigen::VectorXd& y_raw) {
  RegressionData data;
  data.n = static_cast<int>(x_raw.rows());
  data.p = static_cast<int>(x_raw.cols());
  if (data.n < 3) throw DataError("need at least 3 observations");
  if (y_raw.size() != data.n) throw DataError("response length must match the design rows");

  data.x = x_raw.rowwise() - x_raw.colwise().mean();
  data.y = y_raw.array() - y_raw.mean();
  data.gram.noalias() = data.x.transpose() * data.x;
  data.xty.noalias() = data.x.transpose() * data.y;
  data.ssy = data.y.squaredNorm();
  return data;
}

RegressionState RegressionState::null_state(const RegressionData& data) {
  RegressionState st;
  st.model_ = ModelVector(data.p);
  st.rss_ = data.ssy;
  st.r2_ = 0.0;
  return st;
}

RegressionState RegressionState::for_model(const RegressionData& data,
                                           const ModelVector& model) {
  RegressionState st = null_state(data);
  bool failed = false;
  model.for_each([&](int j) {
    if (failed) return;
    auto next = st.try_extend(data, j);
    if (!next) {
      failed = true;
      return;
    }
    st = std::move(*next);
  });
  if (failed) throw CollinearityError("model columns are numerically collinear");
  return st;
}

Eigen::VectorXd RegressionState::coefficients() const {
  if (cols_.empty()) return Eigen::VectorXd();
  // Gram = L L', so beta = L'^{-1} (L^{-1} X'y)
  return chol_.triangularView<Eigen::Lower>().transpose().solve(qty_);
}

std::optional<RegressionState> RegressionState::try_extend(const RegressionData& data,
                                                           int j) const {
  if (j < 1 || j > data.p) throw std::domain_error("variable index out of range");
  if (model_.contains(j)) throw std::domain_error("variable is already in the model");
  const int t = size();
  if (t >= data.max_model_size())
    throw std::domain_error("model is already at the estimable size limit");

  const double col_norm2 = data.gram(j - 1, j - 1);
  Eigen::VectorXd w(t);
  for (int i = 0; i < t; ++i) w[i] = data.gram(cols_[i] - 1, j - 1);
  if (t > 0) chol_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solveInPlace(w);

  const double pivot2 = col_norm2 - w.squaredNorm();
  const double pivot = pivot2 > 0.0 ? std::sqrt(pivot2) : 0.0;
  if (pivot <= 1e-10 * std::sqrt(std::max(col_norm2, 0.0))) return std::nullopt;

  RegressionState out;
  out.model_ = model_.with(j);
  out.cols_ = cols_;
  out.cols_.push_back(j);
  out.chol_.setZero(t + 1, t + 1);
  out.chol_.topLeftCorner(t, t) = chol_;
  out.chol_.block(t, 0, 1, t) = w.transpose();
  out.chol_(t, t) = pivot;

  const double q_new = (data.xty[j - 1] - w.dot(qty_)) / pivot;
  out.qty_.resize(t + 1);
  out.qty_.head(t) = qty_;
  out.qty_[t] = q_new;

  out.rss_ = std::max(rss_ - q_new * q_new, 0.0);
  out.r2_ = data.ssy > 0.0 ? 1.0 - out.rss_ / data.ssy : 0.0;
  return out;
}

RegressionState extend_state(const RegressionState& state, int j, const RegressionData& data) {
  auto next = state.try_extend(data, j);
  if (!next)
    throw CollinearityError("column " + std::to_string(j) +
                            " is numerically collinear with the current model");
  return std::move(*next);
}

}  // namespace lips
