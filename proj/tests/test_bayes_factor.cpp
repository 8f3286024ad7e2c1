#include <cmath>

#include "doctest.h"
#include "lips/bayes_factor.hpp"
#include "oracles.hpp"

using namespace lips;

TEST_SUITE("bayes_factor") {

TEST_CASE("g-prior log BF") {
  // null model: ratio is exactly 1
  CHECK(log_bf0_g(0, 0.0, 20, 20.0) == 0.0);

  // |model| = 1, n = 11, g = 10, R^2 = 0.5:
  // (1+g)^{(n-1-1)/2} / (1+g/2)^{(n-1)/2} = 11^{4.5} / 6^5
  CHECK(log_bf0_g(1, 0.5, 11, 10.0) ==
        doctest::Approx(4.5 * std::log(11.0) - 5.0 * std::log(6.0)).epsilon(1e-14));

  CHECK_THROWS_AS(log_bf0_g(1, 0.5, 11, 0.0), std::domain_error);
}

TEST_CASE("gauss_2f1 special values") {
  CHECK(gauss_2f1(2.5, 1.0, 4.0, 0.0) == doctest::Approx(1.0));
  // 2F1(1,1;2;z) = -log(1-z)/z
  for (double z : {0.1, 0.5, 0.9}) {
    CHECK(gauss_2f1(1.0, 1.0, 2.0, z) ==
          doctest::Approx(-std::log(1.0 - z) / z).epsilon(1e-10));
  }
  CHECK(gauss_2f1(4.5, 1.0, 3.5, 0.8) ==
        doctest::Approx(lips::test::series_2f1(4.5, 1.0, 3.5, 0.8)).epsilon(1e-9));
  CHECK_THROWS_AS(gauss_2f1(1.0, 1.0, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gauss_2f1(1.0, 2.0, 2.0, 0.5), std::domain_error);
}

TEST_CASE("gauss_2f1 agrees with its series on a grid") {
  for (double a = 0.5; a <= 6.0; a += 0.5) {
    for (double c = 2.0; c <= 8.0; c += 1.0) {
      for (double z = 0.0; z < 0.95; z += 0.1) {
        const double series = lips::test::series_2f1(a, 1.0, c, z);
        CHECK(gauss_2f1(a, 1.0, c, z) == doctest::Approx(series).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("hyper-g log BF") {
  CHECK(log_bf0_hyper_g(0, 0.0, 20, 3.0) == 0.0);
  // R^2 -> 0 with |model| = 2, a = 3: BF -> (a-2)/(t+a-2) = 1/3
  CHECK(log_bf0_hyper_g(2, 0.0, 20, 3.0) == doctest::Approx(std::log(1.0 / 3)).epsilon(1e-10));
  CHECK_THROWS_AS(log_bf0_hyper_g(1, 0.5, 20, 2.0), std::domain_error);

  // large n must not overflow
  CHECK(std::isfinite(log_bf0_hyper_g(3, 0.6, 1200, 3.0)));
}

TEST_CASE("telescoping of step Bayes factors") {
  const auto inst = lips::test::make_instance(25, 5, 17);
  const RegressionData data = RegressionData::from_raw(inst.x, inst.y);
  const CoefficientPrior prior = CoefficientPrior::g_prior(25.0);

  RegressionState st = RegressionState::null_state(data);
  double total = 0.0;
  for (int j : {3, 1, 5}) {
    const RegressionState next = extend_state(st, j, data);
    total += log_bf_step(next, st, data, prior);
    st = next;
  }
  CHECK(log_bf_step(st, st, data, prior) == 0.0);
  CHECK(total == doctest::Approx(log_bf0(st, data, prior)).epsilon(1e-12));
}

TEST_CASE("scale invariance of Bayes factors") {
  const auto inst = lips::test::make_instance(30, 4, 23);
  const RegressionData data = RegressionData::from_raw(inst.x, inst.y);
  const RegressionData scaled = RegressionData::from_raw(inst.x, 17.5 * inst.y);
  const ModelVector model = ModelVector::from_indices(4, std::vector<int>{1, 3});
  const RegressionState a = RegressionState::for_model(data, model);
  const RegressionState b = RegressionState::for_model(scaled, model);
  CHECK(a.r_squared() == doctest::Approx(b.r_squared()).epsilon(1e-10));
  for (const CoefficientPrior& prior :
       {CoefficientPrior::g_prior(30.0), CoefficientPrior::hyper_g(3.0)}) {
    CHECK(log_bf0(a, data, prior) ==
          doctest::Approx(log_bf0(b, scaled, prior)).epsilon(1e-10));
  }
}

TEST_CASE("hyper-g shrinkage matches limits") {
  // with t = 0 and R^2 = 0 the data carry no information about g, so the
  // posterior shrinkage mean is the Beta(1, a/2-1) prior mean 2/a
  CHECK(hyper_g_shrinkage(0, 0.0, 10, 6.0) == doctest::Approx(1.0 / 3).epsilon(1e-8));
  CHECK(hyper_g_shrinkage(0, 0.0, 10, 4.0) == doctest::Approx(0.5).epsilon(1e-8));
  // strong fit pushes the shrinkage toward 1
  const double strong = hyper_g_shrinkage(2, 0.95, 100, 3.0);
  CHECK(strong > 0.9);
  CHECK(strong < 1.0);
}

TEST_CASE("g-prior BF matches the quadrature oracle on a small instance") {
  const auto inst = lips::test::make_instance(10, 2, 31, 1, 1.0, 0.8);
  const RegressionData data = RegressionData::from_raw(inst.x, inst.y);
  const double g = 10.0;
  const std::vector<int> cols = {1};
  const RegressionState st =
      RegressionState::for_model(data, ModelVector::from_indices(2, cols));
  const double closed = log_bf0_g(st.size(), st.r_squared(), data.n, g);
  const double brute = lips::test::quadrature_log_bf_g(inst.x, inst.y, cols, g);
  CHECK(std::abs(std::exp(closed - brute) - 1.0) < 0.005);
}

}  // TEST_SUITE
