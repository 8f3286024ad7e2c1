#include <cmath>
#include <vector>

#include "doctest.h"
#include "lips/math.hpp"
#include "lips/rng.hpp"
#include "oracles.hpp"

using namespace lips;

TEST_SUITE("math") {

TEST_CASE("log_sum_exp basics") {
  std::vector<double> v = {std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  std::vector<double> huge = {1000.0, 1000.0};
  CHECK(log_sum_exp(huge) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
  std::vector<double> empty;
  CHECK(log_sum_exp(empty) == kNegInf);
}

TEST_CASE("accumulator matches batch log_sum_exp") {
  std::vector<double> v = {-3.0, 0.5, -701.0, 2.25, 2.25, -50.0};
  LogSumAccumulator acc;
  for (double x : v) acc.add(x);
  CHECK(acc.value() == doctest::Approx(log_sum_exp(v)).epsilon(1e-14));
}

TEST_CASE("log1m_exp") {
  CHECK(log1m_exp(std::log(0.25)) == doctest::Approx(std::log(0.75)).epsilon(1e-14));
  CHECK(log1m_exp(-1e-12) == doctest::Approx(std::log(1e-12)).epsilon(1e-3));
  CHECK(log1m_exp(0.0) == kNegInf);
}

TEST_CASE("unit-interval integrator handles smooth and singular integrands") {
  // Beta(3,5) normalization
  const double beta_3_5 =
      std::lgamma(3.0) + std::lgamma(5.0) - std::lgamma(8.0);
  const double got = log_integrate_unit(
      [](double x, double omx) { return 2.0 * std::log(x) + 4.0 * std::log(omx); });
  CHECK(got == doctest::Approx(beta_3_5).epsilon(1e-11));

  // integrable endpoint singularity: Beta(1/2, 1/2) = pi
  const double got_sing = log_integrate_unit(
      [](double x, double omx) { return -0.5 * std::log(x) - 0.5 * std::log(omx); });
  CHECK(got_sing == doctest::Approx(std::log(M_PI)).epsilon(1e-11));
}

TEST_CASE("counter rng streams are reproducible and distinct") {
  rng::Stream a = rng::substream(7, rng::Tag::particle, 1, 2, 3, 0);
  rng::Stream b = rng::substream(7, rng::Tag::particle, 1, 2, 3, 0);
  rng::Stream c = rng::substream(7, rng::Tag::particle, 1, 2, 4, 0);
  const double ua = a.uniform();
  CHECK(ua == b.uniform());
  CHECK(ua != c.uniform());
  CHECK(ua > 0.0);
  CHECK(ua < 1.0);
}

TEST_CASE("rng uniforms and normals have sane moments") {
  rng::Stream s(123456);
  const int n = 200000;
  double mean_u = 0.0, mean_z = 0.0, var_z = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_u += s.uniform();
    const double z = s.normal();
    mean_z += z;
    var_z += z * z;
  }
  mean_u /= n;
  mean_z /= n;
  var_z /= n;
  CHECK(mean_u == doctest::Approx(0.5).epsilon(0.01));
  CHECK(mean_z == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(var_z == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("chi-squared survival oracle sanity") {
  using lips::test::chi2_sf;
  CHECK(chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi2_sf(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi2_sf(0.0, 5) == doctest::Approx(1.0));
}

}  // TEST_SUITE
