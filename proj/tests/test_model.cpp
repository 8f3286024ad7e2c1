#include <stdexcept>

#include "doctest.h"
#include "lips/errors.hpp"
#include "lips/model.hpp"
#include "lips/prior.hpp"
#include "oracles.hpp"

using namespace lips;

TEST_SUITE("model") {

TEST_CASE("add_variable") {
  CHECK(ModelVector::parse("000").with(2) == ModelVector::parse("010"));
  // adding a variable already in the model is the identity
  CHECK(ModelVector::parse("010").with(2) == ModelVector::parse("010"));
  const ModelVector m = ModelVector::parse("101").with(2);
  CHECK(m == ModelVector::parse("111"));
  CHECK(m.size() == 3);
  CHECK_THROWS_AS(ModelVector::parse("101").with(4), std::domain_error);
  CHECK_THROWS_AS(ModelVector::parse("101").with(0), std::domain_error);
}

TEST_CASE("string round trip and word packing past 64 variables") {
  std::string bits(130, '0');
  bits[0] = bits[64] = bits[129] = '1';
  const ModelVector m = ModelVector::parse(bits);
  CHECK(m.size() == 3);
  CHECK(m.contains(1));
  CHECK(m.contains(65));
  CHECK(m.contains(130));
  CHECK_FALSE(m.contains(64));
  CHECK(m.str() == bits);
  CHECK(m.hash() != ModelVector(130).hash());
}

TEST_CASE("enumeration order and counts") {
  const auto two = enumerate_models(2);
  REQUIRE(two.size() == 4);
  CHECK(two[0].str() == "00");
  CHECK(two[1].str() == "10");
  CHECK(two[2].str() == "01");
  CHECK(two[3].str() == "11");

  const auto one = enumerate_models(1);
  REQUIRE(one.size() == 2);
  CHECK(one[0].str() == "0");
  CHECK(one[1].str() == "1");

  std::size_t count = 0;
  int last_size = 0;
  ModelVector prev;
  for_each_model(15, [&](const ModelVector& m) {
    if (count > 0) {
      CHECK(canonical_less(prev, m));
      CHECK(m.size() >= last_size);
    }
    prev = m;
    last_size = m.size();
    ++count;
  });
  CHECK(count == 32768);

  CHECK_THROWS_AS(enumerate_models(kEnumerationLimit + 1), ConfigError);
}

TEST_CASE("transition kernel cases") {
  const PfsPrior prior = beta_binomial_prior(3);  // h(s) = 1/(4-s)
  const ModelVector null3(3);

  CHECK(transition_probability(prior, null3, null3, 1) == doctest::Approx(0.25));
  CHECK(transition_probability(prior, null3, ModelVector::parse("010"), 1) ==
        doctest::Approx(0.75 / 3.0));
  // already stopped: the kernel is the identity
  CHECK(transition_probability(prior, null3, null3, 2) == 1.0);
  CHECK(transition_probability(prior, null3, ModelVector::parse("010"), 2) == 0.0);
  // removals and double jumps have probability zero
  CHECK(transition_probability(prior, ModelVector::parse("010"), null3, 2) == 0.0);
  CHECK(transition_probability(prior, null3, ModelVector::parse("011"), 1) == 0.0);

  CHECK_THROWS_AS(transition_probability(prior, ModelVector::parse("110"), null3, 1),
                  std::domain_error);
  CHECK_THROWS_AS(transition_probability(prior, null3, null3, 4), std::domain_error);
}

TEST_CASE("kernel rows sum to one") {
  const int p = 4;
  std::vector<double> q = {0.15, 0.2, 0.3, 0.25, 0.1};
  const PfsPrior prior = size_vector_prior(q);
  for (const ModelVector& prev : enumerate_models(p)) {
    for (int t = prev.size() + 1; t <= p; ++t) {
      double total = 0.0;
      for (const ModelVector& next : enumerate_models(p))
        total += transition_probability(prior, prev, next, t);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("path probability") {
  const int p = 5;
  const PfsPrior prior = beta_binomial_prior(p);
  // null -> +4 -> +2 -> +5 -> stop -> stop
  std::vector<ModelVector> path;
  path.emplace_back(p);
  path.push_back(path.back().with(4));
  path.push_back(path.back().with(2));
  path.push_back(path.back().with(5));
  path.push_back(path.back());
  path.push_back(path.back());

  double expected = 1.0;
  ModelVector m(p);
  for (int step = 0; step < 3; ++step) {
    const int j = std::vector<int>{4, 2, 5}[step];
    expected *= (1.0 - prior.stop_prob(m)) * prior.selection_probs(m)[j - 1];
    m.add(j);
  }
  expected *= prior.stop_prob(m);
  CHECK(path_probability(prior, path) == doctest::Approx(expected).epsilon(1e-14));

  // a path that stops immediately has probability rho(null)
  std::vector<ModelVector> all_null(p + 1, ModelVector(p));
  CHECK(path_probability(prior, all_null) ==
        doctest::Approx(prior.stop_prob(ModelVector(p))).epsilon(1e-14));

  // p = 2 uniform size prior: null -> (1,0) -> (1,1) has mass 2/3 * 1/2 * 1/2
  std::vector<double> q2 = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const PfsPrior uniform2 = size_vector_prior(q2);
  std::vector<ModelVector> grow = {ModelVector(2), ModelVector::parse("10"),
                                   ModelVector::parse("11")};
  CHECK(path_probability(uniform2, grow) ==
        doctest::Approx((2.0 / 3) * 0.5 * 0.5).epsilon(1e-14));

  // invalid paths: removals or jumps of two
  std::vector<ModelVector> removal = {ModelVector::parse("00"), ModelVector::parse("10"),
                                      ModelVector::parse("00")};
  CHECK_THROWS_AS(path_probability(uniform2, removal), std::domain_error);
  std::vector<ModelVector> jump = {ModelVector::parse("00"), ModelVector::parse("11"),
                                   ModelVector::parse("11")};
  CHECK_THROWS_AS(path_probability(uniform2, jump), std::domain_error);
  std::vector<ModelVector> short_path = {ModelVector::parse("00")};
  CHECK_THROWS_AS(path_probability(uniform2, short_path), std::domain_error);
}

TEST_CASE("paths that regrow after stopping have zero probability") {
  const PfsPrior prior = beta_binomial_prior(3);
  std::vector<ModelVector> path = {ModelVector::parse("000"), ModelVector::parse("000"),
                                   ModelVector::parse("100"), ModelVector::parse("100")};
  CHECK(path_probability(prior, path) == 0.0);
}

TEST_CASE("marginal consistency: path sums match the dynamic program") {
  const int p = 4;
  std::vector<double> q = {0.1, 0.3, 0.2, 0.25, 0.15};
  const PfsPrior prior = size_vector_prior(q);
  const std::vector<double> table = marginal_model_table(prior);
  for (const ModelVector& target : enumerate_models(p)) {
    CHECK(lips::test::path_sum_marginal(prior, target) ==
          doctest::Approx(table[target.mask()]).epsilon(1e-12));
  }
}

}  // TEST_SUITE
