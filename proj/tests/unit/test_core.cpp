#include <doctest.h>

#include <cmath>
#include <vector>

#include "nstab/core.hpp"
#include "nstab/error.hpp"

using namespace nstab;

namespace {

SpacePtr two_by_two() {
  return FiniteProductSpace::product({{2, {0.5, 0.5}}, {2, {0.5, 0.5}}});
}

// x_k in {-1,1} for state s of the uniform square, coordinate k.
double pm(std::size_t s, std::size_t k) { return ((s >> k) & 1U) ? 1.0 : -1.0; }

}  // namespace

TEST_SUITE("core") {

TEST_CASE("product space weights are products of factor weights") {
  const SpacePtr s = FiniteProductSpace::product({{2, {0.3, 0.7}}, {3, {0.2, 0.5, 0.3}}});
  REQUIRE(s->size() == 6);
  double total = 0.0;
  for (std::size_t x = 0; x < s->size(); ++x) {
    const double expected = s->factor(0).weights[s->coordinate(x, 0)] * s->factor(1).weights[s->coordinate(x, 1)];
    CHECK(s->weight(x) == doctest::Approx(expected).epsilon(1e-12));
    total += s->weight(x);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Factor 0 varies fastest.
  CHECK(s->coordinate(1, 0) == 1);
  CHECK(s->coordinate(1, 1) == 0);
  CHECK(s->coordinate(2, 1) == 1);
}

TEST_CASE("invalid spaces and tables are rejected") {
  CHECK_THROWS_AS(FiniteProductSpace::from_weights({0.5, 0.6}), InvalidParameter);
  CHECK_THROWS_AS(FiniteProductSpace::from_weights({1.0, 0.0}), InvalidParameter);
  CHECK_THROWS_AS(TableFunction(FiniteProductSpace::uniform(3), {1.0, 2.0}), InvalidParameter);
}

TEST_CASE("lp_norm examples") {
  const SpacePtr u4 = FiniteProductSpace::uniform(4);
  for (double r : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
    CHECK(lp_norm(TableFunction::constant(u4, -2.5), r) == doctest::Approx(2.5));
  }
  const SpacePtr sq = two_by_two();
  std::vector<double> dict(4);
  for (std::size_t x = 0; x < 4; ++x) dict[x] = pm(x, 0);
  CHECK(lp_norm(TableFunction(sq, dict), 2.0) == doctest::Approx(1.0));
  CHECK(lp_norm(TableFunction(u4, {0, 1, 2, 3}), 1.0) == doctest::Approx(1.5));
  CHECK(lp_norm(TableFunction(u4, {0, 1, 2, -3}), kInfinity) == doctest::Approx(3.0));
  CHECK_THROWS_AS(lp_norm(TableFunction(u4, {0, 1, 2, 3}), 0.5), InvalidParameter);
}

TEST_CASE("variance examples") {
  const SpacePtr sq = two_by_two();
  CHECK(variance(TableFunction::constant(sq, 4.0)) == doctest::Approx(0.0));
  std::vector<double> dict(4);
  std::vector<double> half(4);
  for (std::size_t x = 0; x < 4; ++x) {
    dict[x] = pm(x, 0);
    half[x] = pm(x, 0) > 0 ? 1.0 : 0.0;
  }
  CHECK(variance(TableFunction(sq, dict)) == doctest::Approx(1.0));
  CHECK(variance(TableFunction(sq, half)) == doctest::Approx(0.25));
  // Non-uniform weights: hand computation.
  const SpacePtr w = FiniteProductSpace::from_weights({0.2, 0.8});
  CHECK(variance(TableFunction(w, {1.0, 0.0})) == doctest::Approx(0.16));
}

TEST_CASE("entropy examples") {
  const SpacePtr sq = two_by_two();
  CHECK(entropy(TableFunction::constant(sq, 3.0)) == doctest::Approx(0.0));
  std::vector<double> half(4);
  for (std::size_t x = 0; x < 4; ++x) half[x] = pm(x, 0) > 0 ? 1.0 : 0.0;
  CHECK(entropy(TableFunction(sq, half)) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(entropy(TableFunction(FiniteProductSpace::uniform(2), {2.0, 0.0})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(entropy(TableFunction(sq, {1.0, -1.0, 0.0, 0.0})), DomainError);
}

TEST_CASE("conditional expectation examples") {
  const SpacePtr sq = two_by_two();
  std::vector<double> prod(4);
  std::vector<double> vals{0.3, -1.0, 2.0, 5.0};
  for (std::size_t x = 0; x < 4; ++x) prod[x] = pm(x, 0) * pm(x, 1);
  const TableFunction f(sq, vals);
  const std::vector<std::size_t> all{0, 1};
  const TableFunction same = conditional_expectation(f, all);
  for (std::size_t x = 0; x < 4; ++x) CHECK(same[x] == doctest::Approx(vals[x]));
  const TableFunction none = conditional_expectation(f, std::vector<std::size_t>{});
  for (std::size_t x = 0; x < 4; ++x) CHECK(none[x] == doctest::Approx(mean(f)));
  const std::vector<std::size_t> first{0};
  const TableFunction killed = conditional_expectation(TableFunction(sq, prod), first);
  for (std::size_t x = 0; x < 4; ++x) CHECK(killed[x] == doctest::Approx(0.0));
  // Keeping coordinate 0 of f averages over coordinate 1.
  const TableFunction g = conditional_expectation(f, first);
  CHECK(g[0] == doctest::Approx(0.5 * (vals[0] + vals[2])));
  CHECK(g[1] == doctest::Approx(0.5 * (vals[1] + vals[3])));
}

TEST_CASE("arithmetic requires matching spaces") {
  const TableFunction a = TableFunction::constant(FiniteProductSpace::uniform(3), 1.0);
  const TableFunction b = TableFunction::constant(FiniteProductSpace::uniform(4), 1.0);
  CHECK_THROWS_AS(a + b, InvalidParameter);
  const TableFunction c = a + 2.0 * a;
  CHECK(c[2] == doctest::Approx(3.0));
  CHECK(inner_product(a, c) == doctest::Approx(3.0));
}

TEST_CASE("pooled covariance of identical columns is the variance") {
  const std::vector<double> a{1.0, -1.0, 1.0, -1.0};
  const McEstimate e = pooled_covariance(a, a);
  CHECK(e.estimate == doctest::Approx(1.0));
}

}
