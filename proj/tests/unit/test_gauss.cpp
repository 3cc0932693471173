#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "nstab/error.hpp"
#include "nstab/gauss.hpp"
#include "nstab/quadrature.hpp"

using namespace nstab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kPhi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double std_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// E h(e^{-t} x + sqrt(1 - e^{-2t}) Z) on the real line.
template <typename H>
double mehler(H h, double x, double t) {
  const double a = std::exp(-t);
  const double b = std::sqrt(1.0 - std::exp(-2.0 * t));
  auto g = [&](double z) { return h(a * x + b * z) * std::exp(-0.5 * z * z) * kPhi0; };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -kInf, kInf, 15, 1e-14);
}

}  // namespace

TEST_SUITE("gauss") {

TEST_CASE("hermite values are the normalized probabilists' polynomials") {
  for (double x : {-2.3, -0.4, 0.0, 1.1, 3.0}) {
    const std::vector<double> h = hermite_values(x, 4);
    CHECK(h[0] == doctest::Approx(1.0));
    CHECK(h[1] == doctest::Approx(x));
    CHECK(h[2] == doctest::Approx((x * x - 1.0) / std::sqrt(2.0)));
    CHECK(h[3] == doctest::Approx((x * x * x - 3.0 * x) / std::sqrt(6.0)));
    CHECK(h[4] == doctest::Approx((std::pow(x, 4) - 6 * x * x + 3) / std::sqrt(24.0)));
  }
}

TEST_CASE("index set ordering and lookup") {
  const auto set = HermiteIndexSet::get(2, 2);
  REQUIRE(set->size() == 6);
  CHECK((*set)[0] == MultiIndex{0, 0});
  CHECK(set->order(5) == 2);
  CHECK(set->find({1, 1}) < set->size());
  CHECK(set->find({3, 0}) == set->size());
}

TEST_CASE("expansion norms and evaluation") {
  HermiteExpansion f(2, 3);
  f.set_coefficient({0, 0}, 0.5);
  f.set_coefficient({1, 0}, -1.0);
  f.set_coefficient({1, 2}, 2.0);
  CHECK(f.l2_norm() == doctest::Approx(std::sqrt(0.25 + 1.0 + 4.0)));
  CHECK(f.variance() == doctest::Approx(5.0));
  CHECK(f.effective_degree() == 3);
  const double x[2] = {0.7, -1.2};
  const double expected = 0.5 - 0.7 + 2.0 * 0.7 * (1.44 - 1.0) / std::sqrt(2.0);
  CHECK(f.evaluate(x) == doctest::Approx(expected));
  // Orthonormality checked by tensor quadrature of f^2.
  const double second = tensor_expectation([&](std::span<const double> y) { return std::pow(f.evaluate(y), 2); }, 2, 8);
  CHECK(second == doctest::Approx(5.25).epsilon(1e-12));
  CHECK(dirichlet_energy(f) == doctest::Approx(1.0 + 3.0 * 4.0));
}

TEST_CASE("ornstein-uhlenbeck multiplier matches Mehler's formula") {
  const HermiteExpansion h1 = HermiteExpansion::basis(1, 3, {1});
  const HermiteExpansion h3 = HermiteExpansion::basis(1, 3, {3});
  for (double t : {0.2, 1.0}) {
    const HermiteExpansion p1 = ou_apply(h1, t);
    const HermiteExpansion p3 = ou_apply(h3, t);
    for (double x : {-1.5, 0.3, 2.0}) {
      const double y[1] = {x};
      CHECK(std::abs(p1.evaluate(y) - mehler([](double z) { return z; }, x, t)) <= 1e-8);
      CHECK(std::abs(p3.evaluate(y) - mehler([](double z) { return (z * z * z - 3 * z) / std::sqrt(6.0); }, x, t)) <= 1e-8);
    }
  }
  const HermiteExpansion c = HermiteExpansion::basis(2, 2, {0, 0}, 3.0);
  CHECK(ou_apply(c, 5.0)[0] == doctest::Approx(3.0));
  HermiteExpansion f = HermiteExpansion::basis(2, 2, {1, 1});
  const HermiteExpansion same = ou_apply(f, 0.0);
  CHECK(same.coefficient({1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("partial derivatives against finite differences") {
  const HermiteExpansion h2 = HermiteExpansion::basis(1, 2, {2});
  const HermiteExpansion d = partial_derivative(h2, 0);
  CHECK(d.coefficient({1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(partial_derivative(HermiteExpansion::basis(2, 2, {0, 0}, 4.0), 0).l2_norm() == 0.0);
  CHECK(partial_derivative(HermiteExpansion::basis(2, 2, {2, 0}), 1).l2_norm() == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  HermiteExpansion f(2, 4);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = normal(rng);
  const HermiteExpansion df = partial_derivative(f, 1);
  const double h = 1e-5;
  for (double a : {-1.0, 0.4}) {
    for (double b : {-0.6, 1.3}) {
      const double x[2] = {a, b};
      const double up[2] = {a, b + h};
      const double dn[2] = {a, b - h};
      CHECK(df.evaluate(x) == doctest::Approx((f.evaluate(up) - f.evaluate(dn)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("restriction keeps coefficients inside the coordinate set") {
  HermiteExpansion f(3, 2);
  f.set_coefficient({1, 0, 0}, 1.0);
  f.set_coefficient({0, 1, 1}, 2.0);
  f.set_coefficient({0, 0, 2}, 3.0);
  const std::vector<std::size_t> keep{2};
  const HermiteExpansion g = restrict_to_coordinates(f, keep);
  CHECK(g.coefficient({1, 0, 0}) == 0.0);
  CHECK(g.coefficient({0, 1, 1}) == 0.0);
  CHECK(g.coefficient({0, 0, 2}) == 3.0);
}

TEST_CASE("L1 norms against closed forms") {
  CHECK(l1_norm_gauss(HermiteExpansion::basis(1, 2, {0}), 5).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(l1_norm_gauss(HermiteExpansion::basis(1, 2, {1}), 5).value ==
        doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-10));
  // Z^2 = h_0 + sqrt(2) h_2.
  HermiteExpansion sq(1, 2);
  sq.set_coefficient({0}, 1.0);
  sq.set_coefficient({2}, std::sqrt(2.0));
  CHECK(l1_norm_gauss(sq, 5).value == doctest::Approx(1.0).epsilon(1e-10));
  // E|Z1 Z2| = 2 / pi.
  CHECK(l1_norm_gauss(HermiteExpansion::basis(2, 2, {1, 1}), 5).value ==
        doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-8));
  // Z1 + Z2 + Z3 ~ N(0, 3).
  HermiteExpansion sum(3, 1);
  sum.set_coefficient({1, 0, 0}, 1.0);
  sum.set_coefficient({0, 1, 0}, 1.0);
  sum.set_coefficient({0, 0, 1}, 1.0);
  CHECK(l1_norm_gauss(sum, 3).value == doctest::Approx(std::sqrt(3.0) * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-8));
  // E|Z|^{3/2} = 2^{3/4} Gamma(5/4) / sqrt(pi).
  const double m15 = std::pow(2.0, 0.75) * std::tgamma(1.25) / std::sqrt(std::numbers::pi);
  CHECK(lr_norm_gauss_value(HermiteExpansion::basis(1, 2, {1}), 1.5, 5) ==
        doctest::Approx(std::pow(m15, 1.0 / 1.5)).epsilon(1e-9));
  CHECK(lr_norm_gauss_value(sum, 2.0, 3) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("L1 norm agrees with a Monte Carlo oracle in two dimensions") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  HermiteExpansion f(2, 3);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = normal(rng);
  const double value = l1_norm_gauss(f, 7).value;
  const int samples = 400000;
  double acc = 0.0;
  double acc2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x[2] = {normal(rng), normal(rng)};
    const double v = std::abs(f.evaluate(x));
    acc += v;
    acc2 += v * v;
  }
  const double m = acc / samples;
  const double se = std::sqrt((acc2 / samples - m * m) / samples);
  CHECK(std::abs(value - m) <= 4.0 * se);
}

TEST_CASE("norm arguments are validated") {
  const HermiteExpansion f = HermiteExpansion::basis(1, 4, {1});
  CHECK_THROWS_AS(lr_norm_gauss(f, 0.5, 9), InvalidParameter);
  CHECK_THROWS_AS(lr_norm_gauss(f, 1.0, 2), InvalidParameter);
  CHECK_THROWS_AS(l1_norm_gauss(HermiteExpansion(kMaxQuadratureDimension + 1, 1), 3), SizeLimit);
}

TEST_CASE("geometric influence of half-spaces") {
  const HalfspaceBox one{{0.0}, LineMeasure::gaussian()};
  CHECK(geometric_influence_halfspace(one, 0) == doctest::Approx(kPhi0));
  const HalfspaceBox inf{{kInf}, LineMeasure::gaussian()};
  CHECK(geometric_influence_halfspace(inf, 0) == 0.0);
  const HalfspaceBox two{{0.0, 0.0}, LineMeasure::gaussian()};
  CHECK(geometric_influence_halfspace(two, 1) == doctest::Approx(0.5 * kPhi0));
  const HalfspaceBox shifted{{0.3, -1.2}, LineMeasure::gaussian()};
  CHECK(geometric_influence_halfspace(shifted, 0) ==
        doctest::Approx(std_cdf(-1.2) * kPhi0 * std::exp(-0.045)));
  CHECK(box_measure(shifted) == doctest::Approx(std_cdf(0.3) * std_cdf(-1.2)));
}

TEST_CASE("noise stability of half-spaces") {
  const HalfspaceBox one{{0.0}, LineMeasure::gaussian()};
  for (double eta : {0.2, 0.5, 0.8}) {
    const double rho = std::sqrt(1.0 - eta * eta);
    CHECK(gaussian_noise_stability_box(one, eta) == doctest::Approx(std::asin(rho) / (2.0 * std::numbers::pi)).epsilon(1e-10));
  }
  const HalfspaceBox box{{0.4, -0.3}, LineMeasure::gaussian()};
  const double mu = box_measure(box);
  CHECK(gaussian_noise_stability_box(box, 1e-9) == doctest::Approx(mu * (1.0 - mu)).epsilon(1e-6));
  CHECK(std::abs(gaussian_noise_stability_box(box, 1.0 - 1e-12)) < 1e-5);
  const McEstimate mc = gaussian_noise_stability_mc(
      [&](std::span<const double> x) { return box_indicator(one, x); }, 1, 0.6, 1'000'000, 31);
  CHECK(std::abs(mc.estimate - gaussian_noise_stability_box(one, 0.6)) <= 4.0 * mc.std_error);
}

TEST_CASE("noise stability of expansions") {
  const HermiteExpansion h1 = HermiteExpansion::basis(1, 2, {1});
  for (double eta : {0.3, 0.7}) CHECK(gaussian_noise_stability(h1, eta) == doctest::Approx(std::sqrt(1.0 - eta * eta)));
  const McEstimate mc = gaussian_noise_stability_mc([](std::span<const double> x) { return x[0]; }, 1, 0.3, 1'000'000, 5);
  CHECK(std::abs(mc.estimate - std::sqrt(1.0 - 0.09)) <= 4.0 * mc.std_error);
  const McEstimate c = gaussian_noise_stability_mc([](std::span<const double>) { return 2.0; }, 2, 0.3, 1000, 5);
  CHECK(c.estimate == 0.0);
  CHECK(c.std_error == 0.0);
}

TEST_CASE("exponential power measures") {
  const LineMeasure m1 = LineMeasure::exponential_power(1.0);
  CHECK(m1.normalizer() == doctest::Approx(2.0));
  CHECK(m1.cdf(-1.0) == doctest::Approx(0.5 * std::exp(-1.0)));
  const LineMeasure m3 = LineMeasure::exponential_power(3.0);
  CHECK(m3.normalizer() == doctest::Approx(2.0 * std::tgamma(1.0 + 1.0 / 3.0)));
  CHECK(m3.cdf(0.0) == doctest::Approx(0.5));
  CHECK(m3.cdf(0.8) + m3.sf(0.8) == doctest::Approx(1.0));
  CHECK(m3.sf(m3.upper_quantile(0.1)) == doctest::Approx(0.1));
  CHECK_THROWS_AS(LineMeasure::exponential_power(0.5), InvalidParameter);
}

TEST_CASE("kms example threshold") {
  // mu_2 is N(0, 1/2); the box of measure 1/2 has F(a)^n = 1/2.
  const KmsResult r = kms_example(2, 2.0);
  double lo = -5.0;
  double hi = 5.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid) < std::sqrt(0.5) ? lo : hi) = mid;
  }
  CHECK(r.threshold == doctest::Approx(lo).epsilon(1e-9));
  const HalfspaceBox box{{r.threshold, r.threshold}, LineMeasure::exponential_power(2.0)};
  CHECK(box_measure(box) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.influence == doctest::Approx(geometric_influence_halfspace(box, 0)));
  CHECK(r.scaled_ratio == doctest::Approx(2.0 * r.influence / std::sqrt(std::log(2.0))));
}

TEST_CASE("tensor grid helpers") {
  CHECK(tensor_expectation([](std::span<const double> x) { return std::pow(x[0], 4) * x[1] * x[1]; }, 2, 4) ==
        doctest::Approx(3.0));
  const HermiteExpansion h1 = HermiteExpansion::basis(1, 1, {1});
  const GaussHermiteRule rule = gauss_hermite_rule(3);
  CHECK(sup_on_tensor_grid(h1, 3) == doctest::Approx(std::abs(rule.nodes.front())));
  CHECK(std::abs(rule.nodes.front()) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("quadrature helpers") {
  const GaussHermiteRule rule = gauss_hermite_rule(5);
  double m4 = 0.0;
  double m0 = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    m4 += rule.weights[j] * std::pow(rule.nodes[j], 4);
    m0 += rule.weights[j];
  }
  CHECK(m0 == doctest::Approx(1.0));
  CHECK(m4 == doctest::Approx(3.0));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : {-0.9, 0.0, 0.4, 0.95}) {
    CHECK(bivariate_normal_cdf(0.0, 0.0, r) == doctest::Approx(0.25 + std::asin(r) / (2.0 * std::numbers::pi)).epsilon(1e-10));
  }
  CHECK(bivariate_normal_cdf(0.7, -0.2, 0.0) == doctest::Approx(std_cdf(0.7) * std_cdf(-0.2)).epsilon(1e-10));
  CHECK(normal_sf(10.0) == doctest::Approx(0.5 * std::erfc(10.0 / std::sqrt(2.0))).epsilon(1e-10));
  CHECK(normal_cdf(-1.0) == doctest::Approx(std_cdf(-1.0)));
}

}
