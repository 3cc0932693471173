#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "nstab/boolean.hpp"
#include "nstab/error.hpp"

using namespace nstab;

namespace {

// Brute-force Walsh coefficient <f, chi_S> under the uniform measure.
double brute_coefficient(const CubeFunction& f, std::uint64_t s) {
  double acc = 0.0;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    double chi = 1.0;
    for (int i = 0; i < f.n(); ++i) {
      if ((s >> i) & 1U) chi *= coordinate_sign(x, i);
    }
    acc += f[x] * chi;
  }
  return acc / static_cast<double>(f.size());
}

CubeFunction random_cube(int n, std::uint64_t seed, double p = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(std::size_t{1} << n);
  for (double& x : v) x = normal(rng);
  return CubeFunction(n, v, p);
}

}  // namespace

TEST_SUITE("boolean") {

TEST_CASE("built-in functions") {
  const CubeFunction d = dictator(3, 1);
  for (std::uint64_t x = 0; x < 8; ++x) CHECK(d[x] == coordinate_sign(x, 1));
  const CubeFunction par = parity(3);
  CHECK(par[0] == -1.0);
  CHECK(par[7] == 1.0);
  const CubeFunction maj = majority(3, BooleanRange::kZeroOne);
  CHECK(maj[0b011] == 1.0);
  CHECK(maj[0b001] == 0.0);
  CHECK(maj.is_indicator());
  // tribes(6, 3): true iff x0=x1=x2=+1 or x3=x4=x5=+1.
  const CubeFunction tr = tribes(6, 3, BooleanRange::kZeroOne);
  CHECK(tr[0b000111] == 1.0);
  CHECK(tr[0b111000] == 1.0);
  CHECK(tr[0b011011] == 0.0);
  CHECK_THROWS_AS(tribes(7, 3), InvalidParameter);
  CHECK_THROWS_AS(majority(4), InvalidParameter);
}

TEST_CASE("discrete derivative examples") {
  const CubeFunction d = dictator(3, 0);
  const CubeFunction dd = discrete_derivative(d, 0);
  for (std::uint64_t x = 0; x < 8; ++x) CHECK(dd[x] == -2.0 * coordinate_sign(x, 0));
  const CubeFunction none = discrete_derivative(d, 2);
  for (std::uint64_t x = 0; x < 8; ++x) CHECK(none[x] == 0.0);
  const CubeFunction dm = discrete_derivative(majority(3), 0);
  int nonzero = 0;
  for (std::uint64_t x = 0; x < 8; ++x) {
    const bool split = coordinate_sign(x, 1) != coordinate_sign(x, 2);
    if (split) {
      ++nonzero;
      CHECK(std::abs(dm[x]) == 2.0);
    } else {
      CHECK(dm[x] == 0.0);
    }
  }
  CHECK(nonzero == 4);
}

TEST_CASE("influence examples") {
  CHECK(influence(dictator(3, 0), 0) == doctest::Approx(2.0));
  for (int i = 0; i < 3; ++i) CHECK(influence(majority(3), i) == doctest::Approx(1.0));
  CHECK(influence(dictator(3, 0, BooleanRange::kZeroOne), 0) == doctest::Approx(1.0));
  // Biased measure: |D_0 x_0| = 2 everywhere regardless of p.
  CHECK(influence(dictator(2, 0, BooleanRange::kPlusMinusOne, 0.2), 0, 2.0) == doctest::Approx(2.0));
  const std::vector<double> prof = influence_profile(majority(3));
  CHECK(prof.size() == 3);
}

TEST_CASE("set influence examples") {
  CHECK(set_influence(dictator(3, 0, BooleanRange::kZeroOne), 0) == doctest::Approx(0.5));
  CHECK(set_influence(majority(3, BooleanRange::kZeroOne), 0) == doctest::Approx(0.25));
  CHECK(set_influence(constant_function(3, 1.0), 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(set_influence(majority(3), 0), DomainError);
}

TEST_CASE("walsh transform") {
  const WalshExpansion d = walsh_transform(dictator(3, 0));
  for (std::size_t s = 0; s < 8; ++s) CHECK(d.coefficients[s] == doctest::Approx(s == 1 ? 1.0 : 0.0));
  const WalshExpansion par = walsh_transform(parity(4));
  CHECK(par.coefficients[15] == doctest::Approx(1.0));
  const WalshExpansion m = walsh_transform(majority(3));
  for (std::size_t s = 0; s < 8; ++s) {
    const int bits = std::popcount(s);
    const double expected = bits == 1 ? 0.5 : bits == 3 ? -0.5 : 0.0;
    CHECK(m.coefficients[s] == doctest::Approx(expected));
  }
  const CubeFunction f = random_cube(5, 17);
  const WalshExpansion w = walsh_transform(f);
  double parseval = 0.0;
  double norm = 0.0;
  for (std::uint64_t s = 0; s < 32; ++s) {
    CHECK(w.coefficients[s] == doctest::Approx(brute_coefficient(f, s)).epsilon(1e-12));
    parseval += w.coefficients[s] * w.coefficients[s];
    norm += f[s] * f[s] / 32.0;
  }
  CHECK(parseval == doctest::Approx(norm).epsilon(1e-10));
  const CubeFunction back = inverse_walsh(w);
  for (std::uint64_t x = 0; x < 32; ++x) CHECK(back[x] == doctest::Approx(f[x]));
}

TEST_CASE("bonami-beckner kernel and multiplier agree") {
  const CubeFunction f = random_cube(4, 2);
  for (double t : {0.0, 0.3, 1.7}) {
    const CubeFunction a = bonami_beckner_kernel(f, t);
    const CubeFunction b = bonami_beckner(f, t);
    const CubeFunction c = cube_semigroup(f, t);
    for (std::uint64_t x = 0; x < 16; ++x) {
      CHECK(std::abs(a[x] - b[x]) <= 1e-12);
      CHECK(std::abs(a[x] - c[x]) <= 1e-12);
    }
  }
  const CubeFunction far = bonami_beckner_kernel(f, 60.0);
  double m = 0.0;
  for (double v : f.values()) m += v / 16.0;
  for (std::uint64_t x = 0; x < 16; ++x) CHECK(far[x] == doctest::Approx(m));
  // chi_{0,2} -> e^{-2t} chi_{0,2}.
  std::vector<double> chi(16);
  for (std::uint64_t x = 0; x < 16; ++x) chi[x] = coordinate_sign(x, 0) * coordinate_sign(x, 2);
  const CubeFunction pc = bonami_beckner_kernel(CubeFunction(4, chi), 0.6);
  for (std::uint64_t x = 0; x < 16; ++x) CHECK(pc[x] == doctest::Approx(std::exp(-1.2) * chi[x]));
}

TEST_CASE("biased semigroup preserves the mean") {
  const CubeFunction f = random_cube(3, 9, 0.3);
  const CubeFunction pf = cube_semigroup(f, 0.8);
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::uint64_t x = 0; x < 8; ++x) {
    m0 += f.weight(x) * f[x];
    m1 += f.weight(x) * pf[x];
  }
  CHECK(m1 == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("noise stability closed forms") {
  for (double eta : {0.1, 0.5, 0.9}) {
    CHECK(noise_stability(dictator(4, 2), eta) == doctest::Approx(1.0 - eta));
    CHECK(noise_stability(parity(3), eta) == doctest::Approx(std::pow(1.0 - eta, 3)));
    CHECK(noise_stability(majority(3), eta) ==
          doctest::Approx(0.75 * (1.0 - eta) + 0.25 * std::pow(1.0 - eta, 3)));
  }
}

TEST_CASE("noise stability Monte Carlo") {
  const McEstimate c = noise_stability_mc(constant_function(3, 2.0), 0.5, 1000, 1);
  CHECK(c.estimate == 0.0);
  CHECK(c.std_error == 0.0);
  const McEstimate d = noise_stability_mc(dictator(3, 0), 0.5, 1'000'000, 7);
  CHECK(std::abs(d.estimate - 0.5) <= 4.0 * d.std_error);
  const McEstimate p = noise_stability_mc(parity(4), 0.5, 1'000'000, 8);
  CHECK(std::abs(p.estimate - 0.0625) <= 4.0 * p.std_error);
  const McEstimate again = noise_stability_mc(parity(4), 0.5, 1000, 8);
  const McEstimate same = noise_stability_mc(parity(4), 0.5, 1000, 8);
  CHECK(again.estimate == same.estimate);
}

TEST_CASE("cube generators") {
  const SemigroupEvolution ev(build_cube_generator(1));
  CHECK(ev.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev.eigenvalues()[1] == doctest::Approx(-1.0));
  const Generator biased = build_cube_generator(2, 0.2);
  REQUIRE(biased.cached_log_sobolev().has_value());
  CHECK(*biased.cached_log_sobolev() == doctest::Approx(0.86562).epsilon(1e-5));
  CHECK(spectral_gap(biased) == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_cube_generator(kMaxCubeGeneratorDimension + 1), SizeLimit);
}

TEST_CASE("function file round trip") {
  std::istringstream in("# majority\n000 -1\n100 -1\n010 -1\n110 1\n001 -1\n101 1\n011 1\n111 1\n");
  const CubeFunction f = parse_cube_function(in);
  const CubeFunction m = majority(3);
  for (std::uint64_t x = 0; x < 8; ++x) CHECK(f[x] == m[x]);
  std::ostringstream out;
  write_cube_function(out, f);
  std::istringstream again(out.str());
  const CubeFunction g = parse_cube_function(again);
  for (std::uint64_t x = 0; x < 8; ++x) CHECK(g[x] == f[x]);
  std::istringstream missing("00 1\n01 1\n10 1\n");
  CHECK_THROWS_AS(parse_cube_function(missing), InvalidParameter);
  std::istringstream dup("0 1\n0 1\n");
  CHECK_THROWS_AS(parse_cube_function(dup), InvalidParameter);
}

}
