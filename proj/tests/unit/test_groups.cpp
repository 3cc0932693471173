#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nstab/boolean.hpp"
#include "nstab/error.hpp"
#include "nstab/groups.hpp"

using namespace nstab;

namespace {

std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[static_cast<std::size_t>(b[k])];
  return out;
}

std::vector<double> sorted_spectrum(const Generator& g) {
  const SemigroupEvolution ev(g);
  std::vector<double> v(ev.eigenvalues().data(), ev.eigenvalues().data() + ev.eigenvalues().size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_SUITE("groups") {

TEST_CASE("permutation ranks") {
  CHECK(permutation_at(3, 0) == std::vector<int>{0, 1, 2});
  CHECK(permutation_at(3, 5) == std::vector<int>{2, 1, 0});
  std::vector<std::vector<int>> seen;
  for (std::size_t r = 0; r < 24; ++r) seen.push_back(permutation_at(4, r));
  std::sort(seen.begin(), seen.end());
  CHECK(std::unique(seen.begin(), seen.end()) == seen.end());
}

TEST_CASE("symmetric group multiplication table is right composition") {
  const CayleyModel m = symmetric_group_model(4);
  CHECK(m.order() == 24);
  CHECK(m.generator_count() == 6);
  for (std::size_t s = 0; s < m.generator_count(); ++s) {
    for (std::size_t g = 0; g < m.order(); ++g) {
      const auto expected = compose(permutation_at(4, g), permutation_at(4, m.right_mult[s][0]));
      CHECK(permutation_at(4, m.right_mult[s][g]) == expected);
    }
    CHECK(m.right_mult[m.inverse[s]][m.right_mult[s][5]] == 5);
  }
}

TEST_CASE("generating sets are conjugation closed") {
  for (const CayleyModel& m : {symmetric_group_model(3), torus_model(3, 2), torus_model(2, 3)}) {
    std::vector<std::uint32_t> images;
    for (std::size_t s = 0; s < m.generator_count(); ++s) images.push_back(m.right_mult[s][0]);
    std::sort(images.begin(), images.end());
    // s t s^{-1} for all s, t lands in S, read off from the identity element 0.
    for (std::size_t s = 0; s < m.generator_count(); ++s) {
      for (std::size_t t = 0; t < m.generator_count(); ++t) {
        const std::uint32_t conj = m.right_mult[m.inverse[s]][m.right_mult[t][m.right_mult[s][0]]];
        CHECK(std::binary_search(images.begin(), images.end(), conj));
      }
    }
  }
}

TEST_CASE("symmetric group spectra") {
  const CayleySystem s3 = build_symmetric_group(3);
  CHECK(s3.model.order() == 6);
  CHECK(s3.model.generator_count() == 3);
  CHECK(spectral_gap(*s3.generator) == doctest::Approx(1.0).epsilon(1e-9));
  for (int n : {3, 4, 5}) {
    CHECK(spectral_gap(*build_symmetric_group(n).generator) == doctest::Approx(2.0 / (n - 1)).epsilon(1e-9));
    CHECK(symmetric_group_spectral_gap(n) == doctest::Approx(2.0 / (n - 1)));
  }
}

TEST_CASE("torus generators") {
  const CayleySystem t32 = build_torus(3, 2);
  const Eigen::MatrixXd& l = t32.generator->matrix();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    CHECK(std::abs(l.row(i).sum()) < 1e-12);
    CHECK(std::abs(l.col(i).sum()) < 1e-12);
  }
  CHECK(spectral_gap(*build_torus(4, 1).generator) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(torus_spectral_gap(4, 1) == doctest::Approx(1.0));
  CHECK(spectral_gap(*t32.generator) == doctest::Approx(torus_spectral_gap(3, 2)).epsilon(1e-9));
  // m = 2 is the uniform cube walk slowed down by n/2.
  const std::vector<double> torus = sorted_spectrum(*build_torus(2, 3).generator);
  const std::vector<double> cube = sorted_spectrum(build_cube_generator(3));
  REQUIRE(torus.size() == cube.size());
  for (std::size_t k = 0; k < torus.size(); ++k) CHECK(torus[k] * 1.5 == doctest::Approx(cube[k]).epsilon(1e-9));
}

TEST_CASE("cayley influences") {
  const CayleyModel m = symmetric_group_model(3);
  const TableFunction empty = TableFunction::constant(m.space, 0.0);
  const TableFunction full = TableFunction::constant(m.space, 1.0);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(cayley_influence(m, empty, s) == 0.0);
    CHECK(cayley_influence(m, full, s) == 0.0);
  }
  std::vector<double> id(6, 0.0);
  id[0] = 1.0;
  for (std::size_t s = 0; s < 3; ++s) CHECK(cayley_influence(m, TableFunction(m.space, id), s) == doctest::Approx(1.0 / 6.0));
  std::vector<double> fix(6, 0.0);
  for (std::size_t g = 0; g < 6; ++g) fix[g] = permutation_at(3, g)[0] == 0 ? 1.0 : 0.0;
  const TableFunction a(m.space, fix);
  CHECK(cayley_influence(m, a, m.find_generator("(1 2)")) == doctest::Approx(1.0 / 3.0));
  CHECK(cayley_influence(m, a, m.find_generator("(2 3)")) == 0.0);
  CHECK_THROWS_AS(m.find_generator("(1 4)"), InvalidParameter);
  CHECK_THROWS_AS(cayley_influence(m, TableFunction::constant(m.space, 0.5), 0), DomainError);
  // Both exits from A and entries into A count.
  CHECK(cayley_derivative_norm(m, a, m.find_generator("(1 2)")) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("total influence on tori") {
  const CayleyModel c = torus_model(3, 2);
  CHECK(total_influence(c, TableFunction::constant(c.space, 1.0)) == 0.0);
  const CayleyModel cube = torus_model(2, 3);
  std::vector<double> dict(8);
  for (std::size_t x = 0; x < 8; ++x) dict[x] = static_cast<double>(cube.space->coordinate(x, 0));
  CHECK(total_influence(cube, TableFunction(cube.space, dict)) == doctest::Approx(1.0));
  const CayleyModel z3 = torus_model(3, 1);
  CHECK(total_influence(z3, TableFunction(z3.space, {1.0, 0.0, 0.0})) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("size limits") {
  CHECK_THROWS_AS(build_symmetric_group(1), InvalidParameter);
  CHECK_THROWS_AS(torus_model(10, 7), SizeLimit);
  // Too large for a dense generator, still a model.
  const CayleySystem big = build_torus(2, 13);
  CHECK(big.generator == nullptr);
  CHECK(big.model.order() == 8192);
}

}
