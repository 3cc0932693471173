#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nstab/core.hpp"
#include "nstab/markov.hpp"

namespace nstab {

// Largest state count for which a dense generator matrix is built.
inline constexpr std::size_t kMaxDenseStates = 4096;
// Largest group order for Cayley tables.
inline constexpr std::size_t kMaxCayleyStates = 1'000'000;

// A finite group with a symmetric, conjugation-closed generating set S,
// under the uniform measure. Edges are right multiplications g -> g s.
struct CayleyModel {
  std::string name;
  SpacePtr space;
  std::vector<std::string> generator_names;
  // right_mult[s][g] is the index of g s.
  std::vector<std::vector<std::uint32_t>> right_mult;
  // Index in S of s^{-1}.
  std::vector<std::size_t> inverse;
  // The generators entering one-sided totals (e_i on tori, all of S on S_n).
  std::vector<std::size_t> one_sided;

  std::size_t order() const { return space->size(); }
  std::size_t generator_count() const { return right_mult.size(); }
  // Position of the generator with the given name; throws InvalidParameter.
  std::size_t find_generator(const std::string& generator) const;
};

struct CayleySystem {
  CayleyModel model;
  // Null when the group is too large for a dense generator.
  std::shared_ptr<const Generator> generator;
};

// S_n with all transpositions. Elements are indexed by Lehmer rank, the
// identity first; composition is (sigma tau)(k) = sigma(tau(k)).
CayleyModel symmetric_group_model(int n);
// The permutation (0-based images) with the given Lehmer rank.
std::vector<int> permutation_at(int n, std::size_t rank);
// (Z/mZ)^n with S = {+e_i, -e_i} ({e_i} when m = 2). State x has coordinate
// i at digit i in base m (coordinate 0 fastest), so the space has factors.
CayleyModel torus_model(int m, int n);

// L = K - Id with K f(g) = (1/|S|) sum_s f(g s); directions D_s / sqrt(2|S|)
// so that sum_s ||Gamma_s f||^2 = (1/(2|S|)) sum_s ||D_s f||^2 = E(f,f).
Generator cayley_generator(const CayleyModel& model);

CayleySystem build_symmetric_group(int n);
CayleySystem build_torus(int m, int n);

// Closed forms for the smallest nonzero eigenvalue of -L.
double symmetric_group_spectral_gap(int n);
double torus_spectral_gap(int m, int n);

// g -> f(g s) - f(g).
TableFunction cayley_derivative(const CayleyModel& model, const TableFunction& f, std::size_t s);
double cayley_derivative_norm(const CayleyModel& model, const TableFunction& f, std::size_t s,
                              double r = 1.0);
// mu{g in A, g s not in A}.
double cayley_influence(const CayleyModel& model, const TableFunction& indicator, std::size_t s);
// sum over one-sided generators of ||D_s f||_1 for a 0/1 function.
double total_influence(const CayleyModel& model, const TableFunction& indicator);

bool is_indicator(const TableFunction& f);

}  // namespace nstab
