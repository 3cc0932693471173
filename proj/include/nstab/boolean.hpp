#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nstab/core.hpp"
#include "nstab/markov.hpp"

namespace nstab {

// Largest dimension supported by dense cube tables.
inline constexpr int kMaxCubeDimension = 24;
// Largest dimension for which a dense generator matrix is built.
inline constexpr int kMaxCubeGeneratorDimension = 10;

// Value convention for Boolean functions.
enum class BooleanRange { kPlusMinusOne, kZeroOne };

// A function on {-1,1}^n under the product measure nu_p = (p delta_{-1} +
// q delta_{+1})^n, q = 1 - p. States are n-bit integers with bit i set iff
// x_i = +1, so tau_i is x ^ (1 << i). Coordinates are 0-based.
class CubeFunction {
 public:
  CubeFunction(int n, std::vector<double> values, double p = 0.5);

  int n() const { return n_; }
  double p() const { return p_; }
  bool uniform() const { return p_ == 0.5; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t x) const { return values_[x]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  double weight(std::size_t x) const;
  SpacePtr space() const;
  TableFunction to_table() const;
  static CubeFunction from_table(const TableFunction& f, double p = 0.5);

  // True when every value is 0 or 1.
  bool is_indicator() const;

 private:
  int n_;
  double p_;
  std::vector<double> values_;
};

inline int coordinate_sign(std::uint64_t x, int i) { return ((x >> i) & 1U) ? 1 : -1; }

SpacePtr cube_space(int n, double p = 0.5);

// Coefficients f^(S) in the uniform characters chi_S, indexed by the subset
// bitmask S.
struct WalshExpansion {
  int n = 0;
  std::vector<double> coefficients;
};

// x -> f(tau_i x) - f(x).
CubeFunction discrete_derivative(const CubeFunction& f, int i);

// ||D_i f||_r under the cube's measure; r = 1 is I_i(f).
double influence(const CubeFunction& f, int i, double r = 1.0);
std::vector<double> influence_profile(const CubeFunction& f, double r = 1.0);

// nu{x in A, tau_i x not in A} for a 0/1 indicator.
double set_influence(const CubeFunction& indicator, int i);

WalshExpansion walsh_transform(const CubeFunction& f);
CubeFunction inverse_walsh(const WalshExpansion& expansion);

// T_t f by direct summation of the kernel prod_i (1 + e^{-t} x_i w_i).
CubeFunction bonami_beckner_kernel(const CubeFunction& f, double t);
// T_t f through the Walsh multiplier e^{-|S| t}.
CubeFunction bonami_beckner(const CubeFunction& f, double t);
// P_t = exp(t sum_i (E_i - Id)) applied coordinate by coordinate; valid for
// every p and equal to T_t when p = 1/2.
CubeFunction cube_semigroup(const CubeFunction& f, double t);

// Cov(f, P_t f) with e^{-t} = 1 - eta.
double noise_stability(const CubeFunction& f, double eta);

// Monte Carlo estimate of Cov(f(X), f(X^eta)) where each coordinate of X^eta
// is redrawn from nu_p with probability eta.
McEstimate noise_stability_mc(const CubeFunction& f, double eta, std::size_t samples,
                              std::uint64_t seed);

// Uniform: L = (1/2) sum_i D_i with directions D_i / 2, lambda = rho = 1.
// Biased: L = sum_i (E_i - Id) with directions E_i - Id and the closed-form
// rho. Both reproduce the Walsh multiplier e^{-|S| t}.
Generator build_cube_generator(int n, double p = 0.5);

// Built-in families.
CubeFunction constant_function(int n, double c, double p = 0.5);
CubeFunction dictator(int n, int coordinate = 0, BooleanRange range = BooleanRange::kPlusMinusOne,
                      double p = 0.5);
CubeFunction parity(int n, BooleanRange range = BooleanRange::kPlusMinusOne, double p = 0.5);
CubeFunction majority(int n, BooleanRange range = BooleanRange::kPlusMinusOne, double p = 0.5);
// OR of n / width disjoint ANDs of width coordinates (x_i = +1 is "true").
CubeFunction tribes(int n, int width, BooleanRange range = BooleanRange::kPlusMinusOne,
                    double p = 0.5);

// Reads lines "<bitstring> <value>"; character j of the bitstring is x_{j+1},
// '1' or '+' for +1 and '0' or '-' for -1. Blank lines and '#' comments are
// skipped. Every one of the 2^n states must appear exactly once.
CubeFunction parse_cube_function(std::istream& in, double p = 0.5);
void write_cube_function(std::ostream& out, const CubeFunction& f);

}  // namespace nstab
