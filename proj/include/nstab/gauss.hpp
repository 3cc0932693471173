#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "nstab/core.hpp"

namespace nstab {

// Default truncation degree and the largest dimension handled by quadrature.
inline constexpr int kDefaultHermiteDegree = 8;
inline constexpr int kMaxQuadratureDimension = 6;

using MultiIndex = std::vector<int>;

// All multi-indices alpha in N^n with |alpha| <= degree, ordered by total
// degree and then lexicographically (larger leading entries first).
class HermiteIndexSet {
 public:
  static std::shared_ptr<const HermiteIndexSet> get(int n, int degree);

  int n() const { return n_; }
  int degree() const { return degree_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t j) const { return indices_[j]; }
  int order(std::size_t j) const { return orders_[j]; }
  // Position of alpha, or size() when |alpha| > degree.
  std::size_t find(const MultiIndex& alpha) const;

 private:
  HermiteIndexSet(int n, int degree);

  int n_;
  int degree_;
  std::vector<MultiIndex> indices_;
  std::vector<int> orders_;
  std::map<MultiIndex, std::size_t> lookup_;
};

// Orthonormal Hermite values h_0(x)..h_degree(x), h_k = He_k / sqrt(k!).
std::vector<double> hermite_values(double x, int degree);

// sum_alpha c_alpha h_alpha on (R^n, standard Gaussian), with
// h_alpha(x) = prod_i h_{alpha_i}(x_i).
class HermiteExpansion {
 public:
  HermiteExpansion(int n, int degree);
  HermiteExpansion(int n, int degree, std::vector<double> coefficients);
  static HermiteExpansion basis(int n, int degree, const MultiIndex& alpha, double c = 1.0);

  int n() const { return set_->n(); }
  int degree() const { return set_->degree(); }
  std::size_t size() const { return c_.size(); }
  const HermiteIndexSet& indices() const { return *set_; }

  double operator[](std::size_t j) const { return c_[j]; }
  double& operator[](std::size_t j) { return c_[j]; }
  const std::vector<double>& coefficients() const { return c_; }

  double coefficient(const MultiIndex& alpha) const;
  void set_coefficient(const MultiIndex& alpha, double value);

  double evaluate(std::span<const double> x) const;
  double mean() const { return c_[0]; }
  double l2_norm() const;
  double variance() const;
  // Highest total degree carrying a nonzero coefficient (-1 for f = 0).
  int effective_degree() const;

  HermiteExpansion& operator+=(const HermiteExpansion& other);
  HermiteExpansion& operator*=(double s);

 private:
  std::shared_ptr<const HermiteIndexSet> set_;
  std::vector<double> c_;
};

HermiteExpansion operator+(HermiteExpansion a, const HermiteExpansion& b);
HermiteExpansion operator*(double s, HermiteExpansion a);

// P_t: c_alpha -> e^{-|alpha| t} c_alpha.
HermiteExpansion ou_apply(const HermiteExpansion& f, double t);

// d/dx_i through h_k' = sqrt(k) h_{k-1}; i is 0-based.
HermiteExpansion partial_derivative(const HermiteExpansion& f, int i);

// sum_i ||d_i f||_2^2 = sum_alpha |alpha| c_alpha^2.
double dirichlet_energy(const HermiteExpansion& f);

// Keeps the coefficients supported inside `coords`; this is E_S for the
// Gaussian product measure.
HermiteExpansion restrict_to_coordinates(const HermiteExpansion& f,
                                         std::span<const std::size_t> coords);

// Cov(f, P_t f) with e^{-t} = sqrt(1 - eta^2).
double gaussian_noise_stability(const HermiteExpansion& f, double eta);

struct NormEstimate {
  double value = 0.0;
  // |value - value at doubled quad_order|.
  double refinement_delta = 0.0;
};

// (int |f|^r dmu)^{1/r}. The last coordinate is integrated exactly between
// the real roots of the restricted polynomial (r = 1) or adaptively between
// them (other r); the remaining coordinates use nested adaptive Gauss-Kronrod
// with quad_order initial panels on [-10, 10]. r = 2 is read off the
// coefficients.
NormEstimate lr_norm_gauss(const HermiteExpansion& f, double r, int quad_order);
NormEstimate l1_norm_gauss(const HermiteExpansion& f, int quad_order);
// Same integral without the doubled-order refinement pass.
double lr_norm_gauss_value(const HermiteExpansion& f, double r, int quad_order);

inline int default_quad_order(int degree) { return 2 * degree + 1; }

// E g(Z) by the tensor Gauss-Hermite rule of the given order.
double tensor_expectation(const std::function<double(std::span<const double>)>& g, int n,
                          int order);
// max |f| over the tensor Gauss-Hermite nodes of the given order.
double sup_on_tensor_grid(const HermiteExpansion& f, int order);

// One-dimensional coordinate law: the standard Gaussian, or
// mu_p(dx) = e^{-|x|^p} dx / Z_p.
class LineMeasure {
 public:
  static LineMeasure gaussian();
  static LineMeasure exponential_power(double p);

  bool is_gaussian() const { return gaussian_; }
  double exponent() const { return exponent_; }
  double normalizer() const { return z_; }
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;
  // The a with sf(a) = tail, by bisection.
  double upper_quantile(double tail) const;

 private:
  LineMeasure(bool gaussian, double exponent, double z);

  bool gaussian_;
  double exponent_;
  double z_;
};

// (-inf, a_1] x ... x (-inf, a_n] under a product of identical line laws.
struct HalfspaceBox {
  std::vector<double> thresholds;
  LineMeasure measure = LineMeasure::gaussian();
};

double box_measure(const HalfspaceBox& box);
double box_indicator(const HalfspaceBox& box, std::span<const double> x);
// (prod_{j != i} F(a_j)) * density(a_i); zero when a_i is infinite.
double geometric_influence_halfspace(const HalfspaceBox& box, int i);
// prod_i Phi_2(a_i, a_i; sqrt(1 - eta^2)) - prod_i Phi(a_i)^2.
double gaussian_noise_stability_box(const HalfspaceBox& box, double eta);

// Covariance of f(W), f(sqrt(1 - eta^2) W + eta W') over seeded samples.
McEstimate gaussian_noise_stability_mc(const std::function<double(std::span<const double>)>& f,
                                       int n, double eta, std::size_t samples,
                                       std::uint64_t seed);

struct KmsResult {
  double threshold = 0.0;
  double influence = 0.0;
  double scaled_ratio = 0.0;
};

// The box (-inf, a_n]^n of mu_p-measure 1/2: threshold a_n, per-coordinate
// geometric influence and n * influence / (log n)^{1 - 1/p}.
KmsResult kms_example(int n, double p_exp);

}  // namespace nstab
