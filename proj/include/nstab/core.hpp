#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace nstab {

// Absolute tolerance for identities that are exact on finite spaces.
inline constexpr double kExactTol = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// One coordinate of a product space: value indices 0..cardinality-1 with
// their marginal probabilities.
struct Factor {
  std::size_t cardinality = 0;
  std::vector<double> weights;
};

// A finite probability space. When built from factors, states are enumerated
// in mixed radix with factor 0 varying fastest, so state index
// x = sum_k coord_k(x) * stride_k. For {-1,1}^n this makes bit k of the state
// index the k-th coordinate.
class FiniteProductSpace {
 public:
  static std::shared_ptr<const FiniteProductSpace> from_weights(
      std::vector<double> weights);
  static std::shared_ptr<const FiniteProductSpace> uniform(std::size_t size);
  static std::shared_ptr<const FiniteProductSpace> product(
      std::vector<Factor> factors);

  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t state) const { return weights_[state]; }
  std::span<const double> weights() const { return weights_; }

  bool has_factors() const { return !factors_.empty(); }
  std::size_t factor_count() const { return factors_.size(); }
  const Factor& factor(std::size_t k) const { return factors_.at(k); }
  std::size_t stride(std::size_t k) const { return strides_.at(k); }
  std::size_t coordinate(std::size_t state, std::size_t k) const {
    return (state / strides_[k]) % factors_[k].cardinality;
  }

  // Structural equality: same size, same factor layout, weights equal within
  // kExactTol.
  bool equivalent(const FiniteProductSpace& other) const;

 private:
  FiniteProductSpace() = default;

  std::vector<double> weights_;
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
};

using SpacePtr = std::shared_ptr<const FiniteProductSpace>;

// A real function on a FiniteProductSpace stored as a dense table indexed by
// state.
class TableFunction {
 public:
  TableFunction(SpacePtr space, std::vector<double> values);

  static TableFunction constant(SpacePtr space, double c);

  const FiniteProductSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t state) const { return values_[state]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  TableFunction& operator+=(const TableFunction& other);
  TableFunction& operator-=(const TableFunction& other);
  TableFunction& operator*=(double s);

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

TableFunction operator+(TableFunction a, const TableFunction& b);
TableFunction operator-(TableFunction a, const TableFunction& b);
TableFunction operator*(double s, TableFunction a);

// Throws InvalidParameter unless both functions live on equivalent spaces.
void require_same_space(const TableFunction& f, const TableFunction& g);

double mean(const TableFunction& f);
double inner_product(const TableFunction& f, const TableFunction& g);
TableFunction centered(const TableFunction& f);
TableFunction abs(const TableFunction& f);

// (sum_x |f(x)|^r mu(x))^(1/r); r = kInfinity gives the max over states.
double lp_norm(const TableFunction& f, double r);
double variance(const TableFunction& f);
// int f log f - (int f) log(int f) with 0 log 0 = 0; f must be >= 0.
double entropy(const TableFunction& f);

// Averages f over the factors NOT in `coords`; the result depends only on
// the coordinates in `coords`.
TableFunction conditional_expectation(const TableFunction& f,
                                      std::span<const std::size_t> coords);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Covariance of paired samples (a_k, b_k) from an exchangeable pair, centered
// at the pooled mean of both columns; std_error is sd(products) / sqrt(N).
McEstimate pooled_covariance(std::span<const double> a, std::span<const double> b);

}  // namespace nstab
