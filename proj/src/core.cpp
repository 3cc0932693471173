#include "nstab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nstab/error.hpp"

namespace nstab {
namespace {

void validate_weights(std::span<const double> weights) {
  if (weights.empty()) throw InvalidParameter("space must have at least one state");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw InvalidParameter("state weights must be strictly positive and finite");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kExactTol) {
    throw InvalidParameter("state weights must sum to 1, got " + std::to_string(total));
  }
}

}  // namespace

SpacePtr FiniteProductSpace::from_weights(std::vector<double> weights) {
  validate_weights(weights);
  auto space = std::shared_ptr<FiniteProductSpace>(new FiniteProductSpace());
  space->weights_ = std::move(weights);
  return space;
}

SpacePtr FiniteProductSpace::uniform(std::size_t size) {
  if (size == 0) throw InvalidParameter("space must have at least one state");
  return from_weights(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

SpacePtr FiniteProductSpace::product(std::vector<Factor> factors) {
  if (factors.empty()) throw InvalidParameter("product space needs at least one factor");
  std::size_t total = 1;
  std::vector<std::size_t> strides;
  strides.reserve(factors.size());
  for (const auto& factor : factors) {
    if (factor.cardinality == 0 || factor.weights.size() != factor.cardinality) {
      throw InvalidParameter("factor weights must match factor cardinality");
    }
    validate_weights(factor.weights);
    strides.push_back(total);
    total *= factor.cardinality;
  }

  std::vector<double> weights(total, 1.0);
  for (std::size_t x = 0; x < total; ++x) {
    for (std::size_t k = 0; k < factors.size(); ++k) {
      weights[x] *= factors[k].weights[(x / strides[k]) % factors[k].cardinality];
    }
  }
  // Renormalize away accumulated rounding so the sum invariant holds tightly.
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
  validate_weights(weights);

  auto space = std::shared_ptr<FiniteProductSpace>(new FiniteProductSpace());
  space->weights_ = std::move(weights);
  space->factors_ = std::move(factors);
  space->strides_ = std::move(strides);
  return space;
}

bool FiniteProductSpace::equivalent(const FiniteProductSpace& other) const {
  if (this == &other) return true;
  if (size() != other.size() || factors_.size() != other.factors_.size()) return false;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (factors_[k].cardinality != other.factors_[k].cardinality) return false;
  }
  for (std::size_t x = 0; x < size(); ++x) {
    if (std::abs(weights_[x] - other.weights_[x]) > kExactTol) return false;
  }
  return true;
}

TableFunction::TableFunction(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw InvalidParameter("table function needs a space");
  if (values_.size() != space_->size()) {
    throw InvalidParameter("table length " + std::to_string(values_.size()) +
                           " does not match state count " +
                           std::to_string(space_->size()));
  }
}

TableFunction TableFunction::constant(SpacePtr space, double c) {
  const std::size_t n = space->size();
  return TableFunction(std::move(space), std::vector<double>(n, c));
}

TableFunction& TableFunction::operator+=(const TableFunction& other) {
  require_same_space(*this, other);
  for (std::size_t x = 0; x < values_.size(); ++x) values_[x] += other.values_[x];
  return *this;
}

TableFunction& TableFunction::operator-=(const TableFunction& other) {
  require_same_space(*this, other);
  for (std::size_t x = 0; x < values_.size(); ++x) values_[x] -= other.values_[x];
  return *this;
}

TableFunction& TableFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

TableFunction operator+(TableFunction a, const TableFunction& b) { return a += b; }
TableFunction operator-(TableFunction a, const TableFunction& b) { return a -= b; }
TableFunction operator*(double s, TableFunction a) { return a *= s; }

void require_same_space(const TableFunction& f, const TableFunction& g) {
  if (!f.space().equivalent(g.space())) {
    throw InvalidParameter("functions live on different spaces");
  }
}

double mean(const TableFunction& f) {
  const auto& space = f.space();
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) acc += f[x] * space.weight(x);
  return acc;
}

double inner_product(const TableFunction& f, const TableFunction& g) {
  require_same_space(f, g);
  const auto& space = f.space();
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) acc += f[x] * g[x] * space.weight(x);
  return acc;
}

TableFunction centered(const TableFunction& f) {
  const double m = mean(f);
  TableFunction out = f;
  for (double& v : out.mutable_values()) v -= m;
  return out;
}

TableFunction abs(const TableFunction& f) {
  TableFunction out = f;
  for (double& v : out.mutable_values()) v = std::abs(v);
  return out;
}

double lp_norm(const TableFunction& f, double r) {
  if (std::isnan(r) || r < 1.0) {
    throw InvalidParameter("L^r norm needs r >= 1");
  }
  if (std::isinf(r)) {
    double best = 0.0;
    for (double v : f.values()) best = std::max(best, std::abs(v));
    return best;
  }
  const auto& space = f.space();
  if (r == 1.0) {
    double acc = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) acc += std::abs(f[x]) * space.weight(x);
    return acc;
  }
  if (r == 2.0) {
    double acc = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) acc += f[x] * f[x] * space.weight(x);
    return std::sqrt(acc);
  }
  // Scale by the max to keep |f|^r in range for large r.
  double scale = 0.0;
  for (double v : f.values()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    acc += std::pow(std::abs(f[x]) / scale, r) * space.weight(x);
  }
  return scale * std::pow(acc, 1.0 / r);
}

double variance(const TableFunction& f) {
  const double m = mean(f);
  const auto& space = f.space();
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double d = f[x] - m;
    acc += d * d * space.weight(x);
  }
  return acc;
}

double entropy(const TableFunction& f) {
  const auto& space = f.space();
  double m = 0.0;
  double flogf = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double v = f[x];
    if (v < 0.0) throw DomainError("entropy needs a nonnegative function");
    m += v * space.weight(x);
    if (v > 0.0) flogf += v * std::log(v) * space.weight(x);
  }
  const double ent = flogf - (m > 0.0 ? m * std::log(m) : 0.0);
  return std::max(ent, 0.0);
}

TableFunction conditional_expectation(const TableFunction& f,
                                      std::span<const std::size_t> coords) {
  const auto& space = f.space();
  if (!space.has_factors()) {
    throw InvalidParameter("conditional expectation needs a product space");
  }
  std::vector<bool> keep(space.factor_count(), false);
  for (std::size_t k : coords) {
    if (k >= space.factor_count()) {
      throw InvalidParameter("coordinate " + std::to_string(k) + " out of range");
    }
    keep[k] = true;
  }

  // Integrate out one discarded factor at a time; each pass replaces f by its
  // average over that factor's fiber.
  std::vector<double> values(f.values().begin(), f.values().end());
  std::vector<double> next(values.size());
  for (std::size_t k = 0; k < space.factor_count(); ++k) {
    if (keep[k]) continue;
    const auto& factor = space.factor(k);
    const std::size_t stride = space.stride(k);
    for (std::size_t x = 0; x < values.size(); ++x) {
      const std::size_t base = x - space.coordinate(x, k) * stride;
      double acc = 0.0;
      for (std::size_t v = 0; v < factor.cardinality; ++v) {
        acc += factor.weights[v] * values[base + v * stride];
      }
      next[x] = acc;
    }
    values.swap(next);
  }
  return TableFunction(f.space_ptr(), std::move(values));
}

McEstimate pooled_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidParameter("covariance needs two equally long nonempty sample columns");
  }
  const double n = static_cast<double>(a.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] + b[k];
  const double m = sum / (2.0 * n);
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double prod = (a[k] - m) * (b[k] - m);
    s1 += prod;
    s2 += prod * prod;
  }
  McEstimate out;
  out.estimate = s1 / n;
  if (a.size() > 1) {
    const double var = std::max(0.0, (s2 - n * out.estimate * out.estimate) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

}  // namespace nstab
