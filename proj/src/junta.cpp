#include "nstab/junta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nstab/error.hpp"
#include "nstab/markov.hpp"

namespace nstab {
namespace {

void check_args(double t, double eta) {
  if (!(t > 0.0) || std::isinf(t)) throw InvalidParameter("junta extraction needs t > 0");
  if (!(eta > 0.0)) throw InvalidParameter("junta threshold eta must be > 0");
}

// The two values of f when it takes exactly two, smaller first.
std::optional<std::pair<double, double>> two_values(std::span<const double> values) {
  std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() != 2) return std::nullopt;
  return std::make_pair(*distinct.begin(), *distinct.rbegin());
}

TableSemigroup cayley_semigroup(const CayleySystem& system) {
  if (!system.generator) throw SizeLimit("model too large for a dense generator");
  auto ev = std::make_shared<const SemigroupEvolution>(system.generator);
  return [ev](double t, const TableFunction& f) { return ev->apply(t, f); };
}

}  // namespace

double coordinate_influence(const TableFunction& f, std::size_t k) {
  const auto& space = f.space();
  if (!space.has_factors()) throw InvalidParameter("coordinate influence needs a product space");
  if (k >= space.factor_count()) throw InvalidParameter("coordinate out of range");
  const std::size_t stride = space.stride(k);
  const std::size_t card = space.factor(k).cardinality;
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const std::size_t digit = space.coordinate(x, k);
    const std::size_t y = x - digit * stride + ((digit + 1) % card) * stride;
    acc += std::abs(f[y] - f[x]) * space.weight(x);
  }
  return acc;
}

std::vector<double> coordinate_influences(const TableFunction& f) {
  std::vector<double> out;
  for (std::size_t k = 0; k < f.space().factor_count(); ++k) out.push_back(coordinate_influence(f, k));
  return out;
}

JuntaResult junta_extract(const TableFunction& f, const TableSemigroup& semigroup, double t,
                          double eta, Rounding rounding) {
  check_args(t, eta);
  JuntaResult out;
  out.t = t;
  out.eta_threshold = eta;
  const auto infl = coordinate_influences(f);
  for (std::size_t k = 0; k < infl.size(); ++k) {
    if (infl[k] >= eta) out.coordinates.push_back(k);
  }
  const TableFunction pf = semigroup(t, f);
  TableFunction g = conditional_expectation(pf, out.coordinates);
  out.l2_tail = lp_norm(pf - g, 2.0);
  if (rounding == Rounding::kAuto) {
    if (const auto vals = two_values(f.values())) {
      const double mid = 0.5 * (vals->first + vals->second);
      for (double& v : g.mutable_values()) v = v <= mid ? vals->first : vals->second;
      out.rounded = true;
    }
  }
  out.l1_error = lp_norm(f - g, 1.0);
  out.table = std::move(g);
  return out;
}

JuntaResult junta_extract(const CubeFunction& f, double t, double eta, Rounding rounding) {
  return junta_extract(
      f.to_table(), [p = f.p()](double s, const TableFunction& h) {
        return cube_semigroup(CubeFunction::from_table(h, p), s).to_table();
      },
      t, eta, rounding);
}

JuntaResult junta_extract(const CayleySystem& system, const TableFunction& f, double t, double eta,
                          Rounding rounding) {
  return junta_extract(f, cayley_semigroup(system), t, eta, rounding);
}

std::vector<double> gaussian_influences(const HermiteExpansion& f, int quad_order) {
  const int order = quad_order > 0 ? quad_order : default_quad_order(f.degree());
  std::vector<double> out;
  for (int k = 0; k < f.n(); ++k) out.push_back(lr_norm_gauss_value(partial_derivative(f, k), 1.0, order));
  return out;
}

JuntaResult junta_extract(const HermiteExpansion& f, double t, double eta, double c, int quad_order) {
  check_args(t, eta);
  return junta_extract(f, gaussian_influences(f, quad_order), t, eta, c, quad_order, true);
}

JuntaResult junta_extract(const HermiteExpansion& f, std::span<const double> influences, double t,
                          double eta, double c, int quad_order, bool measure_l1) {
  check_args(t, eta);
  if (!(c > 0.0)) throw InvalidParameter("c must be positive");
  if (influences.size() != static_cast<std::size_t>(f.n())) {
    throw InvalidParameter("one influence per coordinate is required");
  }
  const int order = quad_order > 0 ? quad_order : default_quad_order(f.degree());
  JuntaResult out;
  out.t = t;
  out.eta_threshold = eta;
  for (std::size_t k = 0; k < influences.size(); ++k) {
    if (influences[k] >= eta) out.coordinates.push_back(k);
  }
  const HermiteExpansion pf = ou_apply(f, t);
  const HermiteExpansion g = restrict_to_coordinates(pf, out.coordinates);
  out.l2_tail = (pf + (-1.0) * g).l2_norm();
  out.l1_error = measure_l1 ? lr_norm_gauss_value(f + (-1.0) * g, 1.0, order)
                            : std::numeric_limits<double>::quiet_NaN();
  const double e = std::exp(-2.0 * c * t);
  out.lemma_bound = std::pow(c, -0.5) * std::pow(eta, (1.0 - e) / (2.0 * (1.0 + e)));
  out.lemma_holds = out.l2_tail <= *out.lemma_bound + kLemmaSlack;
  out.expansion = g;
  return out;
}

HermiteExpansion normalize_sup(const HermiteExpansion& f, int order) {
  const double sup = sup_on_tensor_grid(f, order);
  if (!(sup > 0.0)) throw DomainError("cannot normalize the zero function");
  return (1.0 / sup) * f;
}

FriedgutResult friedgut_check(const TableFunction& f, const TableSemigroup& semigroup,
                              double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParameter("epsilon must lie in (0,1)");
  FriedgutResult out;
  out.epsilon = epsilon;
  for (double v : coordinate_influences(f)) out.total_influence += v;
  for (double t : {0.1, 0.2, 0.4, 0.8}) {
    for (int k = 1; k <= 8; ++k) {
      JuntaResult r = junta_extract(f, semigroup, t, std::ldexp(1.0, -k));
      if (r.l1_error > epsilon) continue;
      const bool better = !out.found || r.coordinates.size() < out.junta_size ||
                          (r.coordinates.size() == out.junta_size && r.l1_error < out.achieved_error);
      if (better) {
        out.found = true;
        out.junta_size = r.coordinates.size();
        out.achieved_error = r.l1_error;
        out.best = std::move(r);
      }
    }
  }
  return out;
}

FriedgutResult friedgut_check(const CubeFunction& f, double epsilon) {
  return friedgut_check(
      f.to_table(), [p = f.p()](double s, const TableFunction& h) {
        return cube_semigroup(CubeFunction::from_table(h, p), s).to_table();
      },
      epsilon);
}

FriedgutResult friedgut_check(const CayleySystem& system, const TableFunction& f, double epsilon) {
  return friedgut_check(f, cayley_semigroup(system), epsilon);
}

}  // namespace nstab
