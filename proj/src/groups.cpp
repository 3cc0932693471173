#include "nstab/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "nstab/error.hpp"

namespace nstab {
namespace {

std::size_t lehmer_rank(const std::vector<int>& perm) {
  std::size_t rank = 0;
  const std::size_t n = perm.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (perm[j] < perm[i]) ++smaller;
    }
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

// Checks S = S^{-1} and s S s^{-1} = S, with the identity at index 0.
void validate_generating_set(const CayleyModel& model) {
  const std::size_t k = model.generator_count();
  std::vector<std::uint32_t> element(k);
  for (std::size_t s = 0; s < k; ++s) element[s] = model.right_mult[s][0];
  const std::set<std::uint32_t> members(element.begin(), element.end());
  if (members.size() != k) throw InvalidParameter("generating set has repeated elements");
  for (std::size_t s = 0; s < k; ++s) {
    if (model.right_mult[model.inverse[s]][element[s]] != 0) {
      throw InvalidParameter("generating set is not closed under inverses");
    }
    for (std::size_t u = 0; u < k; ++u) {
      const std::uint32_t conj = model.right_mult[model.inverse[s]][model.right_mult[u][element[s]]];
      if (!members.contains(conj)) throw InvalidParameter("generating set is not conjugation-closed");
    }
  }
}

void check_generator_index(const CayleyModel& model, std::size_t s) {
  if (s >= model.generator_count()) throw InvalidParameter("generator index out of range");
}

}  // namespace

std::size_t CayleyModel::find_generator(const std::string& generator) const {
  const auto it = std::find(generator_names.begin(), generator_names.end(), generator);
  if (it == generator_names.end()) throw InvalidParameter("unknown generator " + generator);
  return static_cast<std::size_t>(it - generator_names.begin());
}

std::vector<int> permutation_at(int n, std::size_t rank) {
  if (n < 1) throw InvalidParameter("permutation needs n >= 1");
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::size_t> digits(pool.size());
  for (std::size_t i = pool.size(); i-- > 0;) {
    const std::size_t base = pool.size() - i;
    digits[i] = rank % base;
    rank /= base;
  }
  if (rank != 0) throw InvalidParameter("permutation rank out of range");
  std::vector<int> perm;
  for (std::size_t d : digits) {
    perm.push_back(pool[d]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return perm;
}

CayleyModel symmetric_group_model(int n) {
  if (n < 2) throw InvalidParameter("symmetric group needs n >= 2");
  if (n > 6) throw SizeLimit("symmetric group supports n <= 6");
  std::vector<std::vector<int>> elements;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    elements.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  CayleyModel model;
  model.name = "symmetric:n=" + std::to_string(n);
  model.space = FiniteProductSpace::uniform(elements.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      model.generator_names.push_back("(" + std::to_string(i + 1) + " " + std::to_string(j + 1) + ")");
      std::vector<std::uint32_t> table(elements.size());
      for (std::size_t g = 0; g < elements.size(); ++g) {
        // (g tau)(k) = g(tau(k)) swaps the entries at positions i and j.
        std::vector<int> h = elements[g];
        std::swap(h[static_cast<std::size_t>(i)], h[static_cast<std::size_t>(j)]);
        table[g] = static_cast<std::uint32_t>(lehmer_rank(h));
      }
      model.right_mult.push_back(std::move(table));
      model.inverse.push_back(model.inverse.size());
      model.one_sided.push_back(model.one_sided.size());
    }
  }
  validate_generating_set(model);
  return model;
}

CayleyModel torus_model(int m, int n) {
  if (m < 2 || n < 1) throw InvalidParameter("torus needs m >= 2 and n >= 1");
  double states = std::pow(static_cast<double>(m), n);
  if (states > static_cast<double>(kMaxCayleyStates)) {
    throw SizeLimit("torus supports m^n <= " + std::to_string(kMaxCayleyStates));
  }
  const auto um = static_cast<std::size_t>(m);
  std::vector<Factor> factors(static_cast<std::size_t>(n),
                              Factor{um, std::vector<double>(um, 1.0 / static_cast<double>(m))});
  CayleyModel model;
  model.name = "torus:m=" + std::to_string(m) + ",n=" + std::to_string(n);
  model.space = FiniteProductSpace::product(std::move(factors));
  const std::size_t size = model.space->size();
  for (int i = 0; i < n; ++i) {
    const std::size_t stride = model.space->stride(static_cast<std::size_t>(i));
    for (int sign : {1, -1}) {
      if (sign == -1 && m == 2) break;
      std::vector<std::uint32_t> table(size);
      for (std::size_t x = 0; x < size; ++x) {
        const std::size_t digit = model.space->coordinate(x, static_cast<std::size_t>(i));
        const std::size_t moved = (digit + (sign == 1 ? 1 : um - 1)) % um;
        table[x] = static_cast<std::uint32_t>(x - digit * stride + moved * stride);
      }
      if (sign == 1) model.one_sided.push_back(model.right_mult.size());
      model.generator_names.push_back((sign == 1 ? "+e" : "-e") + std::to_string(i + 1));
      model.right_mult.push_back(std::move(table));
    }
  }
  for (std::size_t s = 0; s < model.generator_count(); ++s) {
    model.inverse.push_back(m == 2 ? s : (s % 2 == 0 ? s + 1 : s - 1));
  }
  validate_generating_set(model);
  return model;
}

Generator cayley_generator(const CayleyModel& model) {
  const std::size_t size = model.order();
  if (size > kMaxDenseStates) {
    throw SizeLimit("dense generator supports at most " + std::to_string(kMaxDenseStates) + " states");
  }
  const auto k = static_cast<double>(model.generator_count());
  const auto dim = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd L = -Eigen::MatrixXd::Identity(dim, dim);
  std::vector<Direction> dirs;
  const double scale = 1.0 / std::sqrt(2.0 * k);
  for (std::size_t s = 0; s < model.generator_count(); ++s) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * size);
    for (std::size_t g = 0; g < size; ++g) {
      const auto row = static_cast<Eigen::Index>(g);
      const auto col = static_cast<Eigen::Index>(model.right_mult[s][g]);
      L(row, col) += 1.0 / k;
      trips.emplace_back(row, col, scale);
      trips.emplace_back(row, row, -scale);
    }
    SparseOp op(dim, dim);
    op.setFromTriplets(trips.begin(), trips.end());
    dirs.push_back({"D" + model.generator_names[s], std::move(op)});
  }
  return Generator(model.space, std::move(L), std::move(dirs), 0.0);
}

CayleySystem build_symmetric_group(int n) {
  CayleySystem sys{symmetric_group_model(n), nullptr};
  sys.generator = std::make_shared<const Generator>(cayley_generator(sys.model));
  return sys;
}

CayleySystem build_torus(int m, int n) {
  CayleySystem sys{torus_model(m, n), nullptr};
  if (sys.model.order() <= kMaxDenseStates) {
    sys.generator = std::make_shared<const Generator>(cayley_generator(sys.model));
  }
  return sys;
}

double symmetric_group_spectral_gap(int n) {
  if (n < 2) throw InvalidParameter("symmetric group needs n >= 2");
  return 2.0 / (n - 1);
}

double torus_spectral_gap(int m, int n) {
  if (m < 2 || n < 1) throw InvalidParameter("torus needs m >= 2 and n >= 1");
  // One coordinate at frequency 1 and the rest at 0.
  if (m == 2) return 2.0 / n;
  return (1.0 - std::cos(2.0 * std::numbers::pi / m)) / n;
}

TableFunction cayley_derivative(const CayleyModel& model, const TableFunction& f, std::size_t s) {
  check_generator_index(model, s);
  if (!f.space().equivalent(*model.space)) throw InvalidParameter("function is not on this group");
  std::vector<double> out(f.size());
  for (std::size_t g = 0; g < f.size(); ++g) out[g] = f[model.right_mult[s][g]] - f[g];
  return TableFunction(f.space_ptr(), std::move(out));
}

double cayley_derivative_norm(const CayleyModel& model, const TableFunction& f, std::size_t s,
                              double r) {
  return lp_norm(cayley_derivative(model, f, s), r);
}

bool is_indicator(const TableFunction& f) {
  return std::all_of(f.values().begin(), f.values().end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

double cayley_influence(const CayleyModel& model, const TableFunction& indicator, std::size_t s) {
  check_generator_index(model, s);
  if (!is_indicator(indicator)) throw DomainError("influence of a set needs a 0/1 indicator");
  if (!indicator.space().equivalent(*model.space)) throw InvalidParameter("function is not on this group");
  double acc = 0.0;
  for (std::size_t g = 0; g < indicator.size(); ++g) {
    if (indicator[g] == 1.0 && indicator[model.right_mult[s][g]] == 0.0) acc += indicator.space().weight(g);
  }
  return acc;
}

double total_influence(const CayleyModel& model, const TableFunction& indicator) {
  if (!is_indicator(indicator)) throw DomainError("total influence needs a 0/1 function");
  double acc = 0.0;
  for (std::size_t s : model.one_sided) acc += cayley_derivative_norm(model, indicator, s, 1.0);
  return acc;
}

}  // namespace nstab
