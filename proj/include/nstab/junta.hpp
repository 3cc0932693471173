#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nstab/boolean.hpp"
#include "nstab/core.hpp"
#include "nstab/gauss.hpp"
#include "nstab/groups.hpp"

namespace nstab {

enum class Rounding {
  // Round to the nearer of f's two values (ties to the smaller) when f takes
  // exactly two values; keep E_S P_t f otherwise.
  kAuto,
  kNone,
};

struct JuntaResult {
  // Retained coordinates, 0-based and increasing.
  std::vector<std::size_t> coordinates;
  // Extracted function on finite product spaces.
  std::optional<TableFunction> table;
  // Extracted expansion on Gaussian space.
  std::optional<HermiteExpansion> expansion;
  bool rounded = false;
  // ||f - g||_1.
  double l1_error = 0.0;
  // ||P_t f - E_S P_t f||_2.
  double l2_tail = 0.0;
  double t = 0.0;
  double eta_threshold = 0.0;
  // Gaussian only: c^{-1/2} eta^{(1 - e^{-2ct}) / (2 (1 + e^{-2ct}))}.
  std::optional<double> lemma_bound;
  // l2_tail <= lemma_bound + kLemmaSlack; meaningful for sup-normalized f.
  std::optional<bool> lemma_holds;
};

inline constexpr double kLemmaSlack = 1e-8;

using TableSemigroup = std::function<TableFunction(double, const TableFunction&)>;

// ||f(x + e_k) - f(x)||_1 with coordinate k advanced cyclically; on the cube
// this is the flip tau_k.
double coordinate_influence(const TableFunction& f, std::size_t k);
std::vector<double> coordinate_influences(const TableFunction& f);

// S = {k : ||D_k f||_1 >= eta}, g_0 = E_S P_t f, then rounding.
JuntaResult junta_extract(const TableFunction& f, const TableSemigroup& semigroup, double t,
                          double eta, Rounding rounding = Rounding::kAuto);
JuntaResult junta_extract(const CubeFunction& f, double t, double eta,
                          Rounding rounding = Rounding::kAuto);
JuntaResult junta_extract(const CayleySystem& system, const TableFunction& f, double t, double eta,
                          Rounding rounding = Rounding::kAuto);
// Gaussian version with S from ||d_k f||_1; quad_order 0 selects 2D + 1.
JuntaResult junta_extract(const HermiteExpansion& f, double t, double eta, double c = 1.0,
                          int quad_order = 0);
// Same with precomputed influences ||d_k f||_1. With measure_l1 false the L1
// error is left as NaN and only the L2 tail is computed.
JuntaResult junta_extract(const HermiteExpansion& f, std::span<const double> influences, double t,
                          double eta, double c = 1.0, int quad_order = 0, bool measure_l1 = true);

// ||d_k f||_1 for every coordinate k.
std::vector<double> gaussian_influences(const HermiteExpansion& f, int quad_order = 0);

// Rescales f so that its maximum modulus over the tensor Gauss-Hermite nodes
// of the given order is 1.
HermiteExpansion normalize_sup(const HermiteExpansion& f, int order);

struct FriedgutResult {
  bool found = false;
  std::size_t junta_size = 0;
  double achieved_error = 0.0;
  double total_influence = 0.0;
  double epsilon = 0.0;
  std::optional<JuntaResult> best;
};

// Smallest |S| over t in {0.1, 0.2, 0.4, 0.8}, eta in {2^-1, ..., 2^-8} with
// ||f - g||_1 <= epsilon.
FriedgutResult friedgut_check(const TableFunction& f, const TableSemigroup& semigroup,
                              double epsilon);
FriedgutResult friedgut_check(const CubeFunction& f, double epsilon);
FriedgutResult friedgut_check(const CayleySystem& system, const TableFunction& f, double epsilon);

}  // namespace nstab
