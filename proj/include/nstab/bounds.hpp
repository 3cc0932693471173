#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nstab/boolean.hpp"
#include "nstab/gauss.hpp"
#include "nstab/groups.hpp"

namespace nstab {

enum class TheoremId {
  kT1_2,
  kT1_4,
  kT1_6,
  kC1_5,
  kT1_7,
  kC1_8,
  kT3_2,
  kT4_1,
  kT4_2,
  kT4_3,
  kC5_1,
  kC5_2,
  kC5_3,
  kL6_3Improved,
  kL6_5,
};

// "T1.6", "C1.5", "L6.3-improved", ...; throws InvalidParameter otherwise.
TheoremId parse_theorem_id(const std::string& text);
std::string theorem_name(TheoremId id);

// Whether grid values are times t or noise levels eta.
enum class Clock { kTime, kNoise };

struct BoundSpec {
  TheoremId theorem = TheoremId::kT1_6;
  double r = 1.0;
  // Log-Sobolev constant; defaults to the model's closed form or optimizer.
  std::optional<double> rho;
  // Spectral gap; defaults to the model's computed gap.
  std::optional<double> lambda;
  // Convexity modulus for the Gaussian statements.
  double c = 1.0;
  // Constant used for the printed rhs where the statement leaves it free.
  double constant = 7.0;
  // Exponent constant c_2 / C_2 of the free-constant noise statements.
  double c2 = 0.25;
  Clock clock = Clock::kTime;
};

// Theorems with pinned constants are asserted; free-constant ones report the
// smallest constant that makes every instance hold.
bool is_pinned(TheoremId id);
bool has_free_constant(TheoremId id);
// Corollaries audited verbatim against their theorem form.
bool is_verbatim_audit(TheoremId id);

// ---- evaluators -----------------------------------------------------------

// r (1 - e^{-rho t}) / (2 (1 + (1 - r) e^{-rho t})).
double alpha(double t, double r, double rho);
// alpha with rho = 2c, the exponent of the improved Gaussian bound:
// r tanh(ct) / (r tanh(ct) + 2 - r).
double alpha_improved(double t, double r, double c);
// sum of squared per-direction norms.
double s_r(std::span<const double> profile);
// pq sum_i ||D_i f||_1^2.
double w_of_f(const CubeFunction& f);

double rhs_T16(const CubeFunction& f, double t);
double rhs_T16(double sum_sq_l1, double l2norm, double t);
double rhs_T17(std::span<const double> profile_l1, double l2norm, double t);
double rhs_T32(std::span<const double> profile_r, double l2norm, double t, double r, double rho,
               double c);
double rhs_T43(std::span<const double> profile_r, double l2norm, double t, double r, double rho);
// 7 W^{(1 - e^{-rho t})/2} ||f||_2^{1 + e^{-rho t}}.
double rhs_T41(double w, double l2norm, double t, double rho);
// 7 W^{eps/4} ||f||_2^{2 - eps/2}, the 2-homogeneous extension.
double rhs_T42(double w, double l2norm, double eps);

struct CorollaryRhs {
  double verbatim = 0.0;
  double theorem_form = 0.0;
};

// 7 X^{eta/4} ||f||^{(3/2) eta}; theorem form is T1.6 at e^{-s} = sqrt(1 - eta).
CorollaryRhs rhs_C15(double sum_sq_l1, double l2norm, double eta);
// 4 (1 - eta^2)^{1/4} X^{eta^2/4} mu(A)^{(3/2) eta^2}; theorem form is T1.7 at
// e^{-s} = (1 - eta^2)^{1/4} with ||1_A||_2^2 = mu(A).
CorollaryRhs rhs_C18(double sum_sq_geo_influence, double measure, double eta);

// Free-constant forms evaluated with constant 1.
double rhs_T12_unit(double sum_sq_l1, double eta, double c2);
double rhs_T14_unit(double sum_sq_l1, double l2norm, double eta, double c2);
double rhs_C51(std::span<const double> profile_r, double l2norm, double t, double r, int n);
double rhs_C52_unit(std::span<const double> profile_r, double l2norm, double t, double r,
                    double rho, int n);
double rhs_C53_unit(std::span<const double> profile_r, double l2norm, double t, double r,
                    double rho, double lambda);
double rhs_improved(std::span<const double> profile_r, double grad_l2, double t, double r,
                    double c);
double rhs_L65(std::span<const double> profile_l1, std::span<const double> profile_l2, double t,
               double rho, double lambda, double constant);

// 2 (1 - e^{-t}) >= 1 - e^{-2t}.
bool exponent_comparison_holds(double t);

// ---- sweep engine ---------------------------------------------------------

struct CubeInstance {
  std::string id;
  CubeFunction f;
};
struct CayleyInstance {
  std::string id;
  TableFunction f;
};
struct HermiteInstance {
  std::string id;
  HermiteExpansion f;
};
struct BoxInstance {
  std::string id;
  HalfspaceBox box;
};

struct CubeFamily {
  std::vector<CubeInstance> members;
};
struct CayleyFamily {
  std::shared_ptr<const CayleySystem> system;
  // n of S_n for C5.2; 0 otherwise.
  int symmetric_n = 0;
  std::vector<CayleyInstance> members;
};
struct GaussianFamily {
  std::vector<HermiteInstance> members;
  // 0 selects 2 * degree + 1.
  int quad_order = 0;
};
struct BoxFamily {
  std::vector<BoxInstance> members;
};

using Family = std::variant<CubeFamily, CayleyFamily, GaussianFamily, BoxFamily>;

struct InstanceRecord {
  std::string function_id;
  double t = 0.0;
  double eta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<double> ratio;
  bool vacuous = false;
  bool asserted = false;
  bool passed = true;
  // lhs / (rhs at constant 1) for free-constant statements.
  std::optional<double> empirical_constant;
  // Verbatim corollary audit: theorem-form rhs and ratio.
  std::optional<double> theorem_rhs;
  std::optional<double> theorem_ratio;
  bool verbatim_violation = false;
};

struct BoundSummary {
  std::size_t instance_count = 0;
  std::size_t vacuous_count = 0;
  std::size_t asserted_count = 0;
  std::size_t failure_count = 0;
  std::size_t verbatim_violations = 0;
  std::optional<double> max_ratio;
  std::string argmax_function;
  double argmax_t = 0.0;
  std::optional<double> max_theorem_ratio;
  std::optional<double> min_empirical_constant;
  // Constants the sweep resolved from the model (rho, lambda).
  std::optional<double> rho_used;
  std::optional<double> lambda_used;
};

struct BoundReport {
  BoundSpec spec;
  std::string model;
  double tolerance = 0.0;
  std::vector<InstanceRecord> instances;
  BoundSummary summary;

  bool passed() const { return summary.failure_count == 0; }
};

// Ratios of asserted statements must stay below 1 + tolerance.
inline constexpr double kDiscreteRatioTol = 1e-9;
inline constexpr double kGaussianRatioTol = 1e-6;

// Sweeps every (member, grid point). Throws InvalidParameter on an empty
// family or grid, Unsupported when the statement does not apply to the model.
BoundReport verify(const BoundSpec& spec, const Family& family, std::span<const double> grid);

// 16 log-spaced points in [0.05, 5].
std::vector<double> default_time_grid();
std::vector<double> log_grid(double a, double b, int count);
std::vector<double> linear_grid(double a, double b, int count);

}  // namespace nstab
