#include "nstab/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <type_traits>

#include "nstab/error.hpp"
#include "nstab/markov.hpp"

namespace nstab {
namespace {

void check_time(double t) {
  if (!(t >= 0.0) || std::isinf(t)) throw InvalidParameter("time must be finite and >= 0");
}

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidParameter("noise eta must lie in (0,1)");
}

void check_r(double r) {
  if (!(r >= 1.0 && r <= 2.0)) throw InvalidParameter("r must lie in [1,2]");
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || std::isinf(v)) throw InvalidParameter(std::string(name) + " must be positive");
}

// x^a * y^b with the convention 0^0 = 1 for homogeneous factors.
double power_product(double x, double a, double y, double b) {
  return std::pow(x, a) * std::pow(y, b);
}

// (t, eta) pairs are linked by e^{-t} = 1 - eta on discrete models and
// e^{-t} = sqrt(1 - eta^2) on Gaussian space.
struct ClockMap {
  bool gaussian = false;

  double eta_of(double t) const {
    if (gaussian) return std::sqrt(-std::expm1(-2.0 * t));
    return -std::expm1(-t);
  }
  double t_of(double eta) const {
    if (gaussian) return -0.5 * std::log1p(-eta * eta);
    return -std::log1p(-eta);
  }
};

struct GridPoint {
  double t;
  double eta;
};

bool is_noise_stated(TheoremId id) {
  switch (id) {
    case TheoremId::kT1_2:
    case TheoremId::kT1_4:
    case TheoremId::kC1_5:
    case TheoremId::kC1_8:
    case TheoremId::kT4_2:
      return true;
    default:
      return false;
  }
}

std::vector<GridPoint> resolve_grid(const BoundSpec& spec, std::span<const double> grid, ClockMap clock) {
  if (grid.empty()) throw InvalidParameter("grid is empty");
  std::vector<GridPoint> out;
  for (double v : grid) {
    GridPoint g{};
    if (spec.clock == Clock::kNoise) {
      check_eta(v);
      g = {clock.t_of(v), v};
    } else {
      check_time(v);
      g = {v, clock.eta_of(v)};
      if (is_noise_stated(spec.theorem) && !(g.eta > 0.0 && g.eta < 1.0)) {
        throw InvalidParameter("noise-stated bounds need grid times with eta in (0,1)");
      }
    }
    out.push_back(g);
  }
  return out;
}

class Sweep {
 public:
  Sweep(const BoundSpec& spec, double tol) : spec_(spec), tol_(tol) {}

  // lhs <= rhs check with ratio bookkeeping.
  InstanceRecord record(const std::string& id, GridPoint g, double lhs, double rhs, bool vacuous) const {
    InstanceRecord rec;
    rec.function_id = id;
    rec.t = g.t;
    rec.eta = g.eta;
    rec.lhs = lhs;
    rec.rhs = rhs;
    rec.vacuous = vacuous;
    if (rhs > 0.0) rec.ratio = lhs / rhs;
    rec.asserted = is_pinned(spec_.theorem) && !vacuous;
    rec.passed = holds(lhs, rhs);
    return rec;
  }

  // Free-constant statements: rhs = constant * unit.
  InstanceRecord record_free(const std::string& id, GridPoint g, double lhs, double unit, bool vacuous) const {
    InstanceRecord rec = record(id, g, lhs, spec_.constant * unit, vacuous);
    rec.asserted = false;
    if (unit > 0.0) rec.empirical_constant = lhs / unit;
    return rec;
  }

  // Verbatim corollary: asserted on the theorem form, violations recorded.
  InstanceRecord record_audit(const std::string& id, GridPoint g, double lhs, CorollaryRhs rhs,
                              bool vacuous) const {
    InstanceRecord rec = record(id, g, lhs, rhs.verbatim, vacuous);
    rec.verbatim_violation = !holds(lhs, rhs.verbatim);
    rec.theorem_rhs = rhs.theorem_form;
    if (rhs.theorem_form > 0.0) rec.theorem_ratio = lhs / rhs.theorem_form;
    rec.passed = holds(lhs, rhs.theorem_form);
    return rec;
  }

  bool holds(double lhs, double rhs) const {
    if (rhs > 0.0) return lhs <= rhs * (1.0 + tol_);
    return lhs <= 1e-12;
  }

 private:
  const BoundSpec& spec_;
  double tol_;
};

[[noreturn]] void unsupported(TheoremId id, const std::string& model) {
  throw Unsupported(theorem_name(id) + " does not apply to " + model);
}

// |E_i f - f| is q |D_i f| where x_i = -1 and p |D_i f| where x_i = +1.
double projection_direction_norm(const CubeFunction& f, int i, double r) {
  const std::size_t bit = std::size_t{1} << i;
  const double p = f.p();
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    const double d = std::abs(f[x ^ bit] - f[x]) * ((x & bit) ? p : 1.0 - p);
    acc += std::pow(d, r) * f.weight(x);
  }
  return std::pow(acc, 1.0 / r);
}

double cube_l2(const CubeFunction& f) {
  double acc = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) acc += f[x] * f[x] * f.weight(x);
  return std::sqrt(acc);
}

double cube_variance(const CubeFunction& f) {
  double m = 0.0;
  double m2 = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    m += f[x] * f.weight(x);
    m2 += f[x] * f[x] * f.weight(x);
  }
  return std::max(0.0, m2 - m * m);
}

// Var(P_t f) on the cube.
class CubeVariance {
 public:
  explicit CubeVariance(const CubeFunction& f) : f_(f) {
    if (f.uniform()) walsh_ = walsh_transform(f);
  }
  double operator()(double t) const {
    if (!walsh_) return cube_variance(cube_semigroup(f_, t));
    double acc = 0.0;
    const auto& c = walsh_->coefficients;
    for (std::size_t s = 1; s < c.size(); ++s) acc += std::exp(-2.0 * t * std::popcount(s)) * c[s] * c[s];
    return acc;
  }

 private:
  const CubeFunction& f_;
  std::optional<WalshExpansion> walsh_;
};

void sweep_cube(const BoundSpec& spec, const CubeFamily& family, std::span<const double> grid,
                BoundReport& report) {
  const ClockMap clock{false};
  const auto points = resolve_grid(spec, grid, clock);
  const Sweep sweep(spec, kDiscreteRatioTol);
  const TheoremId id = spec.theorem;
  switch (id) {
    case TheoremId::kT1_2:
    case TheoremId::kT1_6:
    case TheoremId::kC1_5:
    case TheoremId::kT4_1:
    case TheoremId::kT4_2:
    case TheoremId::kT4_3:
      break;
    default:
      unsupported(id, "the cube");
  }
  const bool uniform_only = id == TheoremId::kT1_2 || id == TheoremId::kT1_6 ||
                            id == TheoremId::kC1_5 || id == TheoremId::kT4_2;
  for (const auto& member : family.members) {
    const CubeFunction& f = member.f;
    if (uniform_only && !f.uniform()) unsupported(id, "a biased cube");
    const double l2 = cube_l2(f);
    const CubeVariance var(f);
    const double rho = spec.rho.value_or(two_point_log_sobolev(f.p()));
    report.summary.rho_used = rho;
    const auto profile_l1 = influence_profile(f, 1.0);
    const double x = s_r(profile_l1);
    const double w = w_of_f(f);
    std::vector<double> profile_lr;
    if (id == TheoremId::kT4_3) {
      for (int i = 0; i < f.n(); ++i) profile_lr.push_back(projection_direction_norm(f, i, spec.r));
    }
    for (const GridPoint g : points) {
      switch (id) {
        case TheoremId::kT1_6:
          report.instances.push_back(sweep.record(member.id, g, var(g.t), rhs_T16(x, l2, g.t), x > l2 * l2));
          break;
        case TheoremId::kC1_5:
          report.instances.push_back(
              sweep.record_audit(member.id, g, noise_stability(f, g.eta), rhs_C15(x, l2, g.eta), x > l2 * l2));
          break;
        case TheoremId::kT1_2:
          report.instances.push_back(sweep.record_free(member.id, g, noise_stability(f, g.eta),
                                                       rhs_T12_unit(x, g.eta, spec.c2), x > l2 * l2));
          break;
        case TheoremId::kT4_1:
          report.instances.push_back(sweep.record(member.id, g, var(g.t), rhs_T41(w, l2, g.t, rho), w > l2 * l2));
          break;
        case TheoremId::kT4_2:
          report.instances.push_back(
              sweep.record(member.id, g, noise_stability(f, g.eta), rhs_T42(w, l2, g.eta), w > l2 * l2));
          break;
        case TheoremId::kT4_3: {
          const double s = s_r(profile_lr);
          report.instances.push_back(
              sweep.record(member.id, g, var(g.t), rhs_T43(profile_lr, l2, g.t, spec.r, rho), s > l2 * l2));
          break;
        }
        default:
          unsupported(id, "the cube");
      }
    }
  }
}

void sweep_cayley(const BoundSpec& spec, const CayleyFamily& family, std::span<const double> grid,
                  BoundReport& report) {
  const TheoremId id = spec.theorem;
  if (id != TheoremId::kC5_2 && id != TheoremId::kC5_3 && id != TheoremId::kL6_5) {
    unsupported(id, "a Cayley graph");
  }
  if (id == TheoremId::kC5_2 && family.symmetric_n < 2) unsupported(id, "a non-symmetric-group model");
  if (!family.system) throw InvalidParameter("Cayley family needs a model");
  if (!family.system->generator) throw SizeLimit("model too large for a dense generator");
  const CayleyModel& model = family.system->model;
  const SemigroupEvolution ev(family.system->generator);
  const double lambda = spec.lambda.value_or(spectral_gap(ev));
  double rho = 0.0;
  if (spec.rho) {
    rho = *spec.rho;
  } else if (auto cached = family.system->generator->cached_log_sobolev()) {
    rho = *cached;
  } else {
    LogSobolevOptions opts;
    opts.restarts = 8;
    rho = log_sobolev_constant(*family.system->generator, opts);
  }
  report.summary.rho_used = rho;
  report.summary.lambda_used = lambda;

  const auto points = resolve_grid(spec, grid, ClockMap{false});
  const Sweep sweep(spec, kDiscreteRatioTol);
  const Eigen::VectorXd& eig = ev.eigenvalues();
  for (const auto& member : family.members) {
    const TableFunction& f = member.f;
    const double l2 = lp_norm(f, 2.0);
    const Eigen::VectorXd a = ev.coefficients(f);
    std::vector<double> prof_r;
    std::vector<double> prof_1;
    std::vector<double> prof_2;
    for (std::size_t s = 0; s < model.generator_count(); ++s) {
      const TableFunction d = cayley_derivative(model, f, s);
      prof_r.push_back(lp_norm(d, spec.r));
      prof_1.push_back(lp_norm(d, 1.0));
      prof_2.push_back(lp_norm(d, 2.0));
    }
    for (const GridPoint g : points) {
      double lhs = 0.0;
      for (Eigen::Index k = 0; k < eig.size(); ++k) {
        if (std::abs(eig(k)) > kZeroEigenvalue) lhs += std::exp(2.0 * eig(k) * g.t) * a(k) * a(k);
      }
      switch (id) {
        case TheoremId::kC5_2:
          report.instances.push_back(sweep.record_free(
              member.id, g, lhs, rhs_C52_unit(prof_r, l2, g.t, spec.r, rho, family.symmetric_n),
              s_r(prof_r) > l2 * l2));
          break;
        case TheoremId::kC5_3:
          report.instances.push_back(sweep.record_free(
              member.id, g, lhs, rhs_C53_unit(prof_r, l2, g.t, spec.r, rho, lambda), s_r(prof_r) > l2 * l2));
          break;
        default:
          report.instances.push_back(
              sweep.record_free(member.id, g, lhs, rhs_L65(prof_1, prof_2, g.t, rho, lambda, 1.0), false));
          break;
      }
    }
  }
}

void sweep_gaussian(const BoundSpec& spec, const GaussianFamily& family, std::span<const double> grid,
                    BoundReport& report) {
  const TheoremId id = spec.theorem;
  if (id != TheoremId::kT1_4 && id != TheoremId::kT1_7 && id != TheoremId::kT3_2 &&
      id != TheoremId::kL6_3Improved) {
    unsupported(id, "Gaussian expansions");
  }
  const double rho = spec.rho.value_or(1.0);
  if (id == TheoremId::kT3_2) report.summary.rho_used = rho;
  const auto points = resolve_grid(spec, grid, ClockMap{true});
  const Sweep sweep(spec, kGaussianRatioTol);
  const double r = (id == TheoremId::kT3_2 || id == TheoremId::kL6_3Improved) ? spec.r : 1.0;
  for (const auto& member : family.members) {
    const HermiteExpansion& f = member.f;
    const int order = family.quad_order > 0 ? family.quad_order : default_quad_order(f.degree());
    const double l2 = f.l2_norm();
    const double grad_l2 = std::sqrt(dirichlet_energy(f));
    std::vector<double> profile;
    for (int i = 0; i < f.n(); ++i) profile.push_back(lr_norm_gauss_value(partial_derivative(f, i), r, order));
    const double s = s_r(profile);
    for (const GridPoint g : points) {
      const double lhs = ou_apply(f, g.t).variance();
      switch (id) {
        case TheoremId::kT1_7:
          report.instances.push_back(sweep.record(member.id, g, lhs, rhs_T17(profile, l2, g.t), s > l2 * l2));
          break;
        case TheoremId::kT3_2:
          report.instances.push_back(
              sweep.record(member.id, g, lhs, rhs_T32(profile, l2, g.t, r, rho, spec.c), s > l2 * l2));
          break;
        case TheoremId::kL6_3Improved:
          report.instances.push_back(
              sweep.record(member.id, g, lhs, rhs_improved(profile, grad_l2, g.t, r, spec.c), s > grad_l2 * grad_l2));
          break;
        default:
          report.instances.push_back(sweep.record_free(member.id, g, gaussian_noise_stability(f, g.eta),
                                                       rhs_T14_unit(s, l2, g.eta, spec.c2), s > l2 * l2));
          break;
      }
    }
  }
}

void sweep_boxes(const BoundSpec& spec, const BoxFamily& family, std::span<const double> grid,
                 BoundReport& report) {
  const TheoremId id = spec.theorem;
  if (id != TheoremId::kT1_7 && id != TheoremId::kC1_8) unsupported(id, "half-space boxes");
  const auto points = resolve_grid(spec, grid, ClockMap{true});
  const Sweep sweep(spec, kGaussianRatioTol);
  for (const auto& member : family.members) {
    const HalfspaceBox& box = member.box;
    if (!box.measure.is_gaussian()) unsupported(id, "non-Gaussian boxes");
    std::vector<double> profile;
    for (std::size_t i = 0; i < box.thresholds.size(); ++i) {
      profile.push_back(geometric_influence_halfspace(box, static_cast<int>(i)));
    }
    const double x = s_r(profile);
    const double m = box_measure(box);
    for (const GridPoint g : points) {
      if (id == TheoremId::kC1_8) {
        report.instances.push_back(
            sweep.record_audit(member.id, g, gaussian_noise_stability_box(box, g.eta), rhs_C18(x, m, g.eta), x > m));
      } else {
        // Var(P_t 1_A) = Cov(1_A, P_{2t} 1_A): correlation e^{-2t}.
        const double rho_bar = std::exp(-2.0 * g.t);
        const double lhs = g.t == 0.0 ? m * (1.0 - m)
                                      : gaussian_noise_stability_box(box, std::sqrt(1.0 - rho_bar * rho_bar));
        report.instances.push_back(sweep.record(member.id, g, lhs, rhs_T17(profile, std::sqrt(m), g.t), x > m));
      }
    }
  }
}

void summarize(BoundReport& report) {
  BoundSummary& s = report.summary;
  s.instance_count = report.instances.size();
  for (const auto& rec : report.instances) {
    if (rec.vacuous) ++s.vacuous_count;
    if (rec.asserted) ++s.asserted_count;
    if (rec.asserted && !rec.passed) ++s.failure_count;
    if (rec.verbatim_violation) ++s.verbatim_violations;
    if (rec.ratio && !rec.vacuous && (!s.max_ratio || *rec.ratio > *s.max_ratio)) {
      s.max_ratio = rec.ratio;
      s.argmax_function = rec.function_id;
      s.argmax_t = rec.t;
    }
    if (rec.theorem_ratio && !rec.vacuous && (!s.max_theorem_ratio || *rec.theorem_ratio > *s.max_theorem_ratio)) {
      s.max_theorem_ratio = rec.theorem_ratio;
    }
    if (rec.empirical_constant &&
        (!s.min_empirical_constant || *rec.empirical_constant > *s.min_empirical_constant)) {
      s.min_empirical_constant = rec.empirical_constant;
    }
  }
}

}  // namespace

TheoremId parse_theorem_id(const std::string& text) {
  static const std::map<std::string, TheoremId> names = {
      {"T1.2", TheoremId::kT1_2},   {"T1.4", TheoremId::kT1_4},
      {"T1.6", TheoremId::kT1_6},   {"C1.5", TheoremId::kC1_5},
      {"T1.7", TheoremId::kT1_7},   {"C1.8", TheoremId::kC1_8},
      {"T3.2", TheoremId::kT3_2},   {"T4.1", TheoremId::kT4_1},
      {"T4.2", TheoremId::kT4_2},   {"T4.3", TheoremId::kT4_3},
      {"C5.1", TheoremId::kC5_1},   {"C5.2", TheoremId::kC5_2},
      {"C5.3", TheoremId::kC5_3},   {"L6.3-improved", TheoremId::kL6_3Improved},
      {"L6.5", TheoremId::kL6_5},
  };
  const auto it = names.find(text);
  if (it == names.end()) throw InvalidParameter("unknown bound id '" + text + "'");
  return it->second;
}

std::string theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::kT1_2: return "T1.2";
    case TheoremId::kT1_4: return "T1.4";
    case TheoremId::kT1_6: return "T1.6";
    case TheoremId::kC1_5: return "C1.5";
    case TheoremId::kT1_7: return "T1.7";
    case TheoremId::kC1_8: return "C1.8";
    case TheoremId::kT3_2: return "T3.2";
    case TheoremId::kT4_1: return "T4.1";
    case TheoremId::kT4_2: return "T4.2";
    case TheoremId::kT4_3: return "T4.3";
    case TheoremId::kC5_1: return "C5.1";
    case TheoremId::kC5_2: return "C5.2";
    case TheoremId::kC5_3: return "C5.3";
    case TheoremId::kL6_3Improved: return "L6.3-improved";
    case TheoremId::kL6_5: return "L6.5";
  }
  return "?";
}

bool is_pinned(TheoremId id) {
  switch (id) {
    case TheoremId::kT1_6:
    case TheoremId::kC1_5:
    case TheoremId::kT1_7:
    case TheoremId::kC1_8:
    case TheoremId::kT3_2:
    case TheoremId::kT4_1:
    case TheoremId::kT4_2:
    case TheoremId::kT4_3:
    case TheoremId::kL6_3Improved:
      return true;
    default:
      return false;
  }
}

bool has_free_constant(TheoremId id) {
  switch (id) {
    case TheoremId::kT1_2:
    case TheoremId::kT1_4:
    case TheoremId::kC5_2:
    case TheoremId::kC5_3:
    case TheoremId::kL6_5:
      return true;
    default:
      return false;
  }
}

bool is_verbatim_audit(TheoremId id) { return id == TheoremId::kC1_5 || id == TheoremId::kC1_8; }

double alpha(double t, double r, double rho) {
  check_time(t);
  check_r(r);
  check_positive(rho, "rho");
  if (t == 0.0) return 0.0;
  const double e = std::exp(-rho * t);
  return r * -std::expm1(-rho * t) / (2.0 * (1.0 + (1.0 - r) * e));
}

double alpha_improved(double t, double r, double c) {
  check_time(t);
  check_r(r);
  check_positive(c, "c");
  const double q = std::tanh(c * t);
  if (q == 0.0) return 0.0;
  return r * q / (r * q + 2.0 - r);
}

double s_r(std::span<const double> profile) {
  double acc = 0.0;
  for (double v : profile) acc += v * v;
  return acc;
}

double w_of_f(const CubeFunction& f) {
  const double p = f.p();
  return p * (1.0 - p) * s_r(influence_profile(f, 1.0));
}

double rhs_T16(const CubeFunction& f, double t) {
  if (!f.uniform()) throw Unsupported("T1.6 is stated for the uniform cube");
  return rhs_T16(s_r(influence_profile(f, 1.0)), cube_l2(f), t);
}

double rhs_T16(double sum_sq_l1, double l2norm, double t) {
  check_time(t);
  const double e = std::exp(-t);
  return 7.0 * power_product(sum_sq_l1, (1.0 - e) / 2.0, l2norm, 1.0 + e);
}

double rhs_T17(std::span<const double> profile_l1, double l2norm, double t) {
  check_time(t);
  const double e = std::exp(-t);
  return 4.0 * e * power_product(s_r(profile_l1), (1.0 - e) / 2.0, l2norm, 1.0 + e);
}

double rhs_T32(std::span<const double> profile_r, double l2norm, double t, double r, double rho,
               double c) {
  check_positive(c, "c");
  const double a = alpha(t, r, rho);
  return std::max(4.0, 4.0 / c) * std::exp(-c * t) * power_product(s_r(profile_r), a, l2norm, 2.0 - 2.0 * a);
}

double rhs_T43(std::span<const double> profile_r, double l2norm, double t, double r, double rho) {
  const double a = alpha(t, r, rho);
  return 7.0 * power_product(s_r(profile_r), a, l2norm, 2.0 - 2.0 * a);
}

double rhs_T41(double w, double l2norm, double t, double rho) {
  check_time(t);
  check_positive(rho, "rho");
  const double e = std::exp(-rho * t);
  return 7.0 * power_product(w, (1.0 - e) / 2.0, l2norm, 1.0 + e);
}

double rhs_T42(double w, double l2norm, double eps) {
  check_eta(eps);
  return 7.0 * power_product(w, eps / 4.0, l2norm, 2.0 - eps / 2.0);
}

CorollaryRhs rhs_C15(double sum_sq_l1, double l2norm, double eta) {
  check_eta(eta);
  CorollaryRhs out;
  out.verbatim = 7.0 * power_product(sum_sq_l1, eta / 4.0, l2norm, 1.5 * eta);
  const double e = std::sqrt(1.0 - eta);
  out.theorem_form = 7.0 * power_product(sum_sq_l1, (1.0 - e) / 2.0, l2norm, 1.0 + e);
  return out;
}

CorollaryRhs rhs_C18(double sum_sq_geo_influence, double measure, double eta) {
  check_eta(eta);
  if (!(measure >= 0.0 && measure <= 1.0)) throw InvalidParameter("measure must lie in [0,1]");
  CorollaryRhs out;
  const double e = std::pow(1.0 - eta * eta, 0.25);
  out.verbatim = 4.0 * e * power_product(sum_sq_geo_influence, eta * eta / 4.0, measure, 1.5 * eta * eta);
  out.theorem_form = 4.0 * e * power_product(sum_sq_geo_influence, (1.0 - e) / 2.0, measure, (1.0 + e) / 2.0);
  return out;
}

double rhs_T12_unit(double sum_sq_l1, double eta, double c2) {
  check_eta(eta);
  check_positive(c2, "c2");
  return std::pow(sum_sq_l1, c2 * eta);
}

double rhs_T14_unit(double sum_sq_l1, double l2norm, double eta, double c2) {
  check_eta(eta);
  check_positive(c2, "c2");
  const double a = c2 * eta * eta;
  return power_product(sum_sq_l1, a, l2norm, 2.0 - 2.0 * a);
}

double rhs_C51(std::span<const double> profile_r, double l2norm, double t, double r, int n) {
  if (n < 2) throw InvalidParameter("sphere dimension needs n >= 2");
  const double a = alpha(t, r, n - 1.0);
  return 7.0 * power_product(s_r(profile_r), a, l2norm, 2.0 - 2.0 * a);
}

double rhs_C52_unit(std::span<const double> profile_r, double l2norm, double t, double r,
                    double rho, int n) {
  if (n < 2) throw InvalidParameter("symmetric group needs n >= 2");
  const double a = alpha(t, r, rho);
  return power_product(s_r(profile_r), a, l2norm, 2.0 - 2.0 * a) / n;
}

double rhs_C53_unit(std::span<const double> profile_r, double l2norm, double t, double r,
                    double rho, double lambda) {
  check_positive(lambda, "lambda");
  const double a = alpha(t, r, rho);
  return power_product(s_r(profile_r), a, l2norm, 2.0 - 2.0 * a) / lambda;
}

double rhs_improved(std::span<const double> profile_r, double grad_l2, double t, double r,
                    double c) {
  const double a = alpha_improved(t, r, c);
  return 4.0 / c * std::exp(-c * t) * power_product(s_r(profile_r), a, grad_l2, 2.0 * (1.0 - a));
}

double rhs_L65(std::span<const double> profile_l1, std::span<const double> profile_l2, double t,
               double rho, double lambda, double constant) {
  check_time(t);
  check_positive(rho, "rho");
  check_positive(lambda, "lambda");
  check_positive(constant, "constant");
  const double a = -std::expm1(-rho * t) / 2.0;
  return constant / lambda * power_product(s_r(profile_l1), a, s_r(profile_l2), 1.0 - a);
}

bool exponent_comparison_holds(double t) {
  check_time(t);
  return -2.0 * std::expm1(-t) >= -std::expm1(-2.0 * t);
}

BoundReport verify(const BoundSpec& spec, const Family& family, std::span<const double> grid) {
  check_r(spec.r);
  check_positive(spec.c, "c");
  check_positive(spec.constant, "constant");
  if (spec.rho) check_positive(*spec.rho, "rho");
  if (spec.lambda) check_positive(*spec.lambda, "lambda");
  if (spec.theorem == TheoremId::kC5_1) throw Unsupported("C5.1 needs the sphere model, which is not implemented");
  BoundReport report;
  report.spec = spec;
  std::visit(
      [&](const auto& fam) {
        if (fam.members.empty()) throw InvalidParameter("function family is empty");
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, CubeFamily>) {
          report.tolerance = kDiscreteRatioTol;
          sweep_cube(spec, fam, grid, report);
        } else if constexpr (std::is_same_v<T, CayleyFamily>) {
          report.tolerance = kDiscreteRatioTol;
          if (fam.system) report.model = fam.system->model.name;
          sweep_cayley(spec, fam, grid, report);
        } else if constexpr (std::is_same_v<T, GaussianFamily>) {
          report.tolerance = kGaussianRatioTol;
          sweep_gaussian(spec, fam, grid, report);
        } else {
          report.tolerance = kGaussianRatioTol;
          sweep_boxes(spec, fam, grid, report);
        }
      },
      family);
  summarize(report);
  return report;
}

std::vector<double> log_grid(double a, double b, int count) {
  if (!(a > 0.0 && b >= a) || count < 1) throw InvalidParameter("log grid needs 0 < a <= b and count >= 1");
  std::vector<double> out;
  if (count == 1) return {a};
  const double la = std::log(a);
  const double lb = std::log(b);
  for (int k = 0; k < count; ++k) out.push_back(std::exp(la + (lb - la) * k / (count - 1)));
  out.back() = b;
  return out;
}

std::vector<double> linear_grid(double a, double b, int count) {
  if (!(b >= a) || count < 1) throw InvalidParameter("linear grid needs a <= b and count >= 1");
  if (count == 1) return {a};
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(a + (b - a) * k / (count - 1));
  out.back() = b;
  return out;
}

std::vector<double> default_time_grid() { return log_grid(0.05, 5.0, 16); }

}  // namespace nstab
