#include "nstab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nstab/error.hpp"

namespace nstab {
namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const TableFunction& f) {
  return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}

TableFunction from_vector(const SpacePtr& space, const Eigen::VectorXd& v) {
  return TableFunction(space, std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd weights_vector(const FiniteProductSpace& space) {
  Eigen::VectorXd w(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) w[x] = space.weight(x);
  return w;
}

double weighted_sq_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  return (v.array().square() * w.array()).sum();
}

void validate_generator(const FiniteProductSpace& space, const Eigen::MatrixXd& L,
                        const std::vector<Direction>& directions) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (L.rows() != n || L.cols() != n) {
    throw InvalidParameter("generator matrix does not match the state count");
  }
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  const double tol = kExactTol * scale * 10.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    if (std::abs(L.row(x).sum()) > tol) {
      throw InvalidParameter("generator does not annihilate constants");
    }
    for (Eigen::Index y = 0; y < n; ++y) {
      if (x != y && L(x, y) < -tol) {
        throw InvalidParameter("generator has a negative off-diagonal rate");
      }
      const double lhs = space.weight(x) * L(x, y);
      const double rhs = space.weight(y) * L(y, x);
      if (std::abs(lhs - rhs) > tol) {
        throw InvalidParameter("generator is not reversible with respect to the measure");
      }
    }
  }
  for (const auto& d : directions) {
    if (d.op.rows() != n || d.op.cols() != n) {
      throw InvalidParameter("direction '" + d.name + "' has the wrong shape");
    }
  }
  if (directions.empty()) return;

  const Eigen::VectorXd w = weights_vector(space);
  std::mt19937_64 rng(0xd1c4e7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd f(n);
    for (Eigen::Index x = 0; x < n; ++x) f[x] = normal(rng);
    const double energy = -(f.array() * (L * f).array() * w.array()).sum();
    double decomposed = 0.0;
    for (const auto& d : directions) decomposed += weighted_sq_norm(d.op * f, w);
    if (std::abs(energy - decomposed) > 1e-9 * std::max(1.0, std::abs(energy))) {
      throw InvalidParameter("directions do not decompose the Dirichlet form");
    }
  }
}

}  // namespace

Generator::Generator(SpacePtr space, Eigen::MatrixXd matrix, std::vector<Direction> directions,
                     double kappa, std::optional<double> spectral_gap,
                     std::optional<double> log_sobolev)
    : space_(std::move(space)),
      matrix_(std::move(matrix)),
      directions_(std::move(directions)),
      kappa_(kappa),
      gap_(spectral_gap),
      rho_(log_sobolev) {
  if (!space_) throw InvalidParameter("generator needs a space");
  validate_generator(*space_, matrix_, directions_);
}

TableFunction Generator::apply(const TableFunction& f) const {
  if (!f.space().equivalent(*space_)) throw InvalidParameter("function not on the generator's space");
  return from_vector(space_, matrix_ * as_vector(f));
}

TableFunction Generator::apply_direction(std::size_t i, const TableFunction& f) const {
  if (!f.space().equivalent(*space_)) throw InvalidParameter("function not on the generator's space");
  return from_vector(space_, directions_.at(i).op * as_vector(f));
}

SemigroupEvolution::SemigroupEvolution(Generator generator)
    : generator_(std::make_shared<const Generator>(std::move(generator))) {
  decompose();
}

SemigroupEvolution::SemigroupEvolution(std::shared_ptr<const Generator> generator)
    : generator_(std::move(generator)) {
  if (!generator_) throw InvalidParameter("null generator");
  decompose();
}

void SemigroupEvolution::decompose() {
  const auto& space = generator_->space();
  const auto n = static_cast<Eigen::Index>(space.size());
  sqrt_weights_ = weights_vector(space).cwiseSqrt();
  const Eigen::VectorXd inv_sqrt = sqrt_weights_.cwiseInverse();

  Eigen::MatrixXd sym = sqrt_weights_.asDiagonal() * generator_->matrix() * inv_sqrt.asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed");

  // Eigen sorts ascending; reverse so the zero mode comes first.
  eigenvalues_ = solver.eigenvalues().reverse();
  const Eigen::MatrixXd u = solver.eigenvectors().rowwise().reverse();
  basis_ = inv_sqrt.asDiagonal() * u;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (eigenvalues_[k] > kZeroEigenvalue) {
      throw InvalidParameter("generator has a positive eigenvalue");
    }
    eigenvalues_[k] = std::min(eigenvalues_[k], 0.0);
  }
}

Eigen::VectorXd SemigroupEvolution::coefficients(const TableFunction& f) const {
  if (!f.space().equivalent(generator_->space())) {
    throw InvalidParameter("function not on the semigroup's space");
  }
  // <f, phi_k>_mu with phi_k = D^{-1/2} u_k reduces to u_k^T D^{1/2} f.
  const Eigen::VectorXd scaled = sqrt_weights_.cwiseProduct(as_vector(f));
  return (sqrt_weights_.asDiagonal() * basis_).transpose() * scaled;
}

TableFunction SemigroupEvolution::apply(double t, const TableFunction& f) const {
  if (!(t >= 0.0)) throw InvalidParameter("semigroup time must be >= 0");
  if (t == 0.0) return f;
  Eigen::VectorXd c = coefficients(f);
  c.array() *= (t * eigenvalues_.array()).exp();
  return from_vector(generator_->space_ptr(), basis_ * c);
}

Generator build_projection_generator(SpacePtr space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  Eigen::MatrixXd L(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) L(x, y) = space->weight(y);
    L(x, x) -= 1.0;
  }
  SparseOp op = L.sparseView();
  std::vector<Direction> dirs{{"projection", std::move(op)}};
  std::optional<double> rho;
  if (space->size() == 2) rho = two_point_log_sobolev(space->weight(0));
  return Generator(std::move(space), std::move(L), std::move(dirs), 0.0, 1.0, rho);
}

Generator build_product_projection_generator(SpacePtr space) {
  if (!space->has_factors()) throw InvalidParameter("product projection needs a product space");
  const std::size_t n = space->size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Direction> dirs;
  bool two_point = true;
  double rho = kInfinity;
  for (std::size_t k = 0; k < space->factor_count(); ++k) {
    const auto& factor = space->factor(k);
    const std::size_t stride = space->stride(k);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(n * factor.cardinality);
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t base = x - space->coordinate(x, k) * stride;
      for (std::size_t v = 0; v < factor.cardinality; ++v) {
        const std::size_t y = base + v * stride;
        double entry = factor.weights[v];
        if (y == x) entry -= 1.0;
        if (entry != 0.0) trips.emplace_back(x, y, entry);
      }
    }
    SparseOp op(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    op.setFromTriplets(trips.begin(), trips.end());
    L += Eigen::MatrixXd(op);
    dirs.push_back({"L" + std::to_string(k + 1), std::move(op)});
    if (factor.cardinality == 2) {
      rho = std::min(rho, two_point_log_sobolev(factor.weights[0]));
    } else {
      two_point = false;
    }
  }
  std::optional<double> cached_rho;
  if (two_point) cached_rho = rho;
  return Generator(std::move(space), std::move(L), std::move(dirs), 0.0, 1.0, cached_rho);
}

double two_point_log_sobolev(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("two-point mass must lie in (0,1)");
  const double q = 1.0 - p;
  if (std::abs(p - q) < 1e-9) return 1.0;
  return 2.0 * (p - q) / (std::log(p) - std::log(q));
}

TableFunction semigroup_apply(const SemigroupEvolution& ev, double t, const TableFunction& f) {
  return ev.apply(t, f);
}

double dirichlet_form(const Generator& g, const TableFunction& f, const TableFunction& h) {
  require_same_space(f, h);
  const TableFunction lh = g.apply(h);
  return -inner_product(f, lh);
}

namespace {

double gap_from_eigenvalues(const Eigen::VectorXd& descending) {
  Eigen::Index zeros = 0;
  for (Eigen::Index k = 0; k < descending.size(); ++k) {
    if (std::abs(descending[k]) < kZeroEigenvalue) ++zeros;
  }
  if (zeros != 1) {
    throw DegenerateModel("generator is not ergodic: " + std::to_string(zeros) +
                          " zero eigenvalues");
  }
  if (descending.size() < 2) throw DegenerateModel("single-state space has no spectral gap");
  return -descending[1];
}

}  // namespace

double spectral_gap(const SemigroupEvolution& ev) { return gap_from_eigenvalues(ev.eigenvalues()); }

double spectral_gap(const Generator& g) {
  const auto& space = g.space();
  Eigen::VectorXd s(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) s[x] = std::sqrt(space.weight(x));
  Eigen::MatrixXd sym = s.asDiagonal() * g.matrix() * s.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  return gap_from_eigenvalues(solver.eigenvalues().reverse());
}

namespace {

struct Quotient {
  double value = kInfinity;
  double energy = 0.0;
  double ent = 0.0;
};

// 2 E(f,f) / Ent(f^2) for the table f.
Quotient ls_quotient(const Eigen::MatrixXd& L, const Eigen::VectorXd& w, const Eigen::VectorXd& f) {
  Quotient q;
  q.energy = -(f.array() * (L * f).array() * w.array()).sum();
  const Eigen::ArrayXd sq = f.array().square();
  const double m = (sq * w.array()).sum();
  if (m <= 0.0) return q;
  double flogf = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    if (sq[x] > 0.0) flogf += w[x] * sq[x] * std::log(sq[x]);
  }
  q.ent = flogf - m * std::log(m);
  if (q.ent > 1e-14 * m) q.value = 2.0 * q.energy / q.ent;
  return q;
}

// Gradient of the quotient in the L^2(mu) metric, projected onto the
// orthogonal complement of constants.
Eigen::VectorXd ls_gradient(const Eigen::MatrixXd& L, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& f, const Quotient& q) {
  const Eigen::VectorXd grad_energy = -2.0 * (L * f);
  const double m = (f.array().square() * w.array()).sum();
  Eigen::VectorXd grad_ent(f.size());
  for (Eigen::Index x = 0; x < f.size(); ++x) {
    const double sq = f[x] * f[x];
    grad_ent[x] = sq > 0.0 ? 2.0 * f[x] * (std::log(sq) - std::log(m)) : 0.0;
  }
  Eigen::VectorXd grad = (2.0 * grad_energy * q.ent - 2.0 * q.energy * grad_ent) / (q.ent * q.ent);
  grad.array() -= grad.dot(w);
  return grad;
}

}  // namespace

double log_sobolev_constant(const Generator& g, const LogSobolevOptions& options) {
  const auto& space = g.space();
  const auto n = static_cast<Eigen::Index>(space.size());
  if (n < 2) throw DegenerateModel("single-state space has no log-Sobolev constant");
  const Eigen::VectorXd w = weights_vector(space);
  const Eigen::MatrixXd& L = g.matrix();

  double best = kInfinity;
  for (int restart = 0; restart < options.restarts; ++restart) {
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(restart + 1));
    std::normal_distribution<double> normal;
    // Spread restarts over scales: near-constant f probe the spectral-gap
    // limit, large g probe functions concentrated on few states.
    const double scale = std::pow(10.0, -1.0 + 2.5 * restart / std::max(1, options.restarts - 1));
    Eigen::VectorXd gvec(n);
    for (Eigen::Index x = 0; x < n; ++x) gvec[x] = normal(rng);
    gvec.array() -= gvec.dot(w);
    const double norm = std::sqrt(weighted_sq_norm(gvec, w));
    if (norm == 0.0) continue;
    gvec *= scale / norm;

    Eigen::VectorXd f = Eigen::VectorXd::Ones(n) + gvec;
    Quotient q = ls_quotient(L, w, f);
    if (!std::isfinite(q.value)) continue;
    double step = 0.1;
    for (int it = 0; it < options.max_iterations; ++it) {
      const Eigen::VectorXd grad = ls_gradient(L, w, f, q);
      const double gnorm2 = weighted_sq_norm(grad, w);
      if (gnorm2 == 0.0) break;
      // Armijo backtracking along the projected gradient.
      Quotient next;
      Eigen::VectorXd candidate;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        candidate = f - step * grad;
        next = ls_quotient(L, w, candidate);
        if (std::isfinite(next.value) && next.value <= q.value - 1e-4 * step * gnorm2) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      const double change = std::abs(q.value - next.value) / std::max(q.value, 1e-300);
      f = std::move(candidate);
      // Keep the mean of f at 1 (f = 1 + g parameterization); the quotient is
      // scale invariant so this does not change its value.
      const double fm = f.dot(w);
      if (std::abs(fm) > 1e-12) f /= fm;
      q = ls_quotient(L, w, f);
      step *= 2.0;
      if (change < options.tol) break;
    }
    // Restarts that collapse onto |f| constant carry no information.
    if (std::isfinite(q.value) && q.ent > 1e-12) best = std::min(best, q.value);
  }
  if (!std::isfinite(best)) throw NumericError("log-Sobolev optimizer found no admissible function");
  return best;
}

double hypercontractivity_check(const SemigroupEvolution& ev, const TableFunction& f, double t,
                                double q_exp, double rho) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
  if (!(q_exp > 1.0)) throw InvalidParameter("target exponent must exceed 1");
  if (!(rho > 0.0)) throw InvalidParameter("log-Sobolev constant must be positive");
  const double p = 1.0 + (q_exp - 1.0) * std::exp(-2.0 * rho * t);
  const double denom = lp_norm(f, p);
  if (denom == 0.0) throw UndefinedRatio("hypercontractivity ratio undefined for f = 0");
  return lp_norm(ev.apply(t, f), q_exp) / denom;
}

double commutation_check(const SemigroupEvolution& ev, const TableFunction& f, double t) {
  const Generator& g = ev.generator();
  const TableFunction pt_f = ev.apply(t, f);
  const double growth = std::exp(g.kappa() * t);
  double worst = t == 0.0 ? 0.0 : -kInfinity;
  for (std::size_t i = 0; i < g.directions().size(); ++i) {
    const TableFunction lhs = g.apply_direction(i, pt_f);
    const TableFunction rhs = ev.apply(t, abs(g.apply_direction(i, f)));
    for (std::size_t x = 0; x < f.size(); ++x) {
      worst = std::max(worst, std::abs(lhs[x]) - growth * rhs[x]);
    }
  }
  if (g.directions().empty()) return 0.0;
  return t == 0.0 ? std::max(0.0, worst) : worst;
}

InequalitySides eq12_check(const SemigroupEvolution& ev, const TableFunction& f, double lambda,
                           double horizon) {
  if (!(horizon > 0.0)) throw InvalidParameter("horizon must be > 0");
  if (!(lambda > 0.0)) throw InvalidParameter("spectral gap must be > 0");
  const TableFunction c = centered(f);
  const double norm2 = inner_product(c, c);
  const TableFunction pc = ev.apply(horizon, c);
  InequalitySides out;
  out.lhs = variance(f);
  out.rhs = (norm2 - inner_product(pc, pc)) / (1.0 - std::exp(-lambda * horizon));
  return out;
}

InequalitySides variance_decomposition_check(const SemigroupEvolution& ev, const TableFunction& f,
                                             double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be >= 0");
  const Generator& g = ev.generator();
  const Eigen::VectorXd w = weights_vector(g.space());
  const Eigen::VectorXd c = ev.coefficients(f);
  const Eigen::VectorXd& lam = ev.eigenvalues();

  // Active non-constant modes of f, damped to time t.
  std::vector<Eigen::Index> active;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (lam[k] < -kZeroEigenvalue && c[k] != 0.0) active.push_back(k);
  }
  const auto m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd modes(ev.eigenbasis().rows(), m);
  Eigen::VectorXd damped(m);
  Eigen::VectorXd rates(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    modes.col(j) = ev.eigenbasis().col(active[j]);
    rates[j] = lam[active[j]];
    damped[j] = c[active[j]] * std::exp(rates[j] * t);
  }

  // sum_i <Gamma_i phi_k, Gamma_i phi_l>_mu, then the time integral of each
  // exponential pair e^{(lambda_k + lambda_l) s} over [t, inf).
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (const auto& d : g.directions()) {
    const Eigen::MatrixXd image = d.op * modes;
    gram.noalias() += image.transpose() * w.asDiagonal() * image;
  }
  double rhs = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      rhs += damped[k] * damped[l] * gram(k, l) / (-(rates[k] + rates[l]));
    }
  }
  InequalitySides out;
  out.lhs = variance(ev.apply(t, f));
  out.rhs = 2.0 * rhs;
  return out;
}

}  // namespace nstab
