#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nstab/core.hpp"

namespace nstab {

// Eigenvalues with |lambda| below this count as zero.
inline constexpr double kZeroEigenvalue = 1e-10;

using SparseOp = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// A directional operator Gamma_i acting on tables. Weights such as the 1/2 in
// the cube's D_i / 2 are folded into the matrix, so the Dirichlet form always
// decomposes as sum_i ||Gamma_i f||_2^2.
struct Direction {
  std::string name;
  SparseOp op;
};

// A reversible Markov generator on a finite space together with its
// directional decomposition.
//
// Construction validates: L 1 = 0, detailed balance mu(x) L(x,y) = mu(y) L(y,x),
// nonnegative off-diagonal entries, and E(f,f) = sum_i ||Gamma_i f||^2 on a
// few seeded random tables.
class Generator {
 public:
  Generator(SpacePtr space, Eigen::MatrixXd matrix, std::vector<Direction> directions,
            double kappa = 0.0, std::optional<double> spectral_gap = std::nullopt,
            std::optional<double> log_sobolev = std::nullopt);

  const FiniteProductSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::vector<Direction>& directions() const { return directions_; }
  double kappa() const { return kappa_; }
  std::optional<double> cached_spectral_gap() const { return gap_; }
  std::optional<double> cached_log_sobolev() const { return rho_; }

  TableFunction apply(const TableFunction& f) const;
  TableFunction apply_direction(std::size_t i, const TableFunction& f) const;

 private:
  SpacePtr space_;
  Eigen::MatrixXd matrix_;
  std::vector<Direction> directions_;
  double kappa_;
  std::optional<double> gap_;
  std::optional<double> rho_;
};

// P_t = exp(tL) through the symmetric eigendecomposition of
// D^{1/2} L D^{-1/2}, D = diag(mu).
class SemigroupEvolution {
 public:
  explicit SemigroupEvolution(Generator generator);
  explicit SemigroupEvolution(std::shared_ptr<const Generator> generator);

  const Generator& generator() const { return *generator_; }
  // Descending: eigenvalues()[0] is the zero eigenvalue of an ergodic chain.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  // Columns are eigenfunctions as tables, orthonormal in L^2(mu).
  const Eigen::MatrixXd& eigenbasis() const { return basis_; }

  // Coordinates of f in the eigenbasis.
  Eigen::VectorXd coefficients(const TableFunction& f) const;
  TableFunction apply(double t, const TableFunction& f) const;

 private:
  void decompose();

  std::shared_ptr<const Generator> generator_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd sqrt_weights_;
};

// Lf = mean(f) - f on any finite space; single direction Gamma = L.
Generator build_projection_generator(SpacePtr space);

// L = sum_k (E_k - Id) on a product space, with one direction E_k - Id per
// factor. Caches lambda = 1 and, for two-point factors, the closed-form
// log-Sobolev constant.
Generator build_product_projection_generator(SpacePtr space);

// Closed-form log-Sobolev constant of the two-point projection chain with
// masses (p, 1-p): 2(p-q)/(log p - log q), 1 at p = 1/2.
double two_point_log_sobolev(double p);

TableFunction semigroup_apply(const SemigroupEvolution& ev, double t, const TableFunction& f);

double dirichlet_form(const Generator& g, const TableFunction& f, const TableFunction& h);

// Smallest nonzero eigenvalue of -L; throws DegenerateModel when the zero
// eigenvalue is not simple.
double spectral_gap(const Generator& g);
double spectral_gap(const SemigroupEvolution& ev);

struct LogSobolevOptions {
  int restarts = 32;
  double tol = 1e-8;
  int max_iterations = 4000;
  std::uint64_t seed = 0x5eed1e55;
};

// Variational upper bound on the log-Sobolev constant: the smallest value of
// 2 E(f,f) / Ent(f^2) found by projected gradient descent over f = 1 + g,
// g orthogonal to constants, from seeded random restarts.
double log_sobolev_constant(const Generator& g, const LogSobolevOptions& options = {});

// ||P_t f||_q / ||f||_p with p = 1 + (q - 1) e^{-2 rho t}.
double hypercontractivity_check(const SemigroupEvolution& ev, const TableFunction& f,
                                double t, double q_exp, double rho);

// max_{i,x} |Gamma_i P_t f|(x) - e^{kappa t} P_t |Gamma_i f|(x).
double commutation_check(const SemigroupEvolution& ev, const TableFunction& f, double t);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Var(f) against (||f||^2 - ||P_T f||^2) / (1 - e^{-lambda T}) for centered f.
InequalitySides eq12_check(const SemigroupEvolution& ev, const TableFunction& f,
                           double lambda, double horizon);

// Var(P_t f) against 2 int_t^inf sum_i ||Gamma_i P_s f||^2 ds, the latter in
// closed form over eigenmodes.
InequalitySides variance_decomposition_check(const SemigroupEvolution& ev,
                                             const TableFunction& f, double t);

}  // namespace nstab
