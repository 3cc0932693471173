#include "nstab/quadrature.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nstab/error.hpp"

namespace nstab {

GaussHermiteRule gauss_hermite_rule(int order) {
  if (order < 1) throw InvalidParameter("quadrature order must be >= 1");
  if (order > 200) throw SizeLimit("quadrature order above 200");
  const Eigen::Index m = order;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 1; k < m; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw NumericError("Golub-Welsch eigensolve failed");
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  double total = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    rule.nodes[static_cast<std::size_t>(j)] = solver.eigenvalues()(j);
    const double v = solver.eigenvectors()(0, j);
    rule.weights[static_cast<std::size_t>(j)] = v * v;
    total += v * v;
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

// Bounds the work when tol is below what rounding allows.
constexpr unsigned kMaxDepth = 20;

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 double* error_estimate) {
  if (a == b) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, kMaxDepth, tol, &err);
  if (!std::isfinite(value)) throw NumericError("quadrature produced a non-finite value");
  if (error_estimate) *error_estimate = err;
  return value;
}

double normal_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double bivariate_normal_cdf(double h, double k, double r) {
  if (std::isnan(h) || std::isnan(k) || !(r >= -1.0 && r <= 1.0)) {
    throw InvalidParameter("bivariate normal needs correlation in [-1,1]");
  }
  if (h == -std::numeric_limits<double>::infinity() || k == -std::numeric_limits<double>::infinity()) return 0.0;
  if (h == std::numeric_limits<double>::infinity()) return normal_cdf(k);
  if (k == std::numeric_limits<double>::infinity()) return normal_cdf(h);
  if (r == 1.0) return normal_cdf(std::min(h, k));
  if (r == -1.0) return std::max(0.0, normal_cdf(h) - normal_cdf(-k));
  const double top = std::asin(r);
  // (h^2 - 2hk sin + k^2) / (2 cos^2) split so nothing cancels near pi/2.
  const double d2 = (h - k) * (h - k);
  auto integrand = [h, k, d2](double theta) {
    const double c = std::cos(theta);
    const double lead = d2 == 0.0 ? 0.0 : d2 / (2.0 * c * c);
    return std::exp(-lead - h * k / (1.0 + std::sin(theta)));
  };
  const double extra = integrate(integrand, 0.0, top, 1e-14) / (2.0 * std::numbers::pi);
  return std::clamp(normal_cdf(h) * normal_cdf(k) + extra, 0.0, 1.0);
}

}  // namespace nstab
