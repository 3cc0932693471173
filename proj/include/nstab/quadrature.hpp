#pragma once

#include <functional>
#include <vector>

namespace nstab {

// Nodes and weights integrating against the standard Gaussian measure:
// sum_j w_j f(x_j) = E f(Z) exactly for polynomials of degree <= 2 order - 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
GaussHermiteRule gauss_hermite_rule(int order);

// Adaptive Gauss-Kronrod (15-point) on [a, b]; infinite limits allowed.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, double* error_estimate = nullptr);

double normal_pdf(double x);
double normal_cdf(double x);
// P(Z > x) without cancellation for large x.
double normal_sf(double x);

// P(X <= h, Y <= k) for standard normals with correlation r in [-1, 1],
// by 1-d quadrature in the angle theta = arcsin(correlation).
double bivariate_normal_cdf(double h, double k, double r);

}  // namespace nstab
