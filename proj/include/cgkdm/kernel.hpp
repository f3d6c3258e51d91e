#pragma once

#include <Eigen/Dense>

#include "cgkdm/copula.hpp"

namespace cgkdm {

// Gaussian kernel scale on the copula cube; strictly positive.
struct Bandwidth {
  double sigma;
  explicit Bandwidth(double s);
};

// k_sigma(x, y) = exp(-|x - y|^2 / (2 sigma^2)), in (0, 1].
double gauss_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    Bandwidth b);

// kappa(sigma) = integral of the 1-d kernel over the unit square:
// sqrt(2 pi) sigma [2 Phi(1/sigma) - 1] - 2 sigma^2 [1 - exp(-1/(2 sigma^2))].
double kappa(Bandwidth b);

// lambda(x, sigma) = integral_0^1 exp(-(x-v)^2 / 2 sigma^2) dv,
// = sqrt(2 pi) sigma {Phi(x/sigma) + Phi((1-x)/sigma) - 1}; symmetric at 1/2.
double lambda_fn(double x, Bandwidth b);

// Normalizing constant C_{sigma,d} with
// C^{-1} = kappa(sigma/sqrt(d)) + kappa(sigma)^d - 2 int_0^1 lambda^d(u) du.
// The integral uses adaptive quadrature on [0, 1/2], doubled by symmetry.
struct NormalizerTable {
  double sigma;
  int d;
  double c_sigma_d;        // the constant itself (positive)
  double quadrature_tol;
  double inv() const { return 1.0 / c_sigma_d; }
};

NormalizerTable normalizer(Bandwidth b, int d, double quadrature_tol = 1e-10);

// int_0^1 lambda(u, sigma)^p du; exposed for the null-moment formulas.
double lambda_power_integral(Bandwidth b, int p, double tol = 1e-10);

// Squared kernel distance between two discrete distributions by full
// pairwise expansion. Tiny negative values from cancellation are clamped
// to zero. Oracle path: cost is quadratic in atom counts.
double gamma_sq(const DiscreteDistribution& p, const DiscreteDistribution& q,
                Bandwidth b);

}  // namespace cgkdm
