#include "cgkdm/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cgkdm/errors.hpp"
#include "cgkdm/special.hpp"

namespace cgkdm {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;
}

Bandwidth::Bandwidth(double s) : sigma(s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw InvalidInput("bandwidth must be a positive finite real");
  }
}

double gauss_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    Bandwidth b) {
  if (x.size() != y.size()) {
    throw DimMismatch("kernel arguments have different dimensions");
  }
  const double d2 = (x - y).squaredNorm();
  return std::exp(-d2 / (2.0 * b.sigma * b.sigma));
}

double kappa(Bandwidth b) {
  const double s = b.sigma;
  return kSqrt2Pi * s * (2.0 * normal_cdf(1.0 / s) - 1.0) -
         2.0 * s * s * (1.0 - std::exp(-1.0 / (2.0 * s * s)));
}

double lambda_fn(double x, Bandwidth b) {
  if (x < 0.0 || x > 1.0) throw InvalidInput("lambda argument must be in [0,1]");
  const double s = b.sigma;
  return kSqrt2Pi * s * (normal_cdf(x / s) + normal_cdf((1.0 - x) / s) - 1.0);
}

double lambda_power_integral(Bandwidth b, int p, double tol) {
  if (p < 1) throw InvalidInput("lambda power must be >= 1");
  // lambda is symmetric about 1/2: integrate [0, 1/2] and double.
  const double half = integrate_adaptive(
      [&](double u) { return std::pow(lambda_fn(u, b), p); }, 0.0, 0.5,
      0.5 * tol);
  return 2.0 * half;
}

NormalizerTable normalizer(Bandwidth b, int d, double quadrature_tol) {
  if (d < 2) {
    throw InvalidDims(
        "normalizer needs d >= 2 (d = 1 degenerates to M = Pi)");
  }
  const double kd = kappa(Bandwidth(b.sigma / std::sqrt(static_cast<double>(d))));
  const double k1 = kappa(b);
  const double lam_d = lambda_power_integral(b, d, quadrature_tol);
  const double inv = kd + std::pow(k1, d) - 2.0 * lam_d;
  if (!(inv > 0.0)) {
    throw NonPositiveNormalizer(
        "computed C^{-1} = " + std::to_string(inv) +
        " <= 0; quadrature tolerance too loose for sigma=" +
        std::to_string(b.sigma) + ", d=" + std::to_string(d));
  }
  return NormalizerTable{b.sigma, d, 1.0 / inv, quadrature_tol};
}

double gamma_sq(const DiscreteDistribution& p, const DiscreteDistribution& q,
                Bandwidth b) {
  if (p.dim() != q.dim()) {
    throw DimMismatch("distributions live in different dimensions");
  }
  const double two_s2 = 2.0 * b.sigma * b.sigma;
  auto cross = [&](const DiscreteDistribution& a,
                   const DiscreteDistribution& c) {
    double total = 0.0;
    for (int i = 0; i < a.size(); ++i) {
      double row = 0.0;
      for (int j = 0; j < c.size(); ++j) {
        const double d2 = (a.atoms.row(i) - c.atoms.row(j)).squaredNorm();
        row += c.weights(j) * std::exp(-d2 / two_s2);
      }
      total += a.weights(i) * row;
    }
    return total;
  };
  const double value = cross(p, p) - 2.0 * cross(p, q) + cross(q, q);
  // Cancellation can leave a tiny negative residue.
  return value < 0.0 ? 0.0 : value;
}

}  // namespace cgkdm
