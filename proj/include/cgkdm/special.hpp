#pragma once

#include <functional>
#include <span>

namespace cgkdm {

// Standard normal CDF via erfc; absolute accuracy ~1e-15.
double normal_cdf(double x);

// Regularized lower/upper incomplete gamma functions P(a, x), Q(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Quantile of Gamma(shape, scale): smallest x with P(shape, x/scale) >= p.
// Bracketing plus bisection/Newton refinement to ~1e-10 relative.
double gamma_quantile(double p, double shape, double scale);

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
// Throws QuadratureFailure when the recursion limit is hit before the
// tolerance is met.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth = 48);

struct SampleMoments {
  double mean;
  double variance;  // unbiased
  double skewness;
};

SampleMoments sample_moments(std::span<const double> xs);

}  // namespace cgkdm
