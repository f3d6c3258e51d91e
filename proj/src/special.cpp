#include "cgkdm/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cgkdm/errors.hpp"

namespace cgkdm {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Lower incomplete gamma by series expansion, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw QuadratureFailure("incomplete gamma series did not converge");
}

// Upper incomplete gamma by continued fraction, valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw QuadratureFailure("incomplete gamma continued fraction did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw InvalidInput("gamma shape must be positive");
  if (x < 0.0) throw InvalidInput("incomplete gamma needs x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0) throw InvalidInput("gamma shape must be positive");
  if (x < 0.0) throw InvalidInput("incomplete gamma needs x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double gamma_quantile(double p, double shape, double scale) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("quantile level must be in (0,1)");
  if (shape <= 0.0 || scale <= 0.0) throw InvalidInput("gamma parameters must be positive");

  // Bracket the root of P(shape, x) = p in the unit-scale variable.
  double lo = 0.0;
  double hi = shape + 1.0;
  while (regularized_gamma_p(shape, hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw QuadratureFailure("gamma quantile bracket overflow");
  }
  // Bisection with Newton acceleration on F(x) - p; density from lgamma.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = regularized_gamma_p(shape, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double pdf =
        std::exp((shape - 1.0) * std::log(x) - x - std::lgamma(shape));
    double next = x;
    if (pdf > 0.0) next = x - f / pdf;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-12 * (1.0 + x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x * scale;
}

namespace {

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth,
                            int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= max_depth) {
    throw QuadratureFailure("adaptive quadrature recursion limit reached");
  }
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1,
                              max_depth) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw InvalidInput("integration bounds must satisfy a <= b");
  }
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, max_depth);
}

SampleMoments sample_moments(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) throw InvalidInput("need at least two values for moments");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double nn = static_cast<double>(n);
  const double variance = m2 / (nn - 1.0);
  const double sd = std::sqrt(m2 / nn);
  const double skew = sd > 0.0 ? (m3 / nn) / (sd * sd * sd) : 0.0;
  return {mean, variance, skew};
}

}  // namespace cgkdm
