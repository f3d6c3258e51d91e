#include "cgkdm/theory.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cgkdm/errors.hpp"
#include "cgkdm/parallel.hpp"
#include "cgkdm/special.hpp"

namespace cgkdm {

namespace {

// Composite Gauss-Legendre rule on [-L, L]. The integrands are products of
// Hermite functions against a smooth kernel; panels are kept below the
// fastest oscillation scale of the basis.
struct PlaneRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// 12-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGL12x[6] = {0.1252334085114689, 0.3678314989981802,
                              0.5873179542866175, 0.7699026741943047,
                              0.9041172563704749, 0.9815606342467192};
constexpr double kGL12w[6] = {0.2491470458134028, 0.2334925365383548,
                              0.2031674267230659, 0.1600783285433462,
                              0.1069393259953184, 0.0471753363865118};

PlaneRule plane_rule(double half_width, int panels) {
  PlaneRule r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * 12);
  r.weights.reserve(static_cast<std::size_t>(panels) * 12);
  const double h = 2.0 * half_width / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = -half_width + (p + 0.5) * h;
    for (int k = 0; k < 6; ++k) {
      for (double sign : {-1.0, 1.0}) {
        r.nodes.push_back(mid + sign * 0.5 * h * kGL12x[k]);
        r.weights.push_back(0.5 * h * kGL12w[k]);
      }
    }
  }
  return r;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / 2.5066282746310002;
}

}  // namespace

double HermiteSeries::raw_series(double rho) const {
  // Even powers only; iterate the upper triangle.
  double total = 0.0;
  for (int i = truncation; i >= 1; --i) {
    for (int j = truncation; j >= 1; --j) {
      if ((i + j) % 2 != 0) continue;
      total += coeffs(i, j) * std::pow(rho, i + j);
    }
  }
  return total;
}

HermiteSeries hermite_coeffs(Bandwidth b, int truncation) {
  if (truncation < 1) throw InvalidInput("hermite truncation must be >= 1");
  const int K = truncation;

  // Quadrature wide enough to cover the Hermite turning point sqrt(2K+1);
  // beyond the grid the integrand carries a full normal density factor.
  // Panel width stays below the fastest oscillation scale pi / sqrt(2K+1).
  const double turning = std::sqrt(2.0 * K + 1.0);
  const double half_width = std::max(10.0, 0.25 * turning + 8.0);
  const int panels = std::max(
      128, 2 * static_cast<int>(std::ceil(2.0 * half_width * turning /
                                          std::numbers::pi)));
  const PlaneRule rule = plane_rule(half_width, panels);
  const int A = static_cast<int>(rule.nodes.size());

  // Orthonormal Hermite values h_k(x): h0 = 1, h1 = x,
  // h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1).
  Eigen::MatrixXd H(A, K + 1);
  for (int a = 0; a < A; ++a) {
    const double x = rule.nodes[static_cast<std::size_t>(a)];
    H(a, 0) = 1.0;
    if (K >= 1) H(a, 1) = x;
    for (int k = 1; k < K; ++k) {
      H(a, k + 1) = (x * H(a, k) - std::sqrt(static_cast<double>(k)) * H(a, k - 1)) /
                    std::sqrt(static_cast<double>(k + 1));
    }
  }
  // Fold the weight w_a phi(x_a) into the basis matrix.
  Eigen::VectorXd wphi(A), Phi(A);
  for (int a = 0; a < A; ++a) {
    const double x = rule.nodes[static_cast<std::size_t>(a)];
    wphi(a) = rule.weights[static_cast<std::size_t>(a)] * normal_pdf(x);
    Phi(a) = normal_cdf(x);
  }
  const Eigen::MatrixXd Hw = wphi.asDiagonal() * H;

  // B = Hw^T Kmat Hw with Kmat(a,b) = exp(-(Phi_a - Phi_b)^2 / 2 sigma^2),
  // streamed by rows to avoid materializing the A x A kernel matrix.
  const double inv_two_s2 = 1.0 / (2.0 * b.sigma * b.sigma);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(A, K + 1);
  Eigen::VectorXd krow(A);
  for (int a = 0; a < A; ++a) {
    for (int c = 0; c < A; ++c) {
      const double dphi = Phi(a) - Phi(c);
      krow(c) = std::exp(-dphi * dphi * inv_two_s2);
    }
    G.row(a) = krow.transpose() * Hw;
  }
  Eigen::MatrixXd brackets = Hw.transpose() * G;

  HermiteSeries out;
  out.sigma = b.sigma;
  out.truncation = K;
  out.coeffs = brackets.array().square();
  const double total_mass = kappa(Bandwidth(b.sigma / std::numbers::sqrt2));
  out.tail_mass = std::max(0.0, total_mass - out.coeffs.sum());
  return out;
}

double cgkdm_bvn(double rho, const HermiteSeries& series, double c_sigma_2,
                 double tail_tol) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw InvalidInput("rho must be in [-1,1]");
  if (rho == 0.0) return 0.0;
  if (rho == 1.0 || rho == -1.0) return 1.0;
  const double tail_bound = c_sigma_2 * series.tail_mass *
                            std::pow(std::abs(rho), series.truncation + 2);
  if (tail_bound > tail_tol) {
    throw TruncationInsufficient(
        "series tail bound " + std::to_string(tail_bound) + " exceeds " +
        std::to_string(tail_tol) + " at rho=" + std::to_string(rho) +
        "; increase the truncation order");
  }
  const double i2 = c_sigma_2 * series.raw_series(rho);
  if (i2 <= 0.0) return 0.0;
  return std::min(1.0, std::sqrt(i2));
}

double cgkdm_bvn(double rho, Bandwidth b, int truncation, double tail_tol) {
  const HermiteSeries series = hermite_coeffs(b, truncation);
  const double c2 = normalizer(b, 2).c_sigma_d;
  return cgkdm_bvn(rho, series, c2, tail_tol);
}

PopulationEstimate cgkdm_population_mc(const CopulaSampler& sampler,
                                       Bandwidth b, int d, int reps,
                                       std::uint64_t seed) {
  if (reps < 1) throw InvalidInput("population MC needs reps >= 1");
  if (d < 2) throw InvalidDims("population MC needs d >= 2");
  const double c = normalizer(b, d).c_sigma_d;
  const double two_s2 = 2.0 * b.sigma * b.sigma;

  const int batches = std::min(reps, 100);
  const std::int64_t per_batch = reps / batches;
  // Any remainder is folded into the last batch.
  std::vector<double> batch_mean(static_cast<std::size_t>(batches), 0.0);
  RandomStream root(seed);

  parallel_for_index(batches, [&](std::int64_t bi) {
    RandomStream rs = root.substream(static_cast<std::uint64_t>(bi));
    const std::int64_t count =
        bi == batches - 1 ? reps - per_batch * (batches - 1) : per_batch;
    std::vector<double> s(static_cast<std::size_t>(d)),
        sp(static_cast<std::size_t>(d)), t(static_cast<std::size_t>(d)),
        tp(static_cast<std::size_t>(d));
    double acc = 0.0;
    for (std::int64_t r = 0; r < count; ++r) {
      sampler(rs, s);
      sampler(rs, sp);
      for (auto& v : t) v = rs.uniform();
      for (auto& v : tp) v = rs.uniform();
      for (const auto* draw : {&s, &sp}) {
        for (double v : *draw) {
          if (!(v >= 0.0 && v <= 1.0)) {
            throw SamplerRangeViolation("sampler produced a point outside [0,1]^d");
          }
        }
      }
      auto ksum = [&](const std::vector<double>& a, const std::vector<double>& c2v) {
        double d2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = a[static_cast<std::size_t>(k)] - c2v[static_cast<std::size_t>(k)];
          d2 += diff * diff;
        }
        return std::exp(-d2 / two_s2);
      };
      acc += ksum(s, sp) - 2.0 * ksum(s, t) + ksum(t, tp);
    }
    batch_mean[static_cast<std::size_t>(bi)] = acc / static_cast<double>(count);
  });

  // Equal-weight combination is fine: batches differ by at most one rep.
  double mean = 0.0;
  for (double m : batch_mean) mean += m;
  mean /= batches;
  double var = 0.0;
  for (double m : batch_mean) var += (m - mean) * (m - mean);
  var /= batches > 1 ? (batches - 1) : 1;

  PopulationEstimate out;
  out.value = std::max(0.0, c * mean);
  out.std_error = c * std::sqrt(var / batches);
  out.replicates = reps;
  out.seed = seed;
  return out;
}

CopulaSampler independent_sampler() {
  return [](RandomStream& rs, std::span<double> out) {
    for (auto& v : out) v = rs.uniform();
  };
}

CopulaSampler diagonal_sampler() {
  return [](RandomStream& rs, std::span<double> out) {
    const double u = rs.uniform();
    for (auto& v : out) v = u;
  };
}

CopulaSampler gaussian_copula_sampler(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw InvalidInput("gaussian copula sampler needs |rho| < 1");
  }
  const double root = std::sqrt(1.0 - rho * rho);
  return [rho, root](RandomStream& rs, std::span<double> out) {
    if (out.size() != 2) {
      throw DimMismatch("gaussian copula sampler is bivariate");
    }
    const double z1 = rs.normal();
    const double z2 = rho * z1 + root * rs.normal();
    out[0] = normal_cdf(z1);
    out[1] = normal_cdf(z2);
  };
}

CopulaSampler sign_pattern_sampler() {
  return [](RandomStream& rs, std::span<double> out) {
    // Rejection from the uniform cube; acceptance probability is 1/2.
    for (;;) {
      double prod = 1.0;
      for (auto& v : out) {
        v = rs.uniform();
        prod *= v - 0.5;
      }
      if (prod >= 0.0) return;
    }
  };
}

CopulaSampler mixture_sampler(CopulaSampler a, CopulaSampler c, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidInput("mixture weight must be in [0,1]");
  }
  return [a = std::move(a), c = std::move(c), alpha](RandomStream& rs,
                                                     std::span<double> out) {
    if (rs.uniform() < alpha) {
      a(rs, out);
    } else {
      c(rs, out);
    }
  };
}

CopulaSampler marginal_of(CopulaSampler base, int base_dim,
                          std::vector<int> keep) {
  for (int k : keep) {
    if (k < 0 || k >= base_dim) throw InvalidInput("marginal index out of range");
  }
  return [base = std::move(base), base_dim, keep](RandomStream& rs,
                                                  std::span<double> out) {
    if (out.size() != keep.size()) {
      throw DimMismatch("marginal sampler output size mismatch");
    }
    std::vector<double> full(static_cast<std::size_t>(base_dim));
    base(rs, full);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      out[i] = full[static_cast<std::size_t>(keep[i])];
    }
  };
}

}  // namespace cgkdm
