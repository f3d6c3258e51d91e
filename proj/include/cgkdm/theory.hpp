#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>

#include "cgkdm/kernel.hpp"
#include "cgkdm/rng.hpp"

namespace cgkdm {

// Coefficient table of the even power series for the squared measure on
// bivariate normal copulas:
//   I^2(rho) = C_{sigma,2} * sum_{i,j >= 1} coeffs(i,j) rho^{i+j},
// with coeffs(i,j) the squared kernel bracket against the orthonormal
// Hermite basis. Entries are nonnegative, symmetric, vanish for odd i+j,
// and are bounded by 1. By Parseval the full (untruncated) table sums to
// kappa(sigma/sqrt(2)), so tail_mass = kappa(sigma/sqrt(2)) - sum(coeffs)
// bounds the truncated coefficient mass and yields a rigorous series tail
// bound tail(rho) <= C * rho^(K+2) * tail_mass.
struct HermiteSeries {
  double sigma;
  int truncation;         // K: indices run 0..K
  Eigen::MatrixXd coeffs; // (K+1) x (K+1)
  double tail_mass;

  // Truncated series for I^2 at correlation rho, without the normalizer.
  double raw_series(double rho) const;
};

HermiteSeries hermite_coeffs(Bandwidth b, int truncation);

// Population CGKDM of a bivariate normal with correlation rho, through the
// Hermite power series; exact 0 at rho = 0 and exact 1 at |rho| = 1.
// Throws TruncationInsufficient when the series tail bound at this rho
// exceeds tail_tol. The bound is conservative (it prices the whole excluded
// coefficient mass at the lowest excluded power), so the guard tolerance
// sits well above the realized truncation error.
double cgkdm_bvn(double rho, Bandwidth b, int truncation = 30,
                 double tail_tol = 1e-6);
double cgkdm_bvn(double rho, const HermiteSeries& series, double c_sigma_2,
                 double tail_tol = 1e-6);

// Monte Carlo estimate of the squared population measure I^2 for an
// arbitrary copula sampler; `value` is clamped at zero, `std_error` comes
// from batch means over independent substreams.
struct PopulationEstimate {
  double value;      // estimate of I^2, clamped at 0
  double std_error;
  int replicates;
  std::uint64_t seed;
};

// Writes one draw from a copula on [0,1]^d into `out`.
using CopulaSampler = std::function<void(RandomStream&, std::span<double>)>;

PopulationEstimate cgkdm_population_mc(const CopulaSampler& sampler,
                                       Bandwidth b, int d, int reps,
                                       std::uint64_t seed);

// Built-in samplers.
CopulaSampler independent_sampler();
CopulaSampler diagonal_sampler();
CopulaSampler gaussian_copula_sampler(double rho);
// Density 2 * 1[prod_i (u_i - 1/2) >= 0]; every strict lower-dimensional
// marginal is uniform, yet the copula is not.
CopulaSampler sign_pattern_sampler();
CopulaSampler mixture_sampler(CopulaSampler a, CopulaSampler c, double alpha);
// Keeps the listed coordinates of a base sampler of dimension base_dim.
CopulaSampler marginal_of(CopulaSampler base, int base_dim,
                          std::vector<int> keep);

}  // namespace cgkdm
