#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cgkdm/copula.hpp"
#include "cgkdm/kernel.hpp"

namespace cgkdm {

// The five sums of the closed-form estimator. s1, s2 depend on the data;
// v1, v2, v3 depend only on (n, d, sigma).
//   numerator   = s1 - 2 s2 + v3 = gamma^2(C_n, Pi_n)
//   denominator = v1 - 2 v2 + v3 = gamma^2(M_n, Pi_n) > 0 for n >= 2
struct EstimatorTerms {
  double s1, s2, v1, v2, v3;
  double numerator() const { return s1 - 2.0 * s2 + v3; }
  double denominator() const { return v1 - 2.0 * v2 + v3; }
};

EstimatorTerms estimator_terms(const PseudoSample& p, Bandwidth b);

// The plug-in estimate sqrt((s1 - 2 s2 + v3) / (v1 - 2 v2 + v3)), in (0, 1]
// for d = 2 (the upper bound is proven only there). O(d n^2) time.
// Exactly invariant under column permutations and strictly monotone
// per-column transformations of the underlying sample.
double estimate(const PseudoSample& p, Bandwidth b);

// Double-centered kernel Gram matrices of the two coordinates (d = 2 only).
// Rows and columns of each matrix sum to zero.
struct CenteredGram {
  Eigen::MatrixXd v;
  Eigen::MatrixXd w;
};

CenteredGram centered_grams(const PseudoSample& p, Bandwidth b);

// Squared estimate via the centered-Gram correlation form
// sum(V.*W) / (sqrt(sum V^2) sqrt(sum W^2)); equals estimate()^2.
double estimate_dim2_centered(const PseudoSample& p, Bandwidth b);

// Comparison estimators: U-statistic and block form against m uniform draws.
// Type U may legitimately be negative; Type B is a squared distance between
// two empirical measures and is clamped at zero.
double estimate_type_u(const PseudoSample& p, Bandwidth b, std::uint64_t seed);
double estimate_type_b(const PseudoSample& p, Bandwidth b, int m,
                       std::uint64_t seed);

}  // namespace cgkdm
