#pragma once

#include <utility>

#include "cgkdm/copula.hpp"
#include "cgkdm/kernel.hpp"

namespace cgkdm {

// Classical bivariate measures on a two-column sample.
double pearson(const Sample& s);   // ZeroVariance if a column is constant
double spearman(const Sample& s);  // Pearson of the pseudo-observations
double kendall(const Sample& s);   // concordant/discordant pair proportion

// Sample distance correlation (biased V-statistic double-centering form).
double dcor(const Sample& s);      // DegenerateSample if a distance matrix is 0

// Multivariate Spearman's rho of type 2:
// rho = (d+1)/(2^d - (d+1)) * { (2^d / n) sum_i prod_j Y_j^(i) - 1 }.
double mv_spearman_rho2(const PseudoSample& p);

// Returns (estimate, empirical weighted distance correlation on the
// pseudo-observations via the centered-Gram identity); the two agree to
// numerical precision in d = 2.
std::pair<double, double> cgkdm_weighted_dcor_check(const PseudoSample& p,
                                                    Bandwidth b);

}  // namespace cgkdm
