#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "cgkdm/copula.hpp"

namespace cgkdm {

// Symmetric unit-diagonal correlation matrix with a precomputed sampling
// factor. Accepts positive semidefinite matrices (smallest eigenvalue down
// to -1e-10, clamped), so perfectly correlated cases are representable.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Eigen::MatrixXd m);

  static CorrelationMatrix identity(int d);
  static CorrelationMatrix equicorrelated(int d, double rho);
  static CorrelationMatrix ar1(int d, double rho);

  const Eigen::MatrixXd& matrix() const { return m_; }
  const Eigen::MatrixXd& factor() const { return factor_; }  // m = F F^T
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Eigen::MatrixXd m_;
  Eigen::MatrixXd factor_;
};

// n rows of N(0, corr); deterministic per seed.
Sample sample_mvn(const CorrelationMatrix& corr, int n, std::uint64_t seed);

// Multivariate t: each row is an MVN draw divided by sqrt(chi^2_dof / dof)
// with the divisor shared across coordinates of the row.
Sample sample_mvt(const CorrelationMatrix& corr, int dof, int n,
                  std::uint64_t seed);

// Named synthetic scenarios for the numerical illustrations. Parameters not
// used by a scenario are ignored.
struct Scenario {
  std::string name;       // see sample_scenario for the catalogue
  double rho = 0.0;
  int d = 2;
  int dof = 3;
  std::string orientation;  // e.g. "++-" for the monotone patterns

  static Scenario bvn(double rho);
  static Scenario mvn_equicorrelated(int d, double rho);
  static Scenario mvn_ar1(int d, double rho);
  static Scenario mvt_equicorrelated(int d, double rho, int dof = 3);
  static Scenario named(const std::string& name, int d = 2);
  static Scenario monotone_orientation(const std::string& pattern);
};

// Catalogue:
//   bvn                    bivariate normal, correlation rho
//   mvn-equi | mvn-ar      multivariate normal, equicorrelated / AR(1)
//   mvt-equi               multivariate t_dof, equicorrelated
//   linear-noise           X ~ N(0,1), Y = X + N(0, 2.3)
//   cosine                 X ~ U(-1,1), Y = cos(2 pi X) + U(-0.5, 0.5)
//   additive-monotone      X_1..X_{d-1} ~ U(-10,10), X_d = sum + U(-1,1)
//   multiplicative-monotone X_1..X_{d-1} ~ U(0,10), X_d = prod + U(-1,1)
//   quadratic              X_1..X_{d-1} ~ U(-10,10), X_d = sum of squares + U(-1,1)
//   orientation            deterministic rows X_j^(i) = +-i per pattern
//   fig3-h .. fig3-n       stand-in shapes (circle, cross, sine, step,
//                          noisy/clean monotone curves); recipes are ours,
//                          the original generating code is not published
Sample sample_scenario(const Scenario& sc, int n, std::uint64_t seed);

}  // namespace cgkdm
